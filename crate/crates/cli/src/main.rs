//! `bip-ramsey-lab <command> [flags]`
//!
//! Exit codes: 0 when the command's verdict passes, 1 when it fails, 2 on
//! usage or runtime errors.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bip_ramsey_core::construction::{run_pipeline, theorem_harness, l_range, ConstructionParams, Stage};
use bip_ramsey_core::experiments::{self, ExperimentRow};
use bip_ramsey_core::graph::parse_graph;
use bip_ramsey_core::ramsey::{self, BicliqueKind, DEFAULT_NODE_BUDGET, DEFAULT_PAIR_BUDGET};
use bip_ramsey_core::spectrum::{self, DEFAULT_SPECTRUM_BUDGET};
use bip_ramsey_core::{numtheory, BipartiteGraph};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{Emit, Format, Report};

#[derive(Parser, Debug)]
#[command(name = "bip-ramsey-lab", version, about = "Induced-subgraph size spectra and bipartite Ramsey experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Master seed; every random draw is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Trial or sample count; each command has its own default.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Omit timestamps and wall times so output is byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct GraphArg {
    /// Graph file in the `bipartite v1` format; `-` reads stdin.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |M(n)|, the number of distinct products a·b with 0 <= a, b <= n.
    Mtable {
        #[arg(long)]
        n: u64,
    },
    /// H(x, y, z): integers up to x with a divisor in (y, z].
    Hxyz {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        z: f64,
    },
    /// Φ(G), the number of distinct induced-subgraph sizes (0 included).
    Phi {
        #[command(flatten)]
        graph: GraphArg,
        /// Use the sampled lower bound instead of the exact method.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_BUDGET)]
        budget: u64,
        /// Also report coverage of windows of this width.
        #[arg(long)]
        window: Option<u64>,
    },
    /// C-bipartite-Ramsey verdict; exit 1 when the graph is not Ramsey.
    Ramsey {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "C", default_value_t = 5.0)]
        big_c: f64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// (c, δ)-diversity, or pair diversity with --pair.
    Diverse {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 0.2)]
        c: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        pair: bool,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        pair_budget: u64,
    },
    /// (γ, δ, ε)-richness; exact for small sides, sampled with --sampled.
    Rich {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long)]
        sampled: bool,
    },
    /// Run the randomized construction on a graph or on G(n, n, 1/2).
    Construct {
        #[arg(long, conflicts_with = "random")]
        graph: Option<PathBuf>,
        /// Use G(n, n, 1/2) drawn from the master seed.
        #[arg(long)]
        random: Option<usize>,
        /// Defaults to the midpoint of [c·m, 2c·m].
        #[arg(long)]
        l: Option<u64>,
        /// TOML file overriding the bundled constants.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Union over a spread of l instead of a single run.
        #[arg(long)]
        harness: bool,
        /// Write the final sizes here, one per line.
        #[arg(long)]
        sizes_out: Option<PathBuf>,
    },
    /// Check Φ(G) >= Φ(K_{n,n}) over graphs with n² edges.
    Conjecture {
        #[arg(long)]
        n: u64,
        /// Largest side; defaults to n².
        #[arg(long)]
        side_bound: Option<u64>,
        /// Enumerate every graph instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_BUDGET)]
        budget: u64,
    },
    /// Densities of the Ramsey graphs among G(n, n, 1/2) draws.
    Density {
        #[arg(long, default_value_t = 64)]
        n: u64,
        #[arg(long = "C", default_value_t = 5.0)]
        big_c: f64,
        /// Passing graphs must have density strictly inside this band.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.4, 0.6])]
        band: Vec<f64>,
    },
    /// |M(n)| against the Ford order of magnitude.
    Ford {
        #[arg(long, value_delimiter = ',', default_values_t = [1000u64, 10_000, 100_000])]
        n: Vec<u64>,
        /// Largest tolerated |ratio(n_{i+1}) / ratio(n_i) − 1|.
        #[arg(long, default_value_t = 0.5)]
        max_drift: f64,
    },
    /// Empirical frequencies of the five claims about the sampled set U.
    Claims {
        #[arg(long, default_value_t = 64)]
        n: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Core(bip_ramsey_core::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<bip_ramsey_core::Error> for CliError {
    fn from(e: bip_ramsey_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(path.into(), e))
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))
    }
}

fn load_graph(path: &Path) -> CliResult<BipartiteGraph> {
    Ok(parse_graph(&read_text(path)?)?)
}

fn load_params(path: Option<&Path>, seed: u64) -> CliResult<ConstructionParams> {
    let p = match path {
        Some(p) => ConstructionParams::from_toml_str(&read_text(p)?)?,
        None => ConstructionParams::default(),
    };
    Ok(p.with_seed(seed))
}

fn row(command: &str, g: Option<&BipartiteGraph>) -> ExperimentRow {
    let mut r = ExperimentRow {
        experiment: command.to_string(),
        trial: 0,
        seed: 0,
        n1: None,
        n2: None,
        edges: None,
        phi: None,
        density: None,
        distinct_count: None,
        value: None,
        verdict: None,
        note: String::new(),
        wall_ms: None,
    };
    if let Some(g) = g {
        r.n1 = Some(g.x_size() as u64);
        r.n2 = Some(g.y_size() as u64);
        r.edges = Some(g.edge_count());
        r.density = g.density_f64().ok();
    }
    r
}

#[derive(Serialize)]
struct ConstructFailure<'a> {
    stage: Stage,
    reason: &'a str,
    attempts: u32,
    log: &'a [bip_ramsey_core::construction::AttemptRecord],
}

fn run(cmd: Command, common: &Common) -> CliResult<Report> {
    let seed = common.seed;
    Ok(match cmd {
        Command::Mtable { n } => {
            let count = numtheory::multiplication_table(n)?.cardinality();
            let mut r = row("mtable", None);
            r.n1 = Some(n);
            r.phi = Some(count);
            #[derive(Serialize)]
            struct Out {
                n: u64,
                count: u64,
            }
            Report::new("mtable", &Out { n, count }, vec![r], true)
        }
        Command::Hxyz { x, y, z } => {
            let h = numtheory::hxyz(x, y, z);
            let mut r = row("hxyz", None);
            r.n1 = Some(x);
            r.value = Some(h as f64);
            r.note = format!("y={y} z={z}");
            #[derive(Serialize)]
            struct Out {
                x: u64,
                y: f64,
                z: f64,
                h: u64,
                ratio: f64,
            }
            let ratio = if x == 0 { 0.0 } else { h as f64 / x as f64 };
            Report::new("hxyz", &Out { x, y, z, h, ratio }, vec![r], true)
        }
        Command::Phi { graph, sampled, budget, window } => {
            let g = load_graph(&graph.graph)?;
            let rep = if sampled {
                spectrum::phi_sampled(&g, common.trials.unwrap_or(4096), seed)
            } else {
                spectrum::phi_exact(&g, budget)?
            };
            let summary = rep.summary(window);
            let mut r = row("phi", Some(&g));
            r.seed = seed;
            r.phi = Some(rep.phi);
            r.note = format!("{:?}", rep.method).to_lowercase();
            Report::new("phi", &summary, vec![r], true)
        }
        Command::Ramsey { graph, big_c, node_budget } => {
            let g = load_graph(&graph.graph)?;
            let v = ramsey::is_c_bipartite_ramsey(&g, big_c, node_budget)?;
            let mut r = row("ramsey", Some(&g));
            r.value = Some(big_c);
            r.verdict = Some(v.is_ramsey);
            r.note = match &v.witness {
                Some(w) => format!(
                    "{} {}x{}",
                    if w.kind == BicliqueKind::Complete { "complete" } else { "empty" },
                    w.x_set.len(),
                    w.y_set.len()
                ),
                None if v.search_exhaustive => "no witness".into(),
                None => "no witness within budget".into(),
            };
            Report::new("ramsey", &v, vec![r], v.is_ramsey)
        }
        Command::Diverse { graph, c, delta, pair, alpha, eps, pair_budget } => {
            let g = load_graph(&graph.graph)?;
            let rep = if pair {
                ramsey::pair_diversity_check(&g, alpha, delta, eps, pair_budget, seed)?
            } else {
                ramsey::diversity_check(&g, c, delta)?
            };
            let mut r = row("diverse", Some(&g));
            r.verdict = Some(rep.passes);
            r.value = Some(rep.x.max_bad_count.max(rep.y.max_bad_count) as f64);
            r.note = if pair { "pair" } else { "single" }.into();
            Report::new("diverse", &rep, vec![r], rep.passes)
        }
        Command::Rich { graph, gamma, delta, eps, sampled } => {
            let g = load_graph(&graph.graph)?;
            let rep = if sampled {
                ramsey::richness_check_sampled(&g, gamma, delta, eps, common.trials.unwrap_or(1000), seed)?
            } else {
                ramsey::richness_check_exact(&g, gamma, delta, eps)?
            };
            let mut r = row("rich", Some(&g));
            r.verdict = Some(rep.passes);
            r.value = Some(rep.x.max_bad_vertices.max(rep.y.max_bad_vertices) as f64);
            r.note = format!("{:?}", rep.mode).to_lowercase();
            Report::new("rich", &rep, vec![r], rep.passes)
        }
        Command::Construct { graph, random, l, config, harness, sizes_out } => {
            let params = load_params(config.as_deref(), seed)?;
            let g = match (graph, random) {
                (Some(p), _) => load_graph(&p)?,
                (None, Some(n)) => BipartiteGraph::random(n, n, 0.5, seed)?,
                (None, None) => {
                    return Err(CliError::Usage("construct needs --graph or --random".into()))
                }
            };
            construct(&g, l, &params, harness, sizes_out.as_deref())?
        }
        Command::Conjecture { n, side_bound, exhaustive, budget } => {
            let bound = side_bound.unwrap_or(n * n);
            let rep = if exhaustive {
                experiments::conjecture_exhaustive(n, bound, budget)?
            } else {
                experiments::conjecture_sampled(n, common.trials.unwrap_or(1000), seed, bound, budget)?
            };
            let rows = rep.rows.clone();
            Report::new("conjecture", &rep, rows, rep.passes())
        }
        Command::Density { n, big_c, band } => {
            let rep = experiments::density_study(n, common.trials.unwrap_or(100), big_c, seed)?;
            let rows = rep.rows.clone();
            let pass = rep.within(band[0], band[1]);
            Report::new("density", &rep, rows, pass)
        }
        Command::Ford { n, max_drift } => {
            let rep = experiments::ford_table(&n)?;
            let rows = rep.rows.clone();
            let pass = rep.in_band && rep.density_decreasing && rep.max_drift <= max_drift;
            Report::new("ford", &rep, rows, pass)
        }
        Command::Claims { n, config } => {
            let params = load_params(config.as_deref(), seed)?;
            let rep = experiments::claim_frequencies(n, common.trials.unwrap_or(200), &params, seed)?;
            let rows = rep.rows.clone();
            Report::new("claims", &rep, rows, rep.passes())
        }
    })
}

fn construct(
    g: &BipartiteGraph,
    l: Option<u64>,
    params: &ConstructionParams,
    harness: bool,
    sizes_out: Option<&Path>,
) -> CliResult<Report> {
    let write_sizes = |sizes: &[u64]| -> CliResult<()> {
        if let Some(p) = sizes_out {
            let text: String = sizes.iter().map(|s| format!("{s}\n")).collect();
            std::fs::write(p, text).map_err(|e| CliError::Io(p.into(), e))?;
        }
        Ok(())
    };
    let mut r = row("construct", Some(g));
    r.seed = params.seed;
    let result = if harness {
        theorem_harness(g, params).map(|h| {
            r.distinct_count = Some(h.distinct_count);
            r.verdict = Some(h.successes > 0);
            r.note = format!("harness over {} values of l", h.l_values.len());
            (serde_json::to_value(&h).expect("serializes"), h.union.to_vec(), h.successes > 0)
        })
    } else {
        let l = l.unwrap_or_else(|| {
            let (lo, hi) = l_range(&g.oriented(), params.c);
            (lo + hi) / 2
        });
        run_pipeline(g, l, params).map(|out| {
            r.distinct_count = Some(out.family.distinct_count);
            r.value = Some(l as f64);
            r.verdict = Some(true);
            r.note = format!("attempt {}", out.witness.attempt);
            (serde_json::to_value(&out).expect("serializes"), out.family.final_sizes.to_vec(), true)
        })
    };
    match result {
        Ok((json, sizes, pass)) => {
            write_sizes(&sizes)?;
            Ok(Report { command: "construct", json, rows: vec![r], pass })
        }
        // Bad parameters are usage errors; everything else is a failed run.
        Err(f) if f.stage == Stage::Parameters => Err(CliError::Usage(f.reason)),
        Err(f) => {
            r.verdict = Some(false);
            r.note = format!("{}: {}", f.stage, f.reason);
            let body = ConstructFailure { stage: f.stage, reason: &f.reason, attempts: f.attempts, log: &f.log };
            Ok(Report::new("construct", &body, vec![r], false))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let emit = Emit {
        format: cli.common.format,
        out: cli.common.out.as_deref(),
        timestamp: !cli.common.no_timestamp,
        seed: cli.common.seed,
    };
    match run(cli.command, &cli.common) {
        Ok(report) => {
            let pass = report.pass;
            if let Err(e) = emit.write(report) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
