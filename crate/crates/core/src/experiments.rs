//! Seeded batch experiments. Each function returns a typed report whose
//! `rows` flatten into [`ExperimentRow`]s for CSV output; every row carries
//! the sub-seed it was drawn from, so any single row can be replayed.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{self, ConstructionParams};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::numtheory;
use crate::ramsey::{self, DEFAULT_NODE_BUDGET};
use crate::seed::{self, stream};
use crate::spectrum::{self, Method};

/// Bumped whenever the CSV columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Column order of [`ExperimentRow`] in CSV output.
pub const CSV_COLUMNS: [&str; 13] = [
    "experiment",
    "trial",
    "seed",
    "n1",
    "n2",
    "edges",
    "phi",
    "density",
    "distinct_count",
    "value",
    "verdict",
    "note",
    "wall_ms",
];

/// Largest number of graphs an exhaustive conjecture check will enumerate.
pub const EXHAUSTIVE_GRAPH_LIMIT: u64 = 5_000_000;

/// Acceptable band for |M(n)| / ford_estimate(n).
pub const FORD_RATIO_BAND: (f64, f64) = (0.1, 10.0);

/// One flat result line. Columns that do not apply to an experiment are
/// left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment: String,
    pub trial: u64,
    pub seed: u64,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub edges: Option<u64>,
    pub phi: Option<u64>,
    pub density: Option<f64>,
    pub distinct_count: Option<u64>,
    pub value: Option<f64>,
    pub verdict: Option<bool>,
    pub note: String,
    pub wall_ms: Option<f64>,
}

impl ExperimentRow {
    fn new(experiment: &str, trial: u64, seed: u64) -> Self {
        ExperimentRow {
            experiment: experiment.to_string(),
            trial,
            seed,
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
        }
    }

    /// Drops the wall-time so output is byte-identical across runs.
    pub fn without_timing(mut self) -> Self {
        self.wall_ms = None;
        self
    }
}

fn elapsed_ms(start: Instant) -> Option<f64> {
    Some(start.elapsed().as_secs_f64() * 1e3)
}

/// Copy of `g` without isolated vertices; Φ is unchanged.
pub fn strip_isolated(g: &BipartiteGraph) -> BipartiteGraph {
    let xs: Vec<usize> = (0..g.x_size()).filter(|&x| g.row(x).count_ones() > 0).collect();
    let ys: Vec<usize> = (0..g.y_size()).filter(|&y| g.col(y).count_ones() > 0).collect();
    BipartiteGraph::from_fn(xs.len(), ys.len(), |i, j| g.has_edge(xs[i], ys[j]))
}

// ---------------------------------------------------------------------------
// Conjecture

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n: u64,
    /// Φ(K_{n,n}).
    pub target: u64,
    pub side_bound: u64,
    pub exhaustive: bool,
    pub graphs_checked: u64,
    pub min_phi: Option<u64>,
    pub min_ratio: Option<f64>,
    /// Exact-Φ graphs below the target. Any entry refutes an instance.
    pub violations: Vec<ExperimentRow>,
    /// Sampled-Φ graphs below the target; sampled Φ only bounds Φ from below.
    pub inconclusive: u64,
    pub rows: Vec<ExperimentRow>,
}

impl ConjectureReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Shapes (n1, n2) with n1 <= n2 <= bound and n1·n2 >= n².
pub fn conjecture_shapes(n: u64, side_bound: u64) -> Result<Vec<(u64, u64)>> {
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    let shapes: Vec<(u64, u64)> = (1..=side_bound)
        .flat_map(|a| (a..=side_bound).map(move |b| (a, b)))
        .filter(|&(a, b)| a * b >= n * n)
        .collect();
    if shapes.is_empty() {
        return Err(Error::param(
            "side_bound",
            format!("no n1 <= n2 <= {side_bound} with n1*n2 >= {}", n * n),
        ));
    }
    Ok(shapes)
}

fn phi_of(g: &BipartiteGraph, budget: u64, seed: u64) -> (u64, Method) {
    let core = strip_isolated(g);
    match spectrum::phi_exact(&core, budget) {
        Ok(r) => (r.phi, Method::Exact),
        Err(_) => (spectrum::phi_sampled(&core, 4096, seed).phi, Method::Sampled),
    }
}

fn summarize(n: u64, side_bound: u64, exhaustive: bool, target: u64, rows: Vec<ExperimentRow>, checked: u64) -> ConjectureReport {
    let min_phi = rows.iter().filter_map(|r| r.phi).min();
    let violations: Vec<ExperimentRow> = rows
        .iter()
        .filter(|r| r.verdict == Some(false) && r.note.starts_with("exact"))
        .cloned()
        .collect();
    let inconclusive = rows
        .iter()
        .filter(|r| r.verdict == Some(false) && r.note.starts_with("sampled"))
        .count() as u64;
    for v in &violations {
        log::error!("conjecture violated: n = {n}, shape {:?}x{:?}, seed {}, phi {:?} < {target}", v.n1, v.n2, v.seed, v.phi);
    }
    ConjectureReport {
        n,
        target,
        side_bound,
        exhaustive,
        graphs_checked: checked,
        min_phi,
        min_ratio: min_phi.map(|p| p as f64 / target as f64),
        violations,
        inconclusive,
        rows,
    }
}

/// Every graph with exactly n² edges on every admissible shape. Rows hold
/// one line per shape with the minimum Φ and the number of graphs.
pub fn conjecture_exhaustive(n: u64, side_bound: u64, budget: u64) -> Result<ConjectureReport> {
    let shapes = conjecture_shapes(n, side_bound)?;
    let edges = n * n;
    let total: u64 = shapes
        .iter()
        .map(|&(a, b)| u64::try_from(numtheory::binomial(a * b, edges)).unwrap_or(u64::MAX))
        .fold(0u64, u64::saturating_add);
    if total > EXHAUSTIVE_GRAPH_LIMIT {
        return Err(Error::TooLarge {
            what: "exhaustive graph count",
            requested: total,
            limit: EXHAUSTIVE_GRAPH_LIMIT,
        });
    }
    let target = numtheory::phi_complete_bipartite(n, n)?;
    let rows: Vec<ExperimentRow> = shapes
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let start = Instant::now();
            let cells = (a * b) as usize;
            let mut min: Option<(u64, Method)> = None;
            let mut count = 0u64;
            for_each_combination(cells, edges as usize, |pick| {
                let list: Vec<(usize, usize)> = pick.iter().map(|&c| (c / b as usize, c % b as usize)).collect();
                let g = BipartiteGraph::new(a as usize, b as usize, &list).expect("distinct cells");
                let r = phi_of(&g, budget, count);
                if min.is_none_or(|m| r.0 < m.0) {
                    min = Some(r);
                }
                count += 1;
            });
            let (phi, method) = min.expect("at least one graph per shape");
            let mut row = ExperimentRow::new("conjecture", i as u64, 0);
            row.n1 = Some(a);
            row.n2 = Some(b);
            row.edges = Some(edges);
            row.phi = Some(phi);
            row.value = Some(count as f64);
            row.verdict = Some(phi >= target);
            row.note = format!("{} min over {count} graphs", method_name(method));
            row.wall_ms = elapsed_ms(start);
            row
        })
        .collect();
    let checked = rows.iter().map(|r| r.value.unwrap_or(0.0) as u64).sum();
    Ok(summarize(n, side_bound, true, target, rows, checked))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::Sampled => "sampled",
    }
}

/// Calls `f` with each k-subset of 0..n in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `samples` graphs: a shape drawn uniformly from the admissible shapes,
/// then n² edges placed uniformly on it.
pub fn conjecture_sampled(n: u64, samples: u64, master: u64, side_bound: u64, budget: u64) -> Result<ConjectureReport> {
    let shapes = conjecture_shapes(n, side_bound)?;
    let target = numtheory::phi_complete_bipartite(n, n)?;
    let edges = n * n;
    let rows: Vec<ExperimentRow> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let side_seed = seed::sub_seed(master, stream::SIDES, t);
            let graph_seed = seed::sub_seed(master, stream::GRAPH, t);
            let pick = (rand::Rng::random_range(&mut seed::rng(side_seed), 0..shapes.len())) as usize;
            let (a, b) = shapes[pick];
            let g = BipartiteGraph::random_exact_edges(a as usize, b as usize, edges, graph_seed).expect("shape fits");
            let (phi, method) = phi_of(&g, budget, graph_seed);
            let mut row = ExperimentRow::new("conjecture", t, graph_seed);
            row.n1 = Some(a);
            row.n2 = Some(b);
            row.edges = Some(edges);
            row.phi = Some(phi);
            row.value = Some(phi as f64 / target as f64);
            row.verdict = Some(phi >= target);
            row.note = method_name(method).to_string();
            row.wall_ms = elapsed_ms(start);
            row
        })
        .collect();
    Ok(summarize(n, side_bound, false, target, rows, samples))
}

// ---------------------------------------------------------------------------
// Density

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n: u64,
    pub c: f64,
    pub trials: u64,
    pub passing: u64,
    /// Passing graphs whose biclique searches all finished.
    pub passing_exhaustive: u64,
    pub min_density: Option<f64>,
    pub max_density: Option<f64>,
    /// min(min density, 1 − max density) over passing graphs.
    pub epsilon: Option<f64>,
    pub rows: Vec<ExperimentRow>,
}

impl DensityReport {
    /// True when every passing graph has density strictly inside (lo, hi).
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.rows
            .iter()
            .filter(|r| r.verdict == Some(true))
            .all(|r| r.density.is_some_and(|d| d > lo && d < hi))
    }
}

/// Ramsey filter and density summary over the given graphs.
pub fn density_of_graphs(graphs: &[(u64, BipartiteGraph)], c: f64, node_budget: u64) -> Result<DensityReport> {
    let rows: Vec<ExperimentRow> = graphs
        .par_iter()
        .enumerate()
        .map(|(t, (s, g))| -> Result<ExperimentRow> {
            let start = Instant::now();
            let v = ramsey::is_c_bipartite_ramsey(g, c, node_budget)?;
            let mut row = ExperimentRow::new("density", t as u64, *s);
            row.n1 = Some(g.x_size() as u64);
            row.n2 = Some(g.y_size() as u64);
            row.edges = Some(g.edge_count());
            row.density = Some(g.density_f64()?);
            row.verdict = Some(v.is_ramsey);
            row.note = if v.search_exhaustive { "exhaustive" } else { "budget" }.to_string();
            row.wall_ms = elapsed_ms(start);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let pass: Vec<&ExperimentRow> = rows.iter().filter(|r| r.verdict == Some(true)).collect();
    let dens = pass.iter().filter_map(|r| r.density);
    let min_density = dens.clone().min_by(f64::total_cmp);
    let max_density = dens.max_by(f64::total_cmp);
    Ok(DensityReport {
        n: graphs.first().map_or(0, |g| g.1.x_size() as u64),
        c,
        trials: graphs.len() as u64,
        passing: pass.len() as u64,
        passing_exhaustive: pass.iter().filter(|r| r.note == "exhaustive").count() as u64,
        epsilon: min_density.zip(max_density).map(|(lo, hi)| lo.min(1.0 - hi)),
        min_density,
        max_density,
        rows,
    })
}

/// `trials` draws of G(n, n, 1/2).
pub fn density_study(n: u64, trials: u64, c: f64, master: u64) -> Result<DensityReport> {
    let graphs: Vec<(u64, BipartiteGraph)> = (0..trials)
        .map(|t| {
            let s = seed::sub_seed(master, stream::GRAPH, t);
            BipartiteGraph::random(n as usize, n as usize, 0.5, s).map(|g| (s, g))
        })
        .collect::<Result<_>>()?;
    let mut r = density_of_graphs(&graphs, c, DEFAULT_NODE_BUDGET)?;
    r.n = n;
    Ok(r)
}

// ---------------------------------------------------------------------------
// Ford comparison

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FordReport {
    pub band: (f64, f64),
    pub in_band: bool,
    /// Largest |ratio(n_{i+1}) / ratio(n_i) − 1| over consecutive rows.
    pub max_drift: f64,
    /// |M(n)|/n² strictly decreasing along the list.
    pub density_decreasing: bool,
    pub rows: Vec<ExperimentRow>,
}

/// |M(n)| against the Ford order of magnitude for each n, in the given order.
pub fn ford_table(ns: &[u64]) -> Result<FordReport> {
    if ns.is_empty() {
        return Err(Error::param("n", "at least one n is required"));
    }
    let rows: Vec<ExperimentRow> = ns
        .iter()
        .enumerate()
        .map(|(t, &n)| -> Result<ExperimentRow> {
            let start = Instant::now();
            let estimate = numtheory::ford_estimate(n)?;
            let m = numtheory::product_count(n, n)?;
            let ratio = m as f64 / estimate;
            let mut row = ExperimentRow::new("ford", t as u64, 0);
            row.n1 = Some(n);
            row.phi = Some(m);
            row.density = Some(m as f64 / (n as f64 * n as f64));
            row.value = Some(ratio);
            row.verdict = Some(ratio > FORD_RATIO_BAND.0 && ratio < FORD_RATIO_BAND.1);
            row.note = format!("estimate={estimate:.3}");
            row.wall_ms = elapsed_ms(start);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.value).collect();
    let dens: Vec<f64> = rows.iter().filter_map(|r| r.density).collect();
    Ok(FordReport {
        band: FORD_RATIO_BAND,
        in_band: rows.iter().all(|r| r.verdict == Some(true)),
        max_drift: ratios.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max),
        density_decreasing: dens.windows(2).all(|w| w[1] < w[0]),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Claim frequencies

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub n: u64,
    pub trials: u64,
    /// Trials whose graph failed before U could be sampled.
    pub structural_failures: u64,
    pub counts: [u64; 5],
    pub frequencies: [f64; 5],
    pub floor: f64,
    pub rows: Vec<ExperimentRow>,
}

impl ClaimReport {
    pub fn passes(&self) -> bool {
        self.frequencies.iter().all(|&f| f >= self.floor)
    }
}

/// Per-claim frequencies over `trials` independent (G(n, n, 1/2), U) draws,
/// with l at the midpoint of its range.
pub fn claim_frequencies(n: u64, trials: u64, params: &ConstructionParams, master: u64) -> Result<ClaimReport> {
    params.validate()?;
    let rows: Vec<ExperimentRow> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<ExperimentRow> {
            let start = Instant::now();
            let gs = seed::sub_seed(master, stream::GRAPH, t);
            let us = seed::sub_seed(master, stream::U_SAMPLE, t);
            let g = BipartiteGraph::random(n as usize, n as usize, 0.5, gs)?;
            let mut row = ExperimentRow::new("claims", t, gs);
            row.n1 = Some(n);
            row.n2 = Some(n);
            row.edges = Some(g.edge_count());
            match claims_for(&g, params, us) {
                Ok(d) => {
                    row.verdict = Some(d.claims().iter().all(|&c| c));
                    row.note = d.claims().iter().map(|&c| if c { '1' } else { '0' }).collect();
                    row.value = Some(d.equal_degree_pairs as f64);
                    row.distinct_count = Some(d.a_size);
                }
                Err(Error::StageFailed { stage, reason }) => {
                    row.verdict = Some(false);
                    row.note = format!("{stage}: {reason}");
                }
                Err(e) => return Err(e),
            }
            row.wall_ms = elapsed_ms(start);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut counts = [0u64; 5];
    let mut structural = 0;
    for r in &rows {
        let bits = r.note.as_bytes();
        if bits.len() == 5 && bits.iter().all(|b| matches!(b, b'0' | b'1')) {
            for (i, b) in bits.iter().enumerate() {
                counts[i] += (*b == b'1') as u64;
            }
        } else {
            structural += 1;
        }
    }
    let frequencies = counts.map(|c| if trials == 0 { 0.0 } else { c as f64 / trials as f64 });
    Ok(ClaimReport {
        n,
        trials,
        structural_failures: structural,
        counts,
        frequencies,
        floor: params.claim_floor,
        rows,
    })
}

fn claims_for(g: &BipartiteGraph, params: &ConstructionParams, u_seed: u64) -> Result<construction::ClaimDiagnostics> {
    let g = g.oriented();
    let cand = construction::build_candidate_pairs(&g)?;
    let pruned = construction::prune_non_diverse_pairs(&g, &cand.pairs, params.gamma, params.delta)?;
    let packs = construction::star_or_matching(&g, &pruned.kept, cand.d_prime)?;
    let div = construction::diversify(&g, &packs.packs, params.gamma, params.delta)?;
    let (lo, hi) = construction::l_range(&g, params.c);
    let l = (lo + hi) / 2;
    let u = construction::sample_u(&g, l, u_seed)?;
    construction::verify_claims(&g, &u, &div.a, l, packs.d_dprime, params)
}
