use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::stages::{self, f_of, require_oriented, CandidatePairs, Diversified, Pruned, QFamily, StarOrMatching};
use super::{ConstructionParams, ConstructionWitness, Stage};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Selection, VertexPack};
use crate::seed::{self, stream};
use crate::sizeset::SizeSet;

/// Sizes produced from one U.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeFamily {
    /// (k, i, e(U_{k,i})) over the whole index family.
    pub raw: Vec<(u64, u64, u64)>,
    /// Index pairs surviving the gap filter e(U_{k+1,0}) − e(U_{k,i}) ≥ K5·√f.
    pub filtered_count: u64,
    /// Distinct sizes of the filtered pairs, ascending.
    pub index_sizes: Vec<u64>,
    /// Smallest gap between consecutive `index_sizes`.
    pub min_gap: u64,
    /// Required spacing ⌊2·Q·√f⌋ + 1 of kept base sizes.
    pub gap: u64,
    /// Every `step`-th element of `index_sizes` is kept.
    pub step: u64,
    /// Kept (k, i, base size).
    pub thinned: Vec<(u64, u64, u64)>,
    pub final_sizes: SizeSet,
    pub distinct_count: u64,
    /// Sizes recounted on realized selections, and disagreements found.
    pub verified: u64,
    pub mismatches: u64,
}

/// Thins the family, shifts by Z-degrees, and recounts every size on its
/// realized selection.
pub fn enumerate_sizes(
    g: &BipartiteGraph,
    u: &Selection,
    fam: &QFamily,
    z: &[VertexPack],
    params: &ConstructionParams,
) -> Result<SizeFamily> {
    let sqrt_f = f_of(g).sqrt();
    let z_deg: Vec<u64> = z.iter().map(|pk| g.pack_degree_into(pk, u)).collect::<Result<_>>()?;
    if z_deg.iter().collect::<BTreeSet<_>>().len() != z_deg.len() {
        return Err(Error::Consistency("Z degrees into U are not distinct".into()));
    }
    let half = params.q_window * sqrt_f;
    let spread = z_deg.iter().max().zip(z_deg.iter().min()).map_or(0, |(a, b)| a - b);
    if spread as f64 > 2.0 * half {
        return Err(Error::stage(
            Stage::Enumerate,
            format!("Z degrees spread {spread} exceeds the window 2*Q*sqrt(f) = {:.2}", 2.0 * half),
        ));
    }

    let min_step = params.k5 * sqrt_f;
    let mut by_size: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    let mut filtered = 0u64;
    for &(k, i, size) in &fam.entries {
        let next = fam.size(k + 1, 0);
        if next as f64 - size as f64 >= min_step {
            filtered += 1;
            by_size.entry(size).or_insert((k, i));
        }
    }
    if by_size.is_empty() {
        return Err(Error::stage(Stage::QFamily, "no index pair passes the gap filter"));
    }
    let index_sizes: Vec<u64> = by_size.keys().copied().collect();
    let min_gap = index_sizes.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(1).max(1);
    let gap = (2.0 * half).floor() as u64 + 1;
    let step = gap.div_ceil(min_gap).max(1);
    let thinned: Vec<(u64, u64, u64)> = index_sizes
        .iter()
        .step_by(step as usize)
        .map(|s| {
            let (k, i) = by_size[s];
            (k, i, *s)
        })
        .collect();
    if thinned.windows(2).any(|w| w[1].2 - w[0].2 < gap) {
        return Err(Error::Consistency("thinned base sizes closer than the gap".into()));
    }

    let mut final_sizes = SizeSet::new(g.edge_count());
    let mut produced = 0u64;
    let mut verified = 0u64;
    let mut mismatches = 0u64;
    for &(k, i, size) in &fam.entries {
        let sel = fam.u_selection(g, u, k, i);
        verified += 1;
        mismatches += u64::from(g.induced_edge_count(&sel)? != size);
    }
    for &(k, i, base) in &thinned {
        let sel = fam.u_selection(g, u, k, i);
        if z.is_empty() {
            final_sizes.insert(base);
            produced += 1;
            continue;
        }
        for (pk, &dz) in z.iter().zip(&z_deg) {
            let mut with_z = sel.clone();
            with_z.insert_pack(pk);
            let size = base + dz;
            verified += 1;
            mismatches += u64::from(g.induced_edge_count(&with_z)? != size);
            final_sizes.insert(size);
            produced += 1;
        }
    }
    if mismatches > 0 {
        return Err(Error::Consistency(format!("{mismatches} sizes disagree with a direct recount")));
    }
    let distinct = final_sizes.cardinality();
    if distinct != produced {
        return Err(Error::Consistency(format!(
            "{produced} sizes produced but only {distinct} distinct; a constant is mis-set"
        )));
    }
    Ok(SizeFamily {
        raw: fam.entries.clone(),
        filtered_count: filtered,
        index_sizes,
        min_gap,
        gap,
        step,
        thinned,
        final_sizes,
        distinct_count: distinct,
        verified,
        mismatches,
    })
}

/// One U sample that did not lead to a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub u_seed: u64,
    pub stage: Stage,
    pub reason: String,
}

/// Why a pipeline run produced nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineFailure {
    pub stage: Stage,
    pub reason: String,
    pub attempts: u32,
    pub log: Vec<AttemptRecord>,
}

impl fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed after {} attempt(s): {}", self.stage, self.attempts, self.reason)
    }
}

impl std::error::Error for PipelineFailure {}

impl From<Error> for PipelineFailure {
    fn from(e: Error) -> Self {
        let stage = match &e {
            Error::StageFailed { stage, .. } => *stage,
            Error::Consistency(_) => Stage::Enumerate,
            _ => Stage::Parameters,
        };
        PipelineFailure {
            stage,
            reason: e.to_string(),
            attempts: 0,
            log: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub witness: ConstructionWitness,
    pub family: SizeFamily,
    /// Failed U samples before the successful one.
    pub log: Vec<AttemptRecord>,
    /// Wall time per stage in milliseconds; not part of the replayable state.
    pub timings_ms: BTreeMap<String, f64>,
}

/// The U-independent stages, shared across l values.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub graph: BipartiteGraph,
    pub transposed: bool,
    pub candidates: CandidatePairs,
    pub pruned: Pruned,
    pub packs: StarOrMatching,
    pub diversified: Diversified,
    pub timings_ms: BTreeMap<String, f64>,
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f();
    *timings.entry(stage.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64() * 1e3;
    out
}

pub(crate) fn prepare(g: &BipartiteGraph, params: &ConstructionParams) -> Result<Prepared> {
    params.validate()?;
    let graph = g.oriented().into_owned();
    require_oriented(&graph)?;
    let mut t = BTreeMap::new();
    let candidates = timed(&mut t, Stage::CandidatePairs, || stages::build_candidate_pairs(&graph))?;
    let pruned = timed(&mut t, Stage::Prune, || {
        stages::prune_non_diverse_pairs(&graph, &candidates.pairs, params.gamma, params.delta)
    })?;
    let packs = timed(&mut t, Stage::StarOrMatching, || {
        stages::star_or_matching(&graph, &pruned.kept, candidates.d_prime)
    })?;
    let diversified = timed(&mut t, Stage::Diversify, || {
        stages::diversify(&graph, &packs.packs, params.gamma, params.delta)
    })?;
    Ok(Prepared {
        transposed: graph.is_transposed(),
        graph,
        candidates,
        pruned,
        packs,
        diversified,
        timings_ms: t,
    })
}

/// Seed of U-sample number `attempt` for a given l.
pub(crate) fn u_seed(master: u64, l: u64, attempt: u32) -> u64 {
    seed::sub_seed(seed::sub_seed(master, stream::U_SAMPLE, l), stream::TRIAL, attempt as u64)
}

fn attempt(
    prep: &Prepared,
    l: u64,
    p: f64,
    u_seed: u64,
    attempt_no: u32,
    params: &ConstructionParams,
    t: &mut BTreeMap<String, f64>,
) -> Result<(ConstructionWitness, SizeFamily)> {
    let g = &prep.graph;
    let a = &prep.diversified.a;
    let u = timed(t, Stage::SampleU, || stages::sample_u(g, l, u_seed))?;
    let diag = timed(t, Stage::Claims, || {
        stages::verify_claims(g, &u, a, l, prep.packs.d_dprime, params)
    })?;
    if !diag.gating_passed() {
        let failed: Vec<String> = [1, 2, 3, 5]
            .iter()
            .filter(|&&c| !diag.claims()[c - 1])
            .map(|c| c.to_string())
            .collect();
        return Err(Error::stage(Stage::Claims, format!("claims {} failed", failed.join(", "))));
    }
    let split = timed(t, Stage::Split, || stages::split_and_order(g, &u, a, &diag, params))?;
    let fam = timed(t, Stage::QFamily, || stages::build_q_family(g, &u, &split, params))?;
    let family = timed(t, Stage::Enumerate, || enumerate_sizes(g, &u, &fam, &split.z, params))?;
    let witness = ConstructionWitness {
        transposed: prep.transposed,
        l,
        p,
        u_seed,
        attempt: attempt_no,
        u,
        d_prime: prep.candidates.d_prime,
        d_dprime: prep.packs.d_dprime,
        d: diag.d,
        mode: prep.packs.mode,
        star_center: prep.packs.center,
        pruned_removed: prep.pruned.removed,
        pruned_limit: prep.pruned.removed_limit,
        a: a.clone(),
        b: split.b,
        s: split.s,
        t: split.t,
        z: split.z,
        branch: split.branch,
        separation: split.separation,
        q_family: fam,
        diagnostics: diag,
    };
    Ok((witness, family))
}

pub(crate) fn run_prepared(
    prep: &Prepared,
    l: u64,
    params: &ConstructionParams,
) -> std::result::Result<PipelineOutput, PipelineFailure> {
    let g = &prep.graph;
    let (lo, hi) = stages::l_range(g, params.c);
    if l < lo || l > hi {
        return Err(Error::param("l", format!("{l} outside [c*m, 2*c*m] = [{lo}, {hi}]")).into());
    }
    let p = stages::u_probability(g, l)?;
    let mut timings = prep.timings_ms.clone();
    let mut log = Vec::new();
    let tries = params.retries.max(1);
    for n in 0..tries {
        let s = u_seed(params.seed, l, n);
        match attempt(prep, l, p, s, n, params, &mut timings) {
            Ok((witness, family)) => {
                return Ok(PipelineOutput {
                    witness,
                    family,
                    log,
                    timings_ms: timings,
                })
            }
            Err(Error::StageFailed { stage, reason }) if stage.is_retryable() => {
                log::debug!("l = {l}, attempt {n}: {stage} failed: {reason}");
                log.push(AttemptRecord {
                    attempt: n,
                    u_seed: s,
                    stage,
                    reason,
                });
            }
            Err(e) => {
                let mut f = PipelineFailure::from(e);
                f.attempts = n + 1;
                f.log = log;
                return Err(f);
            }
        }
    }
    let last = log.last().expect("at least one attempt");
    Err(PipelineFailure {
        stage: last.stage,
        reason: format!("retries exhausted; last failure: {}", last.reason),
        attempts: tries,
        log,
    })
}

/// Runs every stage for one l, resampling U up to `params.retries` times
/// when a U-dependent stage fails.
pub fn run_pipeline(
    g: &BipartiteGraph,
    l: u64,
    params: &ConstructionParams,
) -> std::result::Result<PipelineOutput, PipelineFailure> {
    let prep = prepare(g, params)?;
    run_prepared(&prep, l, params)
}
