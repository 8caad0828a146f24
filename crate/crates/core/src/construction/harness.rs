use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{prepare, run_prepared, PipelineFailure};
use super::stages::{f_of, l_range};
use super::{ConstructionParams, Stage};
use crate::graph::BipartiteGraph;
use crate::sizeset::SizeSet;
use crate::spectrum::{interval_coverage, Coverage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub l_values: Vec<u64>,
    pub l_step: u64,
    pub successes: u64,
    /// (l, failing stage, reason).
    pub failures: Vec<(u64, Stage, String)>,
    /// (l, distinct sizes of that run).
    pub per_run: Vec<(u64, u64)>,
    pub union: SizeSet,
    pub distinct_count: u64,
    pub max_single: u64,
    /// Window ⌈m/√f⌉ used for the coverage profile.
    pub window: u64,
    pub coverage: Coverage,
}

/// Runs the pipeline over a spread of l in [c·m, 2c·m] and unions the sizes.
/// Runs are spaced by a quarter of the first run's size span, since e(U) ≈ 4l.
pub fn theorem_harness(g: &BipartiteGraph, params: &ConstructionParams) -> Result<HarnessReport, PipelineFailure> {
    let prep = prepare(g, params)?;
    let graph = &prep.graph;
    let (lo, hi) = l_range(graph, params.c);
    if lo > hi || lo == 0 {
        return Err(crate::error::Error::param("c", format!("empty l range [{lo}, {hi}]")).into());
    }
    let first = run_prepared(&prep, lo, params);
    let span = first
        .as_ref()
        .ok()
        .and_then(|o| {
            let v = o.family.final_sizes.to_vec();
            Some(v.last()? - v.first()?)
        })
        .unwrap_or(0);
    let step = span.div_ceil(4).max(1);
    let l_values: Vec<u64> = (lo..=hi).step_by(step as usize).collect();
    let mut runs = vec![(lo, first)];
    runs.extend(l_values[1..].par_iter().map(|&l| (l, run_prepared(&prep, l, params))).collect::<Vec<_>>());

    let mut union = SizeSet::new(graph.edge_count());
    let mut failures = Vec::new();
    let mut per_run = Vec::new();
    for (l, r) in runs {
        match r {
            Ok(out) => {
                union.union_with(&out.family.final_sizes);
                per_run.push((l, out.family.distinct_count));
            }
            Err(f) => failures.push((l, f.stage, f.reason)),
        }
    }
    let m = graph.cells() as f64;
    let window = ((m / f_of(graph).sqrt()).ceil() as u64).max(1);
    let coverage = interval_coverage(&union, window).expect("window >= 1");
    Ok(HarnessReport {
        successes: per_run.len() as u64,
        max_single: per_run.iter().map(|r| r.1).max().unwrap_or(0),
        distinct_count: union.cardinality(),
        l_values,
        l_step: step,
        failures,
        per_run,
        union,
        window,
        coverage,
    })
}
