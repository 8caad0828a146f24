//! Executable form of the randomized construction that forces many distinct
//! induced-subgraph sizes.
//!
//! Outline, with X the smaller side and f = |X|:
//!
//! 1. bucket Y-pairs by degree sum and keep the fullest bucket (d′);
//! 2. drop pairs whose neighborhoods are nearly nested;
//! 3. turn the survivors into packs L (a star's leaves, or a matching);
//! 4. thin L to packs A with pairwise different multiset neighborhoods;
//! 5. sample U ⊆ X ∪ Y with probability p = √(4l/e(G)) and check the five
//!    claims about U and A;
//! 6. split the good packs into H and P, extract B ⊆ H and Z ⊆ P with
//!    distinct degrees into U, and derive a low-degree set S and a
//!    high-degree set T;
//! 7. form U_{k,i} = U ∪ (first k−i of S) ∪ (first i of T), thin the
//!    resulting sizes, and shift each by d_U(z) for z ∈ Z.
//!
//! Because S, T and Z lie in Y and G is bipartite, e(U ∪ Q) = e(U) +
//! Σ_{q ∈ Q} d_U(q) for every Q ⊆ Y; every size reported is nevertheless
//! recounted on the realized selection.

mod harness;
mod params;
mod pipeline;
mod stages;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use harness::{theorem_harness, HarnessReport};
pub use params::ConstructionParams;
pub use pipeline::{enumerate_sizes, run_pipeline, AttemptRecord, PipelineFailure, PipelineOutput, SizeFamily};
pub use stages::{
    build_candidate_pairs, build_q_family, diversify, l_range, prune_non_diverse_pairs, sample_u, split_and_order,
    star_or_matching, verify_claims, CandidatePairs, ClaimDiagnostics, Diversified, PackMode, Pruned, QFamily, Split,
    SplitBranch, StarOrMatching,
};

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parameters,
    CandidatePairs,
    Prune,
    StarOrMatching,
    Diversify,
    SampleU,
    Claims,
    Split,
    QFamily,
    Enumerate,
}

impl Stage {
    /// Stages whose failure depends on U and is worth a fresh sample.
    pub fn is_retryable(self) -> bool {
        matches!(self, Stage::Claims | Stage::Split | Stage::QFamily)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        write!(f, "{}", s.as_str().expect("unit variant"))
    }
}

/// Everything a successful run constructed. Pack indices refer to the
/// oriented graph (X the smaller side); `transposed` says whether the input
/// had to be flipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionWitness {
    pub transposed: bool,
    pub l: u64,
    pub p: f64,
    /// Seed of the U sample that succeeded.
    pub u_seed: u64,
    pub attempt: u32,
    pub u: crate::graph::Selection,
    pub d_prime: u64,
    pub d_dprime: i64,
    /// p·d″, the typical degree of a pack into U.
    pub d: f64,
    pub mode: PackMode,
    pub star_center: Option<usize>,
    pub pruned_removed: u64,
    pub pruned_limit: f64,
    pub a: Vec<crate::graph::VertexPack>,
    pub b: Vec<crate::graph::VertexPack>,
    pub s: Vec<crate::graph::VertexPack>,
    pub t: Vec<crate::graph::VertexPack>,
    pub z: Vec<crate::graph::VertexPack>,
    pub branch: SplitBranch,
    /// min_T d_U − max_S d_U.
    pub separation: i64,
    pub q_family: QFamily,
    pub diagnostics: ClaimDiagnostics,
}

impl ConstructionWitness {
    /// W = S ∪ T ∪ Z.
    pub fn w(&self) -> impl Iterator<Item = &crate::graph::VertexPack> {
        self.s.iter().chain(&self.t).chain(&self.z)
    }
}
