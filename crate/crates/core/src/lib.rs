//! Induced-subgraph size spectra of bipartite graphs, bipartite Ramsey
//! properties, the multiplication-table machinery behind them, and an
//! executable version of the probabilistic construction that forces many
//! distinct induced sizes.

pub mod bitset;
pub mod construction;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod numtheory;
pub mod ramsey;
pub mod seed;
pub mod sizeset;
pub mod spectrum;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, Selection, Side, VertexId, VertexPack};
pub use sizeset::SizeSet;
pub use spectrum::{interval_coverage, phi_exact, phi_exact_oracle, phi_sampled, Coverage, Method, SpectrumReport};
pub use construction::{run_pipeline, theorem_harness, ConstructionParams, ConstructionWitness, Stage};
pub use ramsey::{
    diversity_check, find_induced_biclique, is_c_bipartite_ramsey, richness_check_exact, richness_check_sampled,
    BicliqueKind, BicliqueSearch, BicliqueWitness, DiversityReport, RamseyVerdict, RichnessReport,
};
