//! Induced-subgraph size spectra: the set 𝓜(G) of edge counts of induced
//! subgraphs and its cardinality Φ(G).
//!
//! Spectra include 0 (the empty induced subgraph). The classical convention
//! that leaves out the empty subgraph gives Φ − 1; reports carry both.
//!
//! The exact method orients the graph so X is the smaller side and, for each
//! S ⊆ X, forms the degree vector (|N(y) ∩ S|)_{y ∈ Y}. Choosing T ⊆ Y then
//! yields e(S ∪ T) = Σ_{y ∈ T} |N(y) ∩ S|, so the sizes reachable from S are
//! exactly the subset sums of that vector, computed with one shift-or per
//! Y-vertex over a bit-vector of width e(G) + 1.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Selection};
use crate::seed::{self, stream};
use crate::sizeset::SizeSet;

/// Default exact-spectrum budget: a 24-vertex smaller side against a
/// 1024-vertex larger side.
pub const DEFAULT_SPECTRUM_BUDGET: u64 = (1 << 24) * 1024;

/// Largest |X| + |Y| accepted by the brute-force oracle.
pub const ORACLE_MAX_VERTICES: usize = 22;

/// Number of random X-subsets whose full spectra the sampled method adds.
pub const SAMPLED_SUBSET_SPECTRA: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sizes: SizeSet,
    /// |sizes|, counting the empty induced subgraph.
    pub phi: u64,
    pub method: Method,
    /// Work units spent: subset-sum rows for the exact method, selections
    /// plus subset-sum rows for the sampled one.
    pub budget_used: u64,
}

impl SpectrumReport {
    fn new(sizes: SizeSet, method: Method, budget_used: u64) -> Self {
        SpectrumReport {
            phi: sizes.cardinality(),
            sizes,
            method,
            budget_used,
        }
    }

    /// Φ under the convention that leaves out the empty subgraph.
    pub fn phi_excluding_empty(&self) -> u64 {
        self.phi - u64::from(self.sizes.contains(0))
    }

    pub fn summary(&self, window: Option<u64>) -> SpectrumSummary {
        SpectrumSummary {
            phi: self.phi,
            phi_excluding_empty: self.phi_excluding_empty(),
            includes_empty_subgraph: self.sizes.contains(0),
            method: self.method,
            edge_count: self.sizes.max_value(),
            budget_used: self.budget_used,
            window_stats: window.and_then(|w| interval_coverage(&self.sizes, w).ok()),
        }
    }
}

/// JSON shape of a spectrum report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub phi: u64,
    pub phi_excluding_empty: u64,
    pub includes_empty_subgraph: bool,
    pub method: Method,
    pub edge_count: u64,
    pub budget_used: u64,
    pub window_stats: Option<Coverage>,
}

/// Cost of the exact method on `g` in work units.
pub fn exact_cost(g: &BipartiteGraph) -> u64 {
    let small = g.smaller_side() as u32;
    let large = g.x_size().max(g.y_size()) as u64;
    if small >= 63 {
        return u64::MAX;
    }
    (1u64 << small).saturating_mul(large.max(1))
}

/// Subset sums of `degrees`, capped at the width of `out`, OR-ed into `out`.
fn subset_sums_into(degrees: &[u32], scratch: &mut BitSet, out: &mut BitSet) {
    *scratch = BitSet::new(out.len());
    scratch.insert(0);
    for &d in degrees {
        if d > 0 {
            scratch.shift_or_assign(d as usize);
        }
    }
    out.union_with(scratch);
}

/// Exact 𝓜(G). Fails with [`Error::BudgetExceeded`] when 2^min(|X|,|Y|)·max(|X|,|Y|)
/// exceeds `budget`.
pub fn phi_exact(g: &BipartiteGraph, budget: u64) -> Result<SpectrumReport> {
    let cost = exact_cost(g);
    if cost > budget {
        return Err(Error::BudgetExceeded { needed: cost, budget });
    }
    let g = g.oriented();
    let e = g.edge_count();
    let s = g.x_size();
    let width = e as usize + 1;

    // Outer split over the top bits of S; each chunk walks the low bits in
    // Gray-code order and keeps a private result.
    let high_bits = s.min(8);
    let low_bits = s - high_bits;
    let cols = g.neighborhoods(crate::graph::Side::Y);
    let rows = g.neighborhoods(crate::graph::Side::X);

    let merged = (0u64..1 << high_bits)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = BitSet::new(width);
            let mut scratch = BitSet::new(width);
            let base = chunk << low_bits;
            let mut subset = BitSet::from_indices(s, (0..s).filter(|&i| (base >> i) & 1 == 1));
            let mut degrees: Vec<u32> = cols.iter().map(|c| c.count_and(&subset) as u32).collect();
            subset_sums_into(&degrees, &mut scratch, &mut acc);
            for step in 1u64..(1 << low_bits) {
                let flip = step.trailing_zeros() as usize;
                let adding = !subset.contains(flip);
                if adding {
                    subset.insert(flip);
                } else {
                    subset.remove(flip);
                }
                for y in rows[flip].iter_ones() {
                    if adding {
                        degrees[y] += 1;
                    } else {
                        degrees[y] -= 1;
                    }
                }
                subset_sums_into(&degrees, &mut scratch, &mut acc);
            }
            acc
        })
        .reduce(
            || BitSet::new(width),
            |mut a, b| {
                a.union_with(&b);
                a
            },
        );
    Ok(SpectrumReport::new(SizeSet::from_bits(merged), Method::Exact, cost))
}

/// Brute force over all 2^(|X|+|Y|) selections. Independent of the subset-sum
/// route; used to cross-check [`phi_exact`].
pub fn phi_exact_oracle(g: &BipartiteGraph) -> Result<SpectrumReport> {
    let (nx, ny) = (g.x_size(), g.y_size());
    if nx + ny > ORACLE_MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "oracle vertex count",
            requested: (nx + ny) as u64,
            limit: ORACLE_MAX_VERTICES as u64,
        });
    }
    let rows: Vec<u64> = (0..nx).map(|x| g.row(x).to_u64()).collect();
    let mut sizes = SizeSet::new(g.edge_count());
    for xs in 0u64..1 << nx {
        for ys in 0u64..1 << ny {
            let mut e = 0u64;
            for (x, row) in rows.iter().enumerate() {
                if (xs >> x) & 1 == 1 {
                    e += (row & ys).count_ones() as u64;
                }
            }
            sizes.insert(e);
        }
    }
    Ok(SpectrumReport::new(sizes, Method::Exact, 1 << (nx + ny)))
}

/// Lower-bound spectrum: `trials` uniformly random selections plus the full
/// spectra of [`SAMPLED_SUBSET_SPECTRA`] random X-subsets. Never exact.
pub fn phi_sampled(g: &BipartiteGraph, trials: u64, seed: u64) -> SpectrumReport {
    let e = g.edge_count();
    if trials == 0 {
        log::warn!("phi_sampled called with zero trials; returning {{0}}");
        return SpectrumReport::new(SizeSet::with_zero(e), Method::Sampled, 0);
    }
    let g = g.oriented();
    let mut sizes = SizeSet::with_zero(e);
    sizes.insert(e);
    let mut rng = seed::rng(seed::sub_seed(seed, stream::SELECTION, 0));
    for _ in 0..trials {
        let sel = Selection {
            x_mask: BitSet::from_indices(g.x_size(), (0..g.x_size()).filter(|_| rng.random::<bool>())),
            y_mask: BitSet::from_indices(g.y_size(), (0..g.y_size()).filter(|_| rng.random::<bool>())),
        };
        sizes.insert(g.induced_edge_count(&sel).expect("selection built for g"));
    }
    let cols = g.neighborhoods(crate::graph::Side::Y);
    let width = e as usize + 1;
    let mut scratch = BitSet::new(width);
    for _ in 0..SAMPLED_SUBSET_SPECTRA {
        let subset = BitSet::from_indices(g.x_size(), (0..g.x_size()).filter(|_| rng.random::<bool>()));
        let degrees: Vec<u32> = cols.iter().map(|c| c.count_and(&subset) as u32).collect();
        subset_sums_into(&degrees, &mut scratch, sizes.bits_mut());
    }
    let used = trials + (SAMPLED_SUBSET_SPECTRA * g.y_size()) as u64;
    SpectrumReport::new(sizes, Method::Sampled, used)
}

/// Distinct sizes per window of consecutive integers over `[0, max_value]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub window: u64,
    /// (window start, distinct sizes in `[start, start + window)`).
    pub windows: Vec<(u64, u64)>,
    pub min_count: u64,
}

pub fn interval_coverage(sizes: &SizeSet, window: u64) -> Result<Coverage> {
    if window == 0 {
        return Err(Error::param("window", "must be >= 1"));
    }
    let n_windows = sizes.max_value() / window + 1;
    let mut counts = vec![0u64; n_windows as usize];
    for v in sizes.iter() {
        counts[(v / window) as usize] += 1;
    }
    let windows: Vec<(u64, u64)> = counts.iter().enumerate().map(|(i, &c)| (i as u64 * window, c)).collect();
    let min_count = counts.iter().copied().min().unwrap_or(0);
    Ok(Coverage {
        window,
        windows,
        min_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{multiplication_table, phi_complete_bipartite};

    #[test]
    fn trivial_spectra() {
        let g = BipartiteGraph::empty(3, 4);
        let r = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap();
        assert_eq!((r.sizes.to_vec(), r.phi), (vec![0], 1));
        let r = phi_exact(&BipartiteGraph::complete(1, 1), DEFAULT_SPECTRUM_BUDGET).unwrap();
        assert_eq!(r.sizes.to_vec(), vec![0, 1]);
        assert_eq!(r.phi_excluding_empty(), 1);
    }

    #[test]
    fn k22_matches_table() {
        let r = phi_exact(&BipartiteGraph::complete(2, 2), DEFAULT_SPECTRUM_BUDGET).unwrap();
        assert_eq!(r.sizes.to_vec(), vec![0, 1, 2, 4]);
        assert_eq!(r.sizes, multiplication_table(2).unwrap());
        let o = phi_exact_oracle(&BipartiteGraph::complete(2, 2)).unwrap();
        assert_eq!(o.sizes, r.sizes);
    }

    #[test]
    fn oracle_examples() {
        let r = phi_exact_oracle(&BipartiteGraph::complete(2, 3)).unwrap();
        assert_eq!(r.sizes.to_vec(), vec![0, 1, 2, 3, 4, 6]);
        assert_eq!(r.phi, 6);
        let r = phi_exact_oracle(&BipartiteGraph::empty(1, 0)).unwrap();
        assert_eq!(r.sizes.to_vec(), vec![0]);
        assert!(phi_exact_oracle(&BipartiteGraph::empty(12, 11)).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let g = BipartiteGraph::empty(30, 30);
        match phi_exact(&g, DEFAULT_SPECTRUM_BUDGET) {
            Err(Error::BudgetExceeded { needed, .. }) => assert_eq!(needed, (1 << 30) * 30),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_agrees_with_oracle_on_random_graphs() {
        for seed in 0..120u64 {
            let nx = 1 + (seed % 7) as usize;
            let ny = 1 + (seed / 7 % 8) as usize;
            let p = [0.2, 0.5, 0.8][(seed % 3) as usize];
            let g = BipartiteGraph::random(nx, ny, p, seed).unwrap();
            let a = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap();
            let b = phi_exact_oracle(&g).unwrap();
            assert_eq!(a.sizes, b.sizes, "seed {seed}");
        }
    }

    #[test]
    fn complete_bipartite_spectra() {
        for a in 0..=6u64 {
            for b in 0..=6u64 {
                let r = phi_exact(&BipartiteGraph::complete(a as usize, b as usize), DEFAULT_SPECTRUM_BUDGET).unwrap();
                assert_eq!(r.phi, phi_complete_bipartite(a, b).unwrap());
            }
        }
    }

    #[test]
    fn invariant_under_transpose_and_relabel() {
        for seed in 0..30u64 {
            let g = BipartiteGraph::random(5, 9, 0.45, seed).unwrap();
            let a = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap();
            assert_eq!(phi_exact(&g.transpose(), DEFAULT_SPECTRUM_BUDGET).unwrap().sizes, a.sizes);
            let relabeled = BipartiteGraph::from_fn(5, 9, |x, y| g.has_edge(4 - x, (y + 3) % 9));
            assert_eq!(phi_exact(&relabeled, DEFAULT_SPECTRUM_BUDGET).unwrap().sizes, a.sizes);
            assert!(a.sizes.contains(0) && a.sizes.contains(g.edge_count()));
            assert!(a.phi <= g.edge_count() + 1 && a.phi <= g.cells() + 1);
        }
    }

    #[test]
    fn isolated_vertex_leaves_spectrum_unchanged() {
        let g = BipartiteGraph::random(4, 6, 0.5, 11).unwrap();
        let padded = BipartiteGraph::from_fn(5, 6, |x, y| x < 4 && g.has_edge(x, y));
        assert_eq!(
            phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap().sizes,
            phi_exact(&padded, DEFAULT_SPECTRUM_BUDGET).unwrap().sizes
        );
    }

    #[test]
    fn sampled_is_dominated_and_deterministic() {
        for seed in 0..20u64 {
            let g = BipartiteGraph::random(6, 10, 0.5, seed).unwrap();
            let exact = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap();
            let s1 = phi_sampled(&g, 200, seed);
            assert_eq!(s1.method, Method::Sampled);
            assert!(s1.sizes.is_subset(&exact.sizes));
            assert!(s1.phi <= exact.phi);
            assert_eq!(s1, phi_sampled(&g, 200, seed));
        }
        let g = BipartiteGraph::complete(3, 3);
        assert_eq!(phi_sampled(&g, 0, 1).sizes.to_vec(), vec![0]);
    }

    #[test]
    fn coverage_examples() {
        let s = SizeSet::from_values(9, [0, 3, 5, 9]);
        let c = interval_coverage(&s, 5).unwrap();
        assert_eq!(c.windows, vec![(0, 2), (5, 2)]);
        assert_eq!(c.min_count, 2);
        let full = SizeSet::from_values(11, 0..=11);
        let c = interval_coverage(&full, 5).unwrap();
        assert_eq!(c.windows, vec![(0, 5), (5, 5), (10, 2)]);
        assert!(interval_coverage(&full, 0).is_err());
    }

    #[test]
    fn coverage_of_table_matches_direct_count() {
        let m = multiplication_table(100).unwrap();
        let c = interval_coverage(&m, 1000).unwrap();
        assert_eq!(c.windows.len(), 11);
        for &(start, count) in &c.windows {
            let direct = (start..(start + 1000).min(10_001)).filter(|&v| m.contains(v)).count() as u64;
            assert_eq!(count, direct);
        }
        assert_eq!(c.windows.iter().map(|w| w.1).sum::<u64>(), m.cardinality());
    }
}
