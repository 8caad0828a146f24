//! Induced biclique search, the C-Bipartite-Ramsey verdict, and the
//! quasi-randomness checkers (diversity, pair diversity, richness) together
//! with the implications that tie richness to diversity.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, VertexPack};
use crate::seed::{self, stream};

/// Default node budget for biclique branch-and-bound.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Default number of (pack, pack) comparisons the pair-diversity checker
/// performs per side before switching to sampling.
pub const DEFAULT_PAIR_BUDGET: u64 = 1 << 26;

/// Largest side the exact richness checker enumerates.
pub const RICHNESS_EXACT_MAX_SIDE: usize = 20;

/// Slack for `ceil(γ·n)` so that e.g. 0.3·10 counts as 3, not 4.
const CEIL_EPS: f64 = 1e-9;

fn ceil_frac(v: f64) -> u64 {
    (v - CEIL_EPS).ceil().max(0.0) as u64
}

// ---------------------------------------------------------------------------
// Bicliques

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BicliqueKind {
    /// Induced K_{a,b}.
    Complete,
    /// Induced bipartite complement of K_{a,b}: no edges at all.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueWitness {
    pub x_set: Vec<usize>,
    pub y_set: Vec<usize>,
    pub kind: BicliqueKind,
}

impl BicliqueWitness {
    /// True when the witness is non-empty and induces the claimed pattern.
    pub fn verify(&self, g: &BipartiteGraph) -> bool {
        !self.x_set.is_empty()
            && !self.y_set.is_empty()
            && self.x_set.iter().all(|&x| x < g.x_size())
            && self.y_set.iter().all(|&y| y < g.y_size())
            && self.x_set.iter().all(|&x| {
                self.y_set
                    .iter()
                    .all(|&y| g.has_edge(x, y) == (self.kind == BicliqueKind::Complete))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BicliqueSearch {
    Found { witness: BicliqueWitness },
    /// Exhaustive search proved there is none.
    NotFound,
    /// Node budget ran out before either outcome was established.
    Unknown { nodes: u64 },
}

impl BicliqueSearch {
    pub fn witness(&self) -> Option<&BicliqueWitness> {
        match self {
            BicliqueSearch::Found { witness } => Some(witness),
            _ => None,
        }
    }
}

struct Search {
    rows: Vec<BitSet>,
    order: Vec<usize>,
    a: usize,
    b: usize,
    nodes: u64,
    budget: u64,
    chosen: Vec<usize>,
    found: Option<(Vec<usize>, BitSet)>,
}

impl Search {
    /// Returns false when the budget is exhausted.
    fn go(&mut self, start: usize, common: &BitSet) -> bool {
        if self.chosen.len() == self.a {
            self.found = Some((self.chosen.clone(), common.clone()));
            return true;
        }
        let need = self.a - self.chosen.len();
        for pos in start..self.order.len() {
            if self.order.len() - pos < need {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            let x = self.order[pos];
            let next = common.and(&self.rows[x]);
            if next.count_ones() < self.b {
                continue;
            }
            self.chosen.push(x);
            let ok = self.go(pos + 1, &next);
            self.chosen.pop();
            if !ok || self.found.is_some() {
                return ok;
            }
        }
        true
    }
}

/// Searches for an induced K_{a,b} (or its complement) with `a` vertices in X
/// and at least `b` in Y.
pub fn find_induced_biclique(
    g: &BipartiteGraph,
    a: usize,
    b: usize,
    kind: BicliqueKind,
    node_budget: u64,
) -> Result<BicliqueSearch> {
    if a == 0 || b == 0 {
        return Err(Error::param("a, b", "biclique sides must be >= 1"));
    }
    if a > g.x_size() || b > g.y_size() {
        return Ok(BicliqueSearch::NotFound);
    }
    // Rows are the neighborhoods (complete) or non-neighborhoods (empty).
    let rows: Vec<BitSet> = (0..g.x_size())
        .map(|x| match kind {
            BicliqueKind::Complete => g.row(x).clone(),
            BicliqueKind::Empty => g.row(x).complement(),
        })
        .collect();
    let mut order: Vec<usize> = (0..g.x_size()).filter(|&x| rows[x].count_ones() >= b).collect();
    // Most useful rows first; ties to the lowest index.
    order.sort_by_key(|&x| (std::cmp::Reverse(rows[x].count_ones()), x));
    let mut s = Search {
        rows,
        order,
        a,
        b,
        nodes: 0,
        budget: node_budget,
        chosen: Vec::with_capacity(a),
        found: None,
    };
    let all = BitSet::full(g.y_size());
    let completed = s.go(0, &all);
    Ok(match s.found {
        Some((mut xs, common)) => {
            xs.sort_unstable();
            BicliqueSearch::Found {
                witness: BicliqueWitness {
                    x_set: xs,
                    y_set: common.iter_ones().collect(),
                    kind,
                },
            }
        }
        None if completed => BicliqueSearch::NotFound,
        None => BicliqueSearch::Unknown { nodes: s.nodes },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyVerdict {
    #[serde(rename = "C")]
    pub c: f64,
    /// max(1, ⌈C·ln|X|⌉), clamped to |X|.
    pub a_threshold: usize,
    /// max(1, ⌈C·ln|Y|⌉), clamped to |Y|.
    pub b_threshold: usize,
    /// True when a raw threshold exceeded its side and was clamped.
    pub thresholds_clamped: bool,
    pub is_ramsey: bool,
    pub witness: Option<BicliqueWitness>,
    /// False when a search ran out of budget; `is_ramsey` is then a
    /// "no witness found" verdict.
    pub search_exhaustive: bool,
    pub log_base: String,
}

fn log_threshold(c: f64, side: usize) -> (usize, bool) {
    let raw = ((c * (side.max(1) as f64).ln()).ceil() as usize).max(1);
    (raw.min(side), raw > side)
}

/// Decides the C-Bipartite-Ramsey property with natural-log thresholds.
pub fn is_c_bipartite_ramsey(g: &BipartiteGraph, c: f64, node_budget: u64) -> Result<RamseyVerdict> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::param("C", "must be a positive real"));
    }
    if g.x_size() == 0 || g.y_size() == 0 {
        return Err(Error::EmptySide);
    }
    let (a, ca) = log_threshold(c, g.x_size());
    let (b, cb) = log_threshold(c, g.y_size());
    let mut exhaustive = true;
    let mut witness = None;
    for kind in [BicliqueKind::Complete, BicliqueKind::Empty] {
        match find_induced_biclique(g, a, b, kind, node_budget)? {
            BicliqueSearch::Found { witness: w } => {
                witness = Some(w);
                break;
            }
            BicliqueSearch::NotFound => {}
            BicliqueSearch::Unknown { .. } => exhaustive = false,
        }
    }
    Ok(RamseyVerdict {
        c,
        a_threshold: a,
        b_threshold: b,
        thresholds_clamped: ca || cb,
        is_ramsey: witness.is_none(),
        search_exhaustive: exhaustive || witness.is_some(),
        witness,
        log_base: "e".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueBound {
    pub value: usize,
    /// False when some probe ran out of budget; `value` is then a lower bound.
    pub exact: bool,
}

/// Largest `a` with an induced K_{a,a} (or its complement), by binary search.
pub fn max_balanced_biclique(g: &BipartiteGraph, kind: BicliqueKind, node_budget: u64) -> BicliqueBound {
    let (mut lo, mut hi) = (0usize, g.x_size().min(g.y_size()));
    let mut exact = true;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match find_induced_biclique(g, mid, mid, kind, node_budget).expect("mid >= 1") {
            BicliqueSearch::Found { .. } => lo = mid,
            BicliqueSearch::NotFound => hi = mid - 1,
            BicliqueSearch::Unknown { .. } => {
                exact = false;
                hi = mid - 1;
            }
        }
    }
    BicliqueBound { value: lo, exact }
}

// ---------------------------------------------------------------------------
// Diversity

/// One side of a diversity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideDiversity {
    pub side: Side,
    /// Filter coefficient (pair diversity only).
    pub alpha: Option<f64>,
    /// Symmetric-difference coefficient (c, or ε for pairs).
    pub coefficient: f64,
    pub delta: f64,
    pub max_bad_count: u64,
    /// |side|^δ.
    pub threshold: f64,
    pub passes: bool,
    pub worst_offender: Option<VertexPack>,
    /// Packs that were audited (all vertices, or all filtered pairs).
    pub audited: u64,
    /// Pair diversity only: the largest pairwise-disjoint family among the
    /// close pairs of the worst pack, and whether it was computed exactly.
    pub max_disjoint_family: Option<u64>,
    pub family_exact: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub x: SideDiversity,
    pub y: SideDiversity,
    pub passes: bool,
    pub sampled: bool,
    /// How the "other pairs" of pair diversity are counted.
    pub pair_reading: Option<String>,
}

fn side_threshold(n: usize, delta: f64) -> f64 {
    (n as f64).powf(delta)
}

fn vertex_diversity_side(g: &BipartiteGraph, side: Side, c: f64, delta: f64) -> SideDiversity {
    let nbrs = g.neighborhoods(side);
    let limit = c * g.side_size(side.opposite()) as f64;
    let counts: Vec<u64> = (0..nbrs.len())
        .into_par_iter()
        .map(|v1| {
            (0..nbrs.len())
                .filter(|&v2| v2 != v1 && (nbrs[v1].count_xor(&nbrs[v2]) as f64) < limit)
                .count() as u64
        })
        .collect();
    let (worst, max) = argmax(&counts);
    let threshold = side_threshold(nbrs.len(), delta);
    SideDiversity {
        side,
        alpha: None,
        coefficient: c,
        delta,
        max_bad_count: max,
        threshold,
        passes: max as f64 <= threshold,
        worst_offender: worst.map(|v| VertexPack::single(side, v)),
        audited: nbrs.len() as u64,
        max_disjoint_family: None,
        family_exact: None,
    }
}

/// Largest count, lowest index on ties.
fn argmax(counts: &[u64]) -> (Option<usize>, u64) {
    let mut best: (Option<usize>, u64) = (None, 0);
    for (i, &c) in counts.iter().enumerate() {
        if best.0.is_none() || c > best.1 {
            best = (Some(i), c);
        }
    }
    best
}

/// Vertex diversity: for each vertex, the number of other same-side vertices
/// whose neighborhoods differ in fewer than c·|opposite side| places.
pub fn diversity_check(g: &BipartiteGraph, c: f64, delta: f64) -> Result<DiversityReport> {
    if !(c > 0.0 && c <= 2.0) {
        return Err(Error::param("c", "must lie in (0, 2]"));
    }
    if !(delta > 0.0) {
        return Err(Error::param("delta", "must be positive"));
    }
    let x = vertex_diversity_side(g, Side::X, c, delta);
    let y = vertex_diversity_side(g, Side::Y, c, delta);
    Ok(DiversityReport {
        passes: x.passes && y.passes,
        x,
        y,
        sampled: false,
        pair_reading: None,
    })
}

/// Size of a maximum matching of a small graph given by its edge list.
/// Exact when at most `EXACT_MATCHING_VERTICES` vertices are involved,
/// greedy (a lower bound) beyond that.
const EXACT_MATCHING_VERTICES: usize = 24;

fn max_matching(edges: &[(usize, usize)]) -> (u64, bool) {
    let mut verts: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() > EXACT_MATCHING_VERTICES {
        let mut used = std::collections::HashSet::new();
        let mut size = 0;
        for &(a, b) in edges {
            if !used.contains(&a) && !used.contains(&b) {
                used.insert(a);
                used.insert(b);
                size += 1;
            }
        }
        return (size, false);
    }
    let pos = |v: usize| verts.binary_search(&v).expect("vertex listed");
    let mut adj = vec![0u32; verts.len()];
    for &(a, b) in edges {
        let (i, j) = (pos(a), pos(b));
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    fn best(avail: u32, adj: &[u32], memo: &mut HashMap<u32, u64>) -> u64 {
        if avail == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&avail) {
            return v;
        }
        let v = avail.trailing_zeros() as usize;
        let rest = avail & !(1 << v);
        let mut out = best(rest, adj, memo);
        let mut partners = adj[v] & rest;
        while partners != 0 {
            let u = partners.trailing_zeros();
            partners &= partners - 1;
            out = out.max(1 + best(rest & !(1 << u), adj, memo));
        }
        memo.insert(avail, out);
        out
    }
    let all = if verts.len() == 32 { u32::MAX } else { (1u32 << verts.len()) - 1 };
    (best(all, &adj, &mut HashMap::new()), true)
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn pair_diversity_side(
    g: &BipartiteGraph,
    side: Side,
    alpha: f64,
    delta: f64,
    eps: f64,
    pair_budget: u64,
    seed: u64,
) -> (SideDiversity, bool) {
    let nbrs = g.neighborhoods(side);
    let n = nbrs.len();
    let other = g.side_size(side.opposite());
    let pairs = pair_index(n);
    let hoods: Vec<(BitSet, BitSet)> = pairs
        .iter()
        .map(|&(a, b)| (nbrs[a].or(&nbrs[b]), nbrs[a].and(&nbrs[b])))
        .collect();
    // |N(v1) △ (comp N(v2))| = |opposite| − |N(v1) △ N(v2)|.
    let filtered: Vec<usize> = (0..pairs.len())
        .filter(|&p| {
            let (a, b) = pairs[p];
            (other - nbrs[a].count_xor(&nbrs[b])) as f64 >= alpha * other as f64
        })
        .collect();
    let cost = (filtered.len() as u64).saturating_mul(pairs.len() as u64);
    let sampled = cost > pair_budget;
    let audited: Vec<usize> = if sampled {
        let keep = (pair_budget / pairs.len().max(1) as u64).max(1) as usize;
        let mut rng = seed::rng(seed::sub_seed(seed, stream::PAIRS, side as u64));
        let mut pick: Vec<usize> = rand::seq::index::sample(&mut rng, filtered.len(), keep.min(filtered.len()))
            .into_iter()
            .map(|i| filtered[i])
            .collect();
        pick.sort_unstable();
        pick
    } else {
        filtered
    };
    let limit = eps * other as f64;
    let results: Vec<(u64, Vec<(usize, usize)>)> = audited
        .par_iter()
        .map(|&p| {
            let (a, b) = pairs[p];
            let close: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|&q| {
                    let (c, d) = pairs[q];
                    c != a && c != b && d != a && d != b
                        && (crate::graph::multiset_symdiff(&hoods[p], &hoods[q], None) as f64) < limit
                })
                .map(|q| pairs[q])
                .collect();
            (close.len() as u64, close)
        })
        .collect();
    let counts: Vec<u64> = results.iter().map(|r| r.0).collect();
    let (worst, max) = argmax(&counts);
    let (family, family_exact) = results
        .iter()
        .map(|r| max_matching(&r.1))
        .fold((0u64, true), |acc, (f, e)| (acc.0.max(f), acc.1 && e));
    let threshold = side_threshold(n, delta);
    let report = SideDiversity {
        side,
        alpha: Some(alpha),
        coefficient: eps,
        delta,
        max_bad_count: max,
        threshold,
        passes: max as f64 <= threshold,
        worst_offender: worst.map(|i| {
            let (a, b) = pairs[audited[i]];
            VertexPack::pair(side, a, b).expect("distinct pair")
        }),
        audited: audited.len() as u64,
        max_disjoint_family: Some(family),
        family_exact: Some(family_exact),
    };
    (report, sampled)
}

/// Pair diversity: for every pair passing the α-filter
/// |N(v1) △ (comp N(v2))| ≥ α·|opposite|, count the pairs vertex-disjoint from
/// it whose multiset neighborhoods differ in fewer than ε·|opposite| places.
/// Also reports the largest pairwise-disjoint family of such pairs.
pub fn pair_diversity_check(
    g: &BipartiteGraph,
    alpha: f64,
    delta: f64,
    eps: f64,
    pair_budget: u64,
    seed: u64,
) -> Result<DiversityReport> {
    for (name, v) in [("alpha", alpha), ("delta", delta), ("eps", eps)] {
        if !(v > 0.0 && v < 2.0) {
            return Err(Error::param(name, "must lie in (0, 2)"));
        }
    }
    let (x, sx) = pair_diversity_side(g, Side::X, alpha, delta, eps, pair_budget, seed);
    let (y, sy) = pair_diversity_side(g, Side::Y, alpha, delta, eps, pair_budget, seed);
    Ok(DiversityReport {
        passes: x.passes && y.passes,
        x,
        y,
        sampled: sx || sy,
        pair_reading: Some("pairs vertex-disjoint from the filtered pair".into()),
    })
}

// ---------------------------------------------------------------------------
// Richness

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    Exact,
    Sampled,
}

/// Richness audit with W drawn from `ground`, counting bad vertices on the
/// opposite side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideRichness {
    pub ground: Side,
    /// Number of W audited.
    pub audited: u64,
    pub max_bad_vertices: u64,
    /// |opposite side|^δ.
    pub threshold: f64,
    pub worst_w: Option<Vec<usize>>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichnessReport {
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub mode: AuditMode,
    pub x: SideRichness,
    pub y: SideRichness,
    pub passes: bool,
}

fn check_richness_params(gamma: f64, delta: f64, eps: f64) -> Result<()> {
    for (name, v) in [("gamma", gamma), ("delta", delta), ("eps", eps)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, "must be a positive real"));
        }
    }
    Ok(())
}

/// Number of opposite-side vertices v with |N(v) ∩ W| < ε·|ground| or
/// |comp N(v) ∩ W| < ε·|ground|.
fn bad_count(cols: &[BitSet], w: &BitSet, limit: f64) -> u64 {
    let size = w.count_ones();
    cols.iter()
        .filter(|c| {
            let hit = c.count_and(w);
            (hit as f64) < limit || ((size - hit) as f64) < limit
        })
        .count() as u64
}

fn richness_exact_side(g: &BipartiteGraph, ground: Side, gamma: f64, delta: f64, eps: f64) -> SideRichness {
    let n = g.side_size(ground);
    let cols = g.neighborhoods(ground.opposite());
    let threshold = side_threshold(cols.len(), delta);
    let k = ceil_frac(gamma * n as f64);
    let limit = eps * n as f64;
    if k as usize > n {
        return SideRichness {
            ground,
            audited: 0,
            max_bad_vertices: 0,
            threshold,
            worst_w: None,
            passes: true,
        };
    }
    // The bad set only grows when W shrinks, so minimum-size W suffice.
    let k = (k as usize).max(1).min(n);
    let cols_u: Vec<u32> = cols.iter().map(|c| c.to_u64() as u32).collect();
    let limit_cmp = |v: u32| (v as f64) < limit;
    let mut best: (u64, u32) = (0, 0);
    let mut audited = 0u64;
    let mut w: u32 = (1u32 << k) - 1;
    let end: u64 = 1u64 << n;
    while (w as u64) < end {
        audited += 1;
        let bad = cols_u
            .iter()
            .filter(|&&c| limit_cmp((c & w).count_ones()) || limit_cmp((!c & w).count_ones()))
            .count() as u64;
        if audited == 1 || bad > best.0 {
            best = (bad, w);
        }
        // Gosper's hack: next mask with the same popcount.
        let c = w & w.wrapping_neg();
        let r = w as u64 + c as u64;
        if r >= end {
            break;
        }
        let r = r as u32;
        w = (((r ^ w) >> 2) / c) | r;
    }
    SideRichness {
        ground,
        audited,
        max_bad_vertices: best.0,
        threshold,
        worst_w: Some((0..n).filter(|&i| (best.1 >> i) & 1 == 1).collect()),
        passes: best.0 as f64 <= threshold,
    }
}

/// Exact richness: every W of at least ⌈γ|ground|⌉ vertices, both sides.
/// Bad vertices compare against ε·|ground side|, as in the definition.
pub fn richness_check_exact(g: &BipartiteGraph, gamma: f64, delta: f64, eps: f64) -> Result<RichnessReport> {
    check_richness_params(gamma, delta, eps)?;
    let big = g.x_size().max(g.y_size());
    if big > RICHNESS_EXACT_MAX_SIDE {
        return Err(Error::TooLarge {
            what: "exact richness side (use the sampled auditor)",
            requested: big as u64,
            limit: RICHNESS_EXACT_MAX_SIDE as u64,
        });
    }
    let x = richness_exact_side(g, Side::X, gamma, delta, eps);
    let y = richness_exact_side(g, Side::Y, gamma, delta, eps);
    Ok(RichnessReport {
        gamma,
        delta,
        eps,
        mode: AuditMode::Exact,
        passes: x.passes && y.passes,
        x,
        y,
    })
}

fn richness_sampled_side(
    g: &BipartiteGraph,
    ground: Side,
    gamma: f64,
    delta: f64,
    eps: f64,
    trials: u64,
    seed: u64,
) -> SideRichness {
    let n = g.side_size(ground);
    let cols = g.neighborhoods(ground.opposite());
    let threshold = side_threshold(cols.len(), delta);
    let k = ceil_frac(gamma * n as f64).max(1) as usize;
    if k > n {
        return SideRichness {
            ground,
            audited: 0,
            max_bad_vertices: 0,
            threshold,
            worst_w: None,
            passes: true,
        };
    }
    // Uniform over all qualifying W: size s with weight C(n, s).
    let ln_binom = |s: usize| ln_gamma(n as f64 + 1.0) - ln_gamma(s as f64 + 1.0) - ln_gamma((n - s) as f64 + 1.0);
    let top = (k..=n).map(ln_binom).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = (k..=n).map(|s| (ln_binom(s) - top).exp()).collect();
    let sizes = WeightedIndex::new(&weights).expect("weights positive");
    let mut rng = seed::rng(seed::sub_seed(seed, stream::RICHNESS, ground as u64));
    let limit = eps * n as f64;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for _ in 0..trials {
        let s = k + sizes.sample(&mut rng);
        let mut members = rand::seq::index::sample(&mut rng, n, s).into_vec();
        members.sort_unstable();
        let w = BitSet::from_indices(n, members.iter().copied());
        let bad = bad_count(cols, &w, limit);
        if best.as_ref().is_none_or(|b| bad > b.0) {
            best = Some((bad, members));
        }
    }
    let (max_bad, worst) = best.map_or((0, None), |(b, w)| (b, Some(w)));
    SideRichness {
        ground,
        audited: trials,
        max_bad_vertices: max_bad,
        threshold,
        worst_w: worst,
        passes: max_bad as f64 <= threshold,
    }
}

/// Sampled richness audit: `trials` uniformly random qualifying W per side.
/// A failure is a certified counterexample; a pass only means none was found.
pub fn richness_check_sampled(
    g: &BipartiteGraph,
    gamma: f64,
    delta: f64,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<RichnessReport> {
    check_richness_params(gamma, delta, eps)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let x = richness_sampled_side(g, Side::X, gamma, delta, eps, trials, seed);
    let y = richness_sampled_side(g, Side::Y, gamma, delta, eps, trials, seed);
    Ok(RichnessReport {
        gamma,
        delta,
        eps,
        mode: AuditMode::Sampled,
        passes: x.passes && y.passes,
        x,
        y,
    })
}

/// Bad-vertex count of one explicit W, for replaying sampled counterexamples.
pub fn richness_bad_count(g: &BipartiteGraph, ground: Side, w: &[usize], eps: f64) -> u64 {
    let n = g.side_size(ground);
    let set = BitSet::from_indices(n, w.iter().copied());
    bad_count(g.neighborhoods(ground.opposite()), &set, eps * n as f64)
}

// ---------------------------------------------------------------------------
// Richness implications

/// Unordered pairs {v1, v2} on `side` with
/// |N(v1) △ (comp N(v2))| < ε·|opposite|/2.
pub fn near_complementary_pairs(g: &BipartiteGraph, side: Side, eps: f64) -> u64 {
    let nbrs = g.neighborhoods(side);
    let other = g.side_size(side.opposite());
    let limit = eps * other as f64 / 2.0;
    pair_index(nbrs.len())
        .into_iter()
        .filter(|&(a, b)| ((other - nbrs[a].count_xor(&nbrs[b])) as f64) < limit)
        .count() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub richness: RichnessReport,
    pub hypothesis_met: bool,
    /// Vertex diversity with coefficient ε/2.
    pub diverse: Option<bool>,
    /// Pair diversity, filter α = 2γ and symmetric-difference coefficient αε/2,
    /// counting every close pair disjoint from the filtered pair.
    pub pair_diverse: Option<bool>,
    /// The same check counting the largest pairwise-disjoint family.
    pub pair_diverse_family: Option<bool>,
    /// Near-complementary pair counts (X, Y) and their limits |side|^{1+δ}.
    pub near_complementary: Option<[(u64, f64); 2]>,
    pub near_complementary_ok: Option<bool>,
    pub diversity: Option<DiversityReport>,
    pub pair_diversity: Option<DiversityReport>,
}

impl ImplicationReport {
    /// None when the hypothesis is unmet; otherwise whether all three
    /// conclusions hold, with pair diversity required under both countings.
    pub fn all_hold(&self) -> Option<bool> {
        Some(self.diverse? && self.pair_diverse? && self.pair_diverse_family? && self.near_complementary_ok?)
    }
}

/// Checks exact richness and, when it holds, the three diversity statements
/// it is supposed to imply.
pub fn richness_implications(g: &BipartiteGraph, gamma: f64, delta: f64, eps: f64) -> Result<ImplicationReport> {
    if !(gamma < 0.5) {
        return Err(Error::param("gamma", "must be < 1/2"));
    }
    let richness = richness_check_exact(g, gamma, delta, eps)?;
    let mut report = ImplicationReport {
        gamma,
        delta,
        eps,
        hypothesis_met: richness.passes,
        richness,
        diverse: None,
        pair_diverse: None,
        pair_diverse_family: None,
        near_complementary: None,
        near_complementary_ok: None,
        diversity: None,
        pair_diversity: None,
    };
    if !report.hypothesis_met {
        return Ok(report);
    }
    let div = diversity_check(g, eps / 2.0, delta)?;
    let alpha = 2.0 * gamma;
    let pairs = pair_diversity_check(g, alpha, delta, alpha * eps / 2.0, u64::MAX, 0)?;
    let family_ok = [&pairs.x, &pairs.y]
        .iter()
        .all(|s| s.max_disjoint_family.unwrap_or(0) as f64 <= s.threshold);
    let nx = near_complementary_pairs(g, Side::X, eps);
    let ny = near_complementary_pairs(g, Side::Y, eps);
    let lx = (g.x_size() as f64).powf(1.0 + delta);
    let ly = (g.y_size() as f64).powf(1.0 + delta);
    report.diverse = Some(div.passes);
    report.pair_diverse = Some(pairs.passes);
    report.pair_diverse_family = Some(family_ok);
    report.near_complementary = Some([(nx, lx), (ny, ly)]);
    report.near_complementary_ok = Some(nx as f64 <= lx && ny as f64 <= ly);
    report.diversity = Some(div);
    report.pair_diversity = Some(pairs);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Turán bounds

/// (⌈n/(1+Δ)⌉, ⌈n²/(2e+n)⌉): independent-set guarantees from the maximum
/// degree and from the edge count.
pub fn turan_bounds(n: u64, max_deg: u64, edges: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    Ok((n.div_ceil(1 + max_deg), (n * n).div_ceil(2 * edges + n)))
}

/// Greedy independent set on a conflict graph given by adjacency bit-vectors:
/// repeatedly take a vertex of minimum remaining degree (lowest index on
/// ties) and discard its neighbors. Meets both Turán bounds.
pub fn greedy_independent_set(adj: &[BitSet]) -> Vec<usize> {
    let n = adj.len();
    let mut alive = BitSet::full(n);
    let mut deg: Vec<usize> = adj.iter().map(|a| a.count_ones()).collect();
    let mut chosen = Vec::new();
    while !alive.none() {
        let v = alive
            .iter_ones()
            .min_by_key(|&v| (deg[v], v))
            .expect("alive is non-empty");
        chosen.push(v);
        let mut gone = adj[v].and(&alive);
        gone.insert(v);
        alive.difference_with(&gone);
        for u in gone.iter_ones() {
            for w in adj[u].iter_ones() {
                if alive.contains(w) {
                    deg[w] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_biclique(g: &BipartiteGraph, a: usize, b: usize, kind: BicliqueKind) -> bool {
        let ny = g.y_size();
        (0u64..1 << g.x_size()).any(|xs| {
            if (xs.count_ones() as usize) < a {
                return false;
            }
            let mut common = (1u64 << ny) - 1;
            for x in 0..g.x_size() {
                if (xs >> x) & 1 == 1 {
                    let row = g.row(x).to_u64();
                    common &= match kind {
                        BicliqueKind::Complete => row,
                        BicliqueKind::Empty => !row & ((1u64 << ny) - 1),
                    };
                }
            }
            common.count_ones() as usize >= b
        })
    }

    #[test]
    fn biclique_examples() {
        let k = BipartiteGraph::complete(3, 3);
        let r = find_induced_biclique(&k, 2, 2, BicliqueKind::Complete, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r.witness().unwrap().verify(&k));
        let e = BipartiteGraph::empty(3, 3);
        assert_eq!(
            find_induced_biclique(&e, 2, 2, BicliqueKind::Complete, DEFAULT_NODE_BUDGET).unwrap(),
            BicliqueSearch::NotFound
        );
        assert!(find_induced_biclique(&e, 0, 2, BicliqueKind::Complete, 10).is_err());
    }

    #[test]
    fn biclique_agrees_with_enumeration() {
        for seed in 0..12u64 {
            let g = BipartiteGraph::random(9, 10, 0.5, seed).unwrap();
            for a in 1..=4 {
                for b in 1..=4 {
                    for kind in [BicliqueKind::Complete, BicliqueKind::Empty] {
                        let r = find_induced_biclique(&g, a, b, kind, DEFAULT_NODE_BUDGET).unwrap();
                        assert_eq!(r.witness().is_some(), brute_biclique(&g, a, b, kind));
                        if let Some(w) = r.witness() {
                            assert!(w.verify(&g) && w.x_set.len() >= a && w.y_set.len() >= b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_budget_reports_unknown() {
        let g = BipartiteGraph::random(30, 30, 0.5, 3).unwrap();
        let r = find_induced_biclique(&g, 10, 10, BicliqueKind::Complete, 5).unwrap();
        assert!(matches!(r, BicliqueSearch::Unknown { .. }));
    }

    #[test]
    fn ramsey_verdicts() {
        for n in 3..=8 {
            for c in [0.5, 1.0, 2.0, 5.0] {
                let v = is_c_bipartite_ramsey(&BipartiteGraph::complete(n, n), c, DEFAULT_NODE_BUDGET).unwrap();
                assert!(!v.is_ramsey);
                assert_eq!(v.witness.as_ref().unwrap().kind, BicliqueKind::Complete);
            }
        }
        let v = is_c_bipartite_ramsey(&BipartiteGraph::empty(5, 5), 1.0, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.witness.unwrap().kind, BicliqueKind::Empty);
        let g = BipartiteGraph::random(64, 64, 0.5, 1).unwrap();
        let v = is_c_bipartite_ramsey(&g, 5.0, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!((v.a_threshold, v.b_threshold), (21, 21));
        assert!(v.is_ramsey && v.search_exhaustive);
        assert!(is_c_bipartite_ramsey(&g, 0.0, 1).is_err());
    }

    #[test]
    fn balanced_biclique_examples() {
        let full = max_balanced_biclique(&BipartiteGraph::complete(5, 7), BicliqueKind::Complete, DEFAULT_NODE_BUDGET);
        assert_eq!(full, BicliqueBound { value: 5, exact: true });
        let e = max_balanced_biclique(&BipartiteGraph::empty(4, 6), BicliqueKind::Empty, DEFAULT_NODE_BUDGET);
        assert_eq!(e.value, 4);
        for seed in 0..10u64 {
            let g = BipartiteGraph::random(10, 10, 0.5, seed).unwrap();
            for kind in [BicliqueKind::Complete, BicliqueKind::Empty] {
                let want = (0..=10).rev().find(|&a| a == 0 || brute_biclique(&g, a, a, kind)).unwrap();
                assert_eq!(max_balanced_biclique(&g, kind, DEFAULT_NODE_BUDGET).value, want);
            }
        }
    }

    #[test]
    fn diversity_examples() {
        for n in 4..10 {
            let r = diversity_check(&BipartiteGraph::complete(n, n), 0.3, 0.5).unwrap();
            assert!(!r.passes);
            assert_eq!(r.x.max_bad_count, n as u64 - 1);
        }
        // Two complementary rows.
        let g = BipartiteGraph::from_fn(2, 6, |x, y| (x == 0) == (y < 3));
        let r = diversity_check(&g, 1.0, 0.5).unwrap();
        assert_eq!(r.x.max_bad_count, 0);
        assert!(r.x.passes);
        assert!(diversity_check(&g, 0.0, 0.5).is_err());
    }

    #[test]
    fn diversity_is_monotone() {
        for seed in 0..10u64 {
            let g = BipartiteGraph::random(16, 16, 0.5, seed).unwrap();
            let mut prev_pass = false;
            for c in [0.6, 0.5, 0.4, 0.3, 0.2, 0.1] {
                let p = diversity_check(&g, c, 0.4).unwrap().passes;
                assert!(p || !prev_pass);
                prev_pass = p;
            }
        }
    }

    fn brute_pair_counts(g: &BipartiteGraph, side: Side, alpha: f64, eps: f64) -> Vec<u64> {
        let n = g.side_size(side);
        let other = g.side_size(side.opposite());
        let adj = |v: usize, w: usize| match side {
            Side::X => g.has_edge(v, w),
            Side::Y => g.has_edge(w, v),
        };
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let filt = (0..other).filter(|&w| adj(a, w) != !adj(b, w)).count();
                if (filt as f64) < alpha * other as f64 {
                    continue;
                }
                let mut cnt = 0;
                for c in 0..n {
                    for d in c + 1..n {
                        if [c, d].iter().any(|v| *v == a || *v == b) {
                            continue;
                        }
                        let sd: i64 = (0..other)
                            .map(|w| {
                                let m1 = adj(a, w) as i64 + adj(b, w) as i64;
                                let m2 = adj(c, w) as i64 + adj(d, w) as i64;
                                (m1 - m2).abs()
                            })
                            .sum();
                        if (sd as f64) < eps * other as f64 {
                            cnt += 1;
                        }
                    }
                }
                out.push(cnt);
            }
        }
        out
    }

    #[test]
    fn pair_diversity_matches_brute_force() {
        for seed in 0..6u64 {
            let g = BipartiteGraph::random(8, 9, 0.5, seed).unwrap();
            let r = pair_diversity_check(&g, 0.3, 0.5, 0.4, u64::MAX, 0).unwrap();
            for (side, rep) in [(Side::X, &r.x), (Side::Y, &r.y)] {
                let brute = brute_pair_counts(&g, side, 0.3, 0.4);
                assert_eq!(rep.audited, brute.len() as u64);
                assert_eq!(rep.max_bad_count, brute.iter().copied().max().unwrap_or(0));
            }
            assert!(!r.sampled);
        }
    }

    #[test]
    fn identical_pairs_are_close() {
        // Rows 0,1 equal rows 2,3: the pairs {0,1} and {2,3} coincide as multisets.
        let g = BipartiteGraph::from_fn(4, 6, |x, y| if x % 2 == 0 { y < 4 } else { y >= 2 });
        let r = pair_diversity_check(&g, 0.1, 0.1, 0.1, u64::MAX, 0).unwrap();
        assert!(r.x.max_bad_count >= 1);
    }

    #[test]
    fn matching_sizes() {
        assert_eq!(max_matching(&[]), (0, true));
        assert_eq!(max_matching(&[(0, 1), (1, 2), (2, 3)]), (2, true));
        assert_eq!(max_matching(&[(0, 1), (0, 2), (0, 3)]), (1, true));
    }

    fn brute_richness_side(g: &BipartiteGraph, ground: Side, gamma: f64, eps: f64) -> u64 {
        let n = g.side_size(ground);
        let other = g.side_size(ground.opposite());
        let adj = |v: usize, w: usize| match ground {
            Side::X => g.has_edge(v, w),
            Side::Y => g.has_edge(w, v),
        };
        let mut worst = 0;
        for w in 0u64..1 << n {
            if (w.count_ones() as f64) < gamma * n as f64 - 1e-9 {
                continue;
            }
            let bad = (0..other)
                .filter(|&u| {
                    let hit = (0..n).filter(|&v| (w >> v) & 1 == 1 && adj(v, u)).count();
                    let miss = w.count_ones() as usize - hit;
                    (hit as f64) < eps * n as f64 || (miss as f64) < eps * n as f64
                })
                .count() as u64;
            worst = worst.max(bad);
        }
        worst
    }

    #[test]
    fn richness_matches_enumeration() {
        for seed in 0..8u64 {
            let g = BipartiteGraph::random(9, 8, 0.5, seed).unwrap();
            let r = richness_check_exact(&g, 0.3, 0.5, 0.1).unwrap();
            assert_eq!(r.x.max_bad_vertices, brute_richness_side(&g, Side::X, 0.3, 0.1));
            assert_eq!(r.y.max_bad_vertices, brute_richness_side(&g, Side::Y, 0.3, 0.1));
        }
        let k = BipartiteGraph::complete(6, 6);
        let r = richness_check_exact(&k, 0.5, 0.5, 0.4).unwrap();
        assert_eq!(r.x.max_bad_vertices, brute_richness_side(&k, Side::X, 0.5, 0.4));
        assert!(richness_check_exact(&k, 1.5, 0.5, 0.4).unwrap().passes);
        assert!(richness_check_exact(&BipartiteGraph::empty(21, 3), 0.3, 0.5, 0.1).is_err());
    }

    #[test]
    fn sampled_richness_is_sound() {
        let k = BipartiteGraph::complete(8, 8);
        let r = richness_check_sampled(&k, 0.5, 0.5, 0.4, 100, 7).unwrap();
        assert!(!r.passes);
        let w = r.x.worst_w.clone().unwrap();
        assert_eq!(richness_bad_count(&k, Side::X, &w, 0.4), r.x.max_bad_vertices);
        assert!(!richness_check_exact(&k, 0.5, 0.5, 0.4).unwrap().passes);
        assert_eq!(r, richness_check_sampled(&k, 0.5, 0.5, 0.4, 100, 7).unwrap());
    }

    #[test]
    fn implications_hypothesis_unmet() {
        let r = richness_implications(&BipartiteGraph::complete(6, 6), 0.3, 0.5, 0.4).unwrap();
        assert!(!r.hypothesis_met);
        assert_eq!(r.all_hold(), None);
    }

    #[test]
    fn turan_examples() {
        assert_eq!(turan_bounds(10, 0, 0).unwrap(), (10, 10));
        assert_eq!(turan_bounds(10, 9, 45).unwrap(), (1, 1));
        assert!(turan_bounds(0, 0, 0).is_err());
    }

    #[test]
    fn greedy_meets_turan_on_random_conflict_graphs() {
        use rand::Rng;
        let mut rng = seed::rng(5);
        for _ in 0..100 {
            let n = rng.random_range(1..60);
            let p: f64 = rng.random_range(0.0..0.6);
            let mut adj = vec![BitSet::new(n); n];
            let mut edges = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(p) {
                        adj[i].insert(j);
                        adj[j].insert(i);
                        edges += 1;
                    }
                }
            }
            let max_deg = adj.iter().map(|a| a.count_ones()).max().unwrap() as u64;
            let set = greedy_independent_set(&adj);
            for (i, &u) in set.iter().enumerate() {
                for &v in &set[i + 1..] {
                    assert!(!adj[u].contains(v));
                }
            }
            let (a, b) = turan_bounds(n as u64, max_deg, edges).unwrap();
            assert!(set.len() as u64 >= a.max(b));
        }
    }
}
