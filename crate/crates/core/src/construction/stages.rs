//! The individual construction stages. All of them expect X to be the
//! smaller side (see [`BipartiteGraph::oriented`]).

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{ConstructionParams, Stage};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Selection, Side, VertexPack};
use crate::ramsey::{greedy_independent_set, turan_bounds};
use crate::seed;

pub(crate) fn require_oriented(g: &BipartiteGraph) -> Result<()> {
    if g.x_size() == 0 || g.y_size() == 0 {
        return Err(Error::EmptySide);
    }
    if g.x_size() > g.y_size() {
        return Err(Error::param("graph", "construction stages need X to be the smaller side"));
    }
    Ok(())
}

/// f(m) = |X| for an oriented graph.
pub(crate) fn f_of(g: &BipartiteGraph) -> f64 {
    g.x_size() as f64
}

/// m / f^{3/2}, the scale of the large sets.
pub(crate) fn large_scale(g: &BipartiteGraph) -> f64 {
    g.cells() as f64 / f_of(g).powf(1.5)
}

// ---------------------------------------------------------------------------
// U

/// The integer range [⌈c·m⌉, ⌊2c·m⌋] of admissible l.
pub fn l_range(g: &BipartiteGraph, c: f64) -> (u64, u64) {
    let cm = c * g.cells() as f64;
    ((cm - 1e-9).ceil() as u64, (2.0 * cm + 1e-9).floor() as u64)
}

/// Sampling probability p = √(4l/e(G)); must lie in (0, 0.1).
pub(crate) fn u_probability(g: &BipartiteGraph, l: u64) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::param("l", "graph has no edges, p = sqrt(4l/e(G)) undefined"));
    }
    let p = (4.0 * l as f64 / g.edge_count() as f64).sqrt();
    if !(p > 0.0) {
        return Err(Error::param("l", format!("p = {p} violates p > 0")));
    }
    if p >= 0.1 {
        return Err(Error::param("l", format!("p = sqrt(4l/e(G)) = {p:.5} violates p < 0.1")));
    }
    Ok(p)
}

/// Each vertex of X ∪ Y independently with probability p = √(4l/e(G)).
pub fn sample_u(g: &BipartiteGraph, l: u64, seed: u64) -> Result<Selection> {
    let p = u_probability(g, l)?;
    let mut rng = seed::rng(seed);
    let mut sel = Selection::empty(g);
    for side in [Side::X, Side::Y] {
        for v in 0..g.side_size(side) {
            if rng.random_bool(p) {
                sel.mask_mut(side).insert(v);
            }
        }
    }
    Ok(sel)
}

// ---------------------------------------------------------------------------
// Candidate pairs

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePairs {
    /// Center of the winning degree-sum window.
    pub d_prime: u64,
    pub window: u64,
    pub bucket_start: u64,
    /// Population of every window, by start.
    pub histogram: Vec<(u64, u64)>,
    /// Y-pairs whose degree sum falls in the winning window.
    pub pairs: Vec<VertexPack>,
}

/// Buckets all Y-pairs by d(y1) + d(y2) into windows of width ⌈√f⌉ and keeps
/// the most populated one (lowest on ties).
pub fn build_candidate_pairs(g: &BipartiteGraph) -> Result<CandidatePairs> {
    require_oriented(g)?;
    let ny = g.y_size();
    if ny < 4 {
        return Err(Error::stage(Stage::CandidatePairs, format!("|Y| = {ny} < 4")));
    }
    let w = (f_of(g).sqrt().ceil() as u64).max(1);
    let deg: Vec<u64> = g.neighborhoods(Side::Y).iter().map(|c| c.count_ones() as u64).collect();
    let buckets = (2 * g.x_size() as u64) / w + 1;
    let mut counts = vec![0u64; buckets as usize];
    for a in 0..ny {
        for b in a + 1..ny {
            counts[((deg[a] + deg[b]) / w) as usize] += 1;
        }
    }
    let best = (0..counts.len()).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).expect("at least one bucket");
    let start = best as u64 * w;
    let pairs = (0..ny)
        .flat_map(|a| (a + 1..ny).map(move |b| (a, b)))
        .filter(|&(a, b)| (deg[a] + deg[b]) / w == best as u64)
        .map(|(a, b)| VertexPack::pair(Side::Y, a, b).expect("a < b"))
        .collect();
    Ok(CandidatePairs {
        d_prime: start + w / 2,
        window: w,
        bucket_start: start,
        histogram: counts.iter().enumerate().map(|(i, &c)| (i as u64 * w, c)).collect(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pruned {
    pub kept: Vec<VertexPack>,
    pub removed: u64,
    /// |Y|^{1+δ}.
    pub removed_limit: f64,
    pub within_limit: bool,
}

/// Keeps pairs {w1, w2} with min(|N(w1) ∖ N(w2)|, |N(w2) ∖ N(w1)|) ≥ 2γ|X|.
pub fn prune_non_diverse_pairs(g: &BipartiteGraph, pairs: &[VertexPack], gamma: f64, delta: f64) -> Result<Pruned> {
    require_oriented(g)?;
    let cols = g.neighborhoods(Side::Y);
    let limit = 2.0 * gamma * g.x_size() as f64;
    let kept: Vec<VertexPack> = pairs
        .iter()
        .filter(|p| {
            let mut m = p.members();
            let (a, b) = (m.next().expect("pair"), m.next().expect("pair"));
            let one_way = cols[a].count_and_not(&cols[b]);
            let other_way = cols[b].count_and_not(&cols[a]);
            one_way.min(other_way) as f64 >= limit
        })
        .copied()
        .collect();
    let removed = (pairs.len() - kept.len()) as u64;
    let removed_limit = (g.y_size() as f64).powf(1.0 + delta);
    if kept.is_empty() {
        return Err(Error::stage(
            Stage::Prune,
            format!("all {} candidate pairs have nearly nested neighborhoods", pairs.len()),
        ));
    }
    Ok(Pruned {
        kept,
        removed,
        removed_limit,
        within_limit: removed as f64 <= removed_limit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PackMode {
    /// L is the set of W′-neighbors of one vertex, as single packs.
    Star,
    /// L is a matching of W′, as pair packs.
    Matching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarOrMatching {
    pub mode: PackMode,
    pub center: Option<usize>,
    pub packs: Vec<VertexPack>,
    pub d_dprime: i64,
    pub max_degree: u64,
    pub matching_size: u64,
}

/// Reads W′ as a graph on Y. Star mode when the largest W′-degree (lowest
/// index on ties) is at least the size of a greedy matching.
pub fn star_or_matching(g: &BipartiteGraph, kept: &[VertexPack], d_prime: u64) -> Result<StarOrMatching> {
    if kept.is_empty() {
        return Err(Error::stage(Stage::StarOrMatching, "no pairs left"));
    }
    let ny = g.y_size();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ny];
    let mut used = BitSet::new(ny);
    let mut matching = Vec::new();
    for p in kept {
        let mut m = p.members();
        let (a, b) = (m.next().expect("pair"), m.next().expect("pair"));
        adj[a].push(b);
        adj[b].push(a);
        if !used.contains(a) && !used.contains(b) {
            used.insert(a);
            used.insert(b);
            matching.push(*p);
        }
    }
    let center = (0..ny).max_by_key(|&v| (adj[v].len(), std::cmp::Reverse(v))).expect("ny > 0");
    let max_degree = adj[center].len() as u64;
    if max_degree >= matching.len() as u64 {
        let mut leaves = adj[center].clone();
        leaves.sort_unstable();
        let dy = g.degree(crate::graph::VertexId::y(center)) as i64;
        Ok(StarOrMatching {
            mode: PackMode::Star,
            center: Some(center),
            packs: leaves.into_iter().map(|v| VertexPack::single(Side::Y, v)).collect(),
            d_dprime: d_prime as i64 - dy,
            max_degree,
            matching_size: matching.len() as u64,
        })
    } else {
        Ok(StarOrMatching {
            mode: PackMode::Matching,
            center: None,
            matching_size: matching.len() as u64,
            packs: matching,
            d_dprime: d_prime as i64,
            max_degree,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diversified {
    pub a: Vec<VertexPack>,
    pub conflict_edges: u64,
    pub max_conflict_degree: u64,
    /// |Y|^δ, the degree bound pair diversity promises.
    pub degree_limit: f64,
    pub turan_by_degree: u64,
}

/// Conflict graph on L (multiset symmetric difference < 4γ²|X|) and a greedy
/// independent set A of it.
pub fn diversify(g: &BipartiteGraph, packs: &[VertexPack], gamma: f64, delta: f64) -> Result<Diversified> {
    if packs.is_empty() {
        return Err(Error::stage(Stage::Diversify, "L is empty"));
    }
    let limit = 4.0 * gamma * gamma * g.x_size() as f64;
    let hoods: Vec<(BitSet, BitSet)> = packs.iter().map(|p| g.pack_neighborhood(p)).collect();
    let n = packs.len();
    let mut adj = vec![BitSet::new(n); n];
    let mut edges = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            if (crate::graph::multiset_symdiff(&hoods[i], &hoods[j], None) as f64) < limit {
                adj[i].insert(j);
                adj[j].insert(i);
                edges += 1;
            }
        }
    }
    let max_deg = adj.iter().map(|a| a.count_ones()).max().unwrap_or(0) as u64;
    let chosen = greedy_independent_set(&adj);
    let (by_degree, _) = turan_bounds(n as u64, max_deg, edges)?;
    if (chosen.len() as u64) < by_degree {
        return Err(Error::Consistency(format!(
            "independent set of {} below the degree bound {by_degree}",
            chosen.len()
        )));
    }
    Ok(Diversified {
        a: chosen.into_iter().map(|i| packs[i]).collect(),
        conflict_edges: edges,
        max_conflict_degree: max_deg,
        degree_limit: (g.y_size() as f64).powf(delta),
        turan_by_degree: by_degree,
    })
}

// ---------------------------------------------------------------------------
// Claims

/// Measured quantities of the five claims about U and A, each with its
/// threshold and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimDiagnostics {
    pub e_u: u64,
    /// |e(U) − 4l| against K1·m/√f.
    pub deviation: f64,
    pub deviation_limit: f64,
    pub claim1: bool,
    /// Packs of A with no vertex in U, against 2|A|/3.
    pub untouched: u64,
    pub claim2: bool,
    /// d = p·d″ and the half-width K2·√f of the degree window.
    pub d: f64,
    pub window_half_width: f64,
    pub in_window: u64,
    pub claim3: bool,
    /// Smallest |N_U(x) △ N_U(y)| over pairs of A, against K3·f.
    pub min_restricted_symdiff: Option<u64>,
    pub symdiff_limit: f64,
    pub claim4: bool,
    /// Pairs of A with equal degree into U, against K4·m²/f^{7/2}.
    pub equal_degree_pairs: u64,
    pub equal_pairs_limit: f64,
    pub claim5: bool,
    pub a_size: u64,
}

impl ClaimDiagnostics {
    pub fn claims(&self) -> [bool; 5] {
        [self.claim1, self.claim2, self.claim3, self.claim4, self.claim5]
    }

    /// The claims later stages depend on: 1, 2, 3 and 5. Claim 4 only feeds
    /// the argument for claim 5, which is checked directly.
    pub fn gating_passed(&self) -> bool {
        self.claim1 && self.claim2 && self.claim3 && self.claim5
    }
}

/// Measures the five claims. `d_dprime` is d″ from [`star_or_matching`].
pub fn verify_claims(
    g: &BipartiteGraph,
    u: &Selection,
    a: &[VertexPack],
    l: u64,
    d_dprime: i64,
    params: &ConstructionParams,
) -> Result<ClaimDiagnostics> {
    // No range check here: the claims are measurable for any U.
    let p = (4.0 * l as f64 / g.edge_count().max(1) as f64).sqrt();
    let f = f_of(g);
    let m = g.cells() as f64;
    let e_u = g.induced_edge_count(u)?;
    let deviation = (e_u as f64 - 4.0 * l as f64).abs();
    let deviation_limit = params.k1 * m / f.sqrt();

    let untouched = a.iter().filter(|pk| !u.touches(pk)).count() as u64;
    let degrees: Vec<u64> = a.iter().map(|pk| g.pack_degree_into(pk, u)).collect::<Result<_>>()?;
    let d = p * d_dprime as f64;
    let half = params.k2 * f.sqrt();
    let in_window = degrees.iter().filter(|&&x| (x as f64 - d).abs() <= half).count() as u64;

    let mut min_sd: Option<u64> = None;
    let mut equal = 0u64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let sd = g.pack_symdiff_size(&a[i], &a[j], u)?;
            min_sd = Some(min_sd.map_or(sd, |v| v.min(sd)));
            if degrees[i] == degrees[j] {
                equal += 1;
            }
        }
    }
    let symdiff_limit = params.k3 * f;
    let equal_pairs_limit = params.k4 * m * m / f.powf(3.5);
    let n = a.len() as u64;
    Ok(ClaimDiagnostics {
        e_u,
        deviation,
        deviation_limit,
        claim1: deviation <= deviation_limit,
        untouched,
        claim2: 3 * untouched >= 2 * n,
        d,
        window_half_width: half,
        in_window,
        claim3: 3 * in_window >= 2 * n,
        min_restricted_symdiff: min_sd,
        symdiff_limit,
        claim4: min_sd.is_none_or(|v| v as f64 >= symdiff_limit),
        equal_degree_pairs: equal,
        equal_pairs_limit,
        claim5: equal as f64 <= equal_pairs_limit,
        a_size: n,
    })
}

// ---------------------------------------------------------------------------
// Split

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitBranch {
    /// T = upper half of B plus same-degree packs of H; S = lowest third of B.
    UpperHalf,
    /// S = lower half of B plus same-degree packs of H; T = highest third of B.
    LowerHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub h: Vec<VertexPack>,
    pub p: Vec<VertexPack>,
    /// B ordered by degree into U, ascending.
    pub b: Vec<VertexPack>,
    pub z: Vec<VertexPack>,
    /// Low-degree set, ascending by degree into U.
    pub s: Vec<VertexPack>,
    /// High-degree set, ascending by degree into U.
    pub t: Vec<VertexPack>,
    pub branch: SplitBranch,
    /// Same-degree H-packs attached to the half that was tested first.
    pub upper_neighbors: u64,
    pub branch_threshold: f64,
    pub separation: i64,
    /// |T| ≥ c2·√f and |S| ≥ 2·c2·m/f^{3/2} (or mirrored by branch).
    pub size_floors_met: bool,
}

/// One pack per distinct degree, via a greedy independent set of the
/// equal-degree graph.
fn distinct_degree_set(packs: &[VertexPack], deg: &BTreeMap<VertexPack, u64>) -> Result<Vec<VertexPack>> {
    let n = packs.len();
    let mut adj = vec![BitSet::new(n); n];
    let mut edges = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            if deg[&packs[i]] == deg[&packs[j]] {
                adj[i].insert(j);
                adj[j].insert(i);
                edges += 1;
            }
        }
    }
    let chosen = greedy_independent_set(&adj);
    if n > 0 {
        let (_, by_edges) = turan_bounds(n as u64, 0, edges)?;
        if (chosen.len() as u64) < by_edges {
            return Err(Error::Consistency("independent set below the edge-count bound".into()));
        }
    }
    Ok(chosen.into_iter().map(|i| packs[i]).collect())
}

/// Splits the good packs of A (untouched by U, degree within the window)
/// alternately into H and P, extracts B ⊆ H and Z ⊆ P with distinct degrees
/// into U, and builds S and T.
pub fn split_and_order(
    g: &BipartiteGraph,
    u: &Selection,
    a: &[VertexPack],
    diag: &ClaimDiagnostics,
    params: &ConstructionParams,
) -> Result<Split> {
    let mut deg = BTreeMap::new();
    let mut good = Vec::new();
    for pk in a {
        let d = g.pack_degree_into(pk, u)?;
        deg.insert(*pk, d);
        if !u.touches(pk) && (d as f64 - diag.d).abs() <= diag.window_half_width {
            good.push(*pk);
        }
    }
    let h: Vec<VertexPack> = good.iter().step_by(2).copied().collect();
    let p: Vec<VertexPack> = good.iter().skip(1).step_by(2).copied().collect();
    let pos: BTreeMap<VertexPack, usize> = h.iter().enumerate().map(|(i, pk)| (*pk, i)).collect();
    let mut b = distinct_degree_set(&h, &deg)?;
    b.sort_by_key(|pk| (deg[pk], pos[pk]));
    let mut z = distinct_degree_set(&p, &deg)?;
    z.sort_by_key(|pk| deg[pk]);
    let nb = b.len();
    if nb < 6 {
        return Err(Error::stage(Stage::Split, format!("|B| = {nb} < 6 distinct degrees in H")));
    }
    let in_b: BTreeSet<VertexPack> = b.iter().copied().collect();
    let same_degree = |half: &[VertexPack]| -> Vec<VertexPack> {
        let degs: BTreeSet<u64> = half.iter().map(|pk| deg[pk]).collect();
        h.iter().filter(|pk| !in_b.contains(pk) && degs.contains(&deg[*pk])).copied().collect()
    };
    let upper = &b[nb.div_ceil(2)..];
    let upper_extra = same_degree(upper);
    let threshold = params.c1 * large_scale(g);
    let (branch, mut s, mut t) = if upper_extra.len() as f64 >= threshold {
        let mut t = upper.to_vec();
        t.extend(upper_extra.iter().copied());
        (SplitBranch::UpperHalf, b[..nb / 3].to_vec(), t)
    } else {
        let lower = &b[..nb / 2];
        let mut s = lower.to_vec();
        s.extend(same_degree(lower));
        (SplitBranch::LowerHalf, s, b[nb - nb / 3..].to_vec())
    };
    let order = |v: &mut Vec<VertexPack>| v.sort_by_key(|pk| (deg[pk], pos[pk]));
    order(&mut s);
    order(&mut t);
    let separation = deg[&t[0]] as i64 - deg[s.last().expect("S non-empty")] as i64;
    if (separation as f64) < nb as f64 / 6.0 {
        return Err(Error::Consistency(format!("separation {separation} below |B|/6 with |B| = {nb}")));
    }
    let sqrt_f = f_of(g).sqrt();
    if (separation as f64) < 8.0 * params.c2 * sqrt_f {
        return Err(Error::stage(
            Stage::Split,
            format!("separation {separation} below 8*c2*sqrt(f) = {:.3}", 8.0 * params.c2 * sqrt_f),
        ));
    }
    let (small, large) = match branch {
        SplitBranch::UpperHalf => (s.len(), t.len()),
        SplitBranch::LowerHalf => (t.len(), s.len()),
    };
    let size_floors_met =
        small as f64 >= params.c2 * sqrt_f && large as f64 >= 2.0 * params.c2 * large_scale(g);
    Ok(Split {
        h,
        p,
        b,
        z,
        s,
        t,
        branch,
        upper_neighbors: upper_extra.len() as u64,
        branch_threshold: threshold,
        separation,
        size_floors_met,
    })
}

// ---------------------------------------------------------------------------
// Q family

/// The selections U_{k,i} = U ∪ (first k−i of S) ∪ (first i of T) over the
/// (clipped) index ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QFamily {
    pub s: Vec<VertexPack>,
    pub t: Vec<VertexPack>,
    pub s_degrees: Vec<u64>,
    pub t_degrees: Vec<u64>,
    pub e_u: u64,
    pub nominal_k: (u64, u64),
    pub nominal_i_max: u64,
    pub k_range: (u64, u64),
    pub i_max: u64,
    /// True when the ranges had to be clipped to |S| and |T|.
    pub sub_nominal: bool,
    /// (k, i, e(U_{k,i})) in index order.
    pub entries: Vec<(u64, u64, u64)>,
}

impl QFamily {
    /// e(U_{k,i}) from prefix sums of degrees into U.
    pub fn size(&self, k: u64, i: u64) -> u64 {
        self.e_u
            + self.s_degrees[..(k - i) as usize].iter().sum::<u64>()
            + self.t_degrees[..i as usize].iter().sum::<u64>()
    }

    /// Q_{k,i} as a selection of Y-vertices.
    pub fn q_selection(&self, g: &BipartiteGraph, k: u64, i: u64) -> Selection {
        let mut sel = Selection::empty(g);
        for pk in self.s[..(k - i) as usize].iter().chain(&self.t[..i as usize]) {
            sel.insert_pack(pk);
        }
        sel
    }

    /// U_{k,i} as a selection.
    pub fn u_selection(&self, g: &BipartiteGraph, u: &Selection, k: u64, i: u64) -> Selection {
        let mut sel = self.q_selection(g, k, i);
        sel.x_mask.union_with(&u.x_mask);
        sel.y_mask.union_with(&u.y_mask);
        sel
    }
}

pub fn build_q_family(g: &BipartiteGraph, u: &Selection, split: &Split, params: &ConstructionParams) -> Result<QFamily> {
    let s_degrees: Vec<u64> = split.s.iter().map(|pk| g.pack_degree_into(pk, u)).collect::<Result<_>>()?;
    let t_degrees: Vec<u64> = split.t.iter().map(|pk| g.pack_degree_into(pk, u)).collect::<Result<_>>()?;
    let scale = params.c1 * large_scale(g);
    let nominal_k = ((scale - 1e-9).ceil().max(0.0) as u64, (2.0 * scale + 1e-9).floor() as u64);
    let nominal_i_max = (params.c1 * f_of(g).sqrt() + 1e-9).floor() as u64;
    if split.s.is_empty() {
        return Err(Error::stage(Stage::QFamily, "S is empty"));
    }
    // U_{k+1,0} must exist, so k ≤ |S| − 1.
    let k_hi = nominal_k.1.min(split.s.len() as u64 - 1);
    let k_lo = nominal_k.0.min(k_hi);
    let i_max = nominal_i_max.min(split.t.len() as u64);
    let sub_nominal = (k_lo, k_hi) != nominal_k || i_max != nominal_i_max;
    let mut fam = QFamily {
        s: split.s.clone(),
        t: split.t.clone(),
        s_degrees,
        t_degrees,
        e_u: g.induced_edge_count(u)?,
        nominal_k,
        nominal_i_max,
        k_range: (k_lo, k_hi),
        i_max,
        sub_nominal,
        entries: Vec::new(),
    };
    for k in k_lo..=k_hi {
        for i in 0..=i_max.min(k) {
            fam.entries.push((k, i, fam.size(k, i)));
        }
    }
    if fam.entries.is_empty() {
        return Err(Error::stage(Stage::QFamily, "index family is empty after clipping"));
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_probability_bounds() {
        // l = e/400 gives p = 0.1 exactly: rejected.
        assert!(sample_u(&BipartiteGraph::complete(20, 20), 1, 0).is_err());
        let g = BipartiteGraph::complete(40, 40);
        assert!(sample_u(&g, 1, 0).is_ok());
        let err = u_probability(&BipartiteGraph::complete(20, 40), 2).unwrap_err();
        assert!(err.to_string().contains("p < 0.1"), "{err}");
        assert!(sample_u(&g, 0, 0).is_err());
        assert_eq!(sample_u(&g, 1, 9).unwrap(), sample_u(&g, 1, 9).unwrap());
    }

    #[test]
    fn u_inclusion_rate() {
        let g = BipartiteGraph::complete(40, 40);
        // p = sqrt(4·1/1600) = 0.05
        let total: usize = (0..1000u64).map(|s| sample_u(&g, 1, s).unwrap().vertex_count()).sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 4.0).abs() < 0.25, "{mean}");
    }

    #[test]
    fn candidate_pairs_of_complete_graph() {
        let g = BipartiteGraph::complete(6, 6);
        let c = build_candidate_pairs(&g).unwrap();
        assert_eq!(c.pairs.len(), 15);
        assert_eq!(c.histogram.iter().filter(|h| h.1 > 0).count(), 1);
    }

    #[test]
    fn candidate_histogram_matches_direct_count() {
        let g = BipartiteGraph::random(16, 16, 0.5, 4).unwrap();
        let c = build_candidate_pairs(&g).unwrap();
        let w = c.window;
        let deg: Vec<u64> = (0..16).map(|y| g.col(y).count_ones() as u64).collect();
        for &(start, count) in &c.histogram {
            let direct = (0..16)
                .flat_map(|a| (a + 1..16).map(move |b| (a, b)))
                .filter(|&(a, b)| (deg[a] + deg[b]) >= start && deg[a] + deg[b] < start + w)
                .count() as u64;
            assert_eq!(count, direct);
        }
        let top = c.histogram.iter().map(|h| h.1).max().unwrap();
        assert_eq!(c.histogram.iter().find(|h| h.1 == top).unwrap().0, c.bucket_start);
    }

    #[test]
    fn complete_graph_is_pruned_away() {
        let g = BipartiteGraph::complete(8, 8);
        let c = build_candidate_pairs(&g).unwrap();
        match prune_non_diverse_pairs(&g, &c.pairs, 0.05, 0.1) {
            Err(Error::StageFailed { stage, .. }) => assert_eq!(stage, Stage::Prune),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complementary_rows_survive_pruning() {
        // Y-vertex y is adjacent to the X-half selected by y's parity.
        let g = BipartiteGraph::from_fn(8, 8, |x, y| (x < 4) == (y % 2 == 0));
        let pairs: Vec<VertexPack> = vec![
            VertexPack::pair(Side::Y, 0, 1).unwrap(),
            VertexPack::pair(Side::Y, 2, 5).unwrap(),
        ];
        let r = prune_non_diverse_pairs(&g, &pairs, 0.05, 0.1).unwrap();
        assert_eq!(r.kept, pairs);
        assert_eq!(r.removed, 0);
    }

    #[test]
    fn star_and_matching_modes() {
        let g = BipartiteGraph::random(6, 8, 0.5, 1).unwrap();
        let star: Vec<VertexPack> = (1..6).map(|v| VertexPack::pair(Side::Y, 0, v).unwrap()).collect();
        let r = star_or_matching(&g, &star, 10).unwrap();
        assert_eq!((r.mode, r.packs.len(), r.center), (PackMode::Star, 5, Some(0)));
        assert_eq!(r.d_dprime, 10 - g.col(0).count_ones() as i64);
        let perfect: Vec<VertexPack> = (0..4).map(|i| VertexPack::pair(Side::Y, 2 * i, 2 * i + 1).unwrap()).collect();
        let r = star_or_matching(&g, &perfect, 10).unwrap();
        assert_eq!((r.mode, r.packs.len(), r.d_dprime), (PackMode::Matching, 4, 10));
    }

    #[test]
    fn star_or_matching_size_bound() {
        use rand::Rng;
        let g = BipartiteGraph::random(6, 20, 0.5, 2).unwrap();
        let mut rng = seed::rng(3);
        for _ in 0..20 {
            let mut pairs = BTreeSet::new();
            for _ in 0..rng.random_range(1..40) {
                let a = rng.random_range(0..20);
                let b = rng.random_range(0..20);
                if a != b {
                    pairs.insert(VertexPack::pair(Side::Y, a, b).unwrap());
                }
            }
            let pairs: Vec<VertexPack> = pairs.into_iter().collect();
            if pairs.is_empty() {
                continue;
            }
            let r = star_or_matching(&g, &pairs, 0).unwrap();
            let bound = pairs.len() as f64 / (2.0 * r.max_degree as f64);
            assert!(r.packs.len() as f64 >= bound);
        }
    }

    #[test]
    fn diversify_extremes() {
        let g = BipartiteGraph::from_fn(8, 8, |x, y| x == y);
        let packs: Vec<VertexPack> = (0..8).map(|y| VertexPack::single(Side::Y, y)).collect();
        let r = diversify(&g, &packs, 0.1, 0.1).unwrap();
        assert_eq!(r.a.len(), 8);
        let same = BipartiteGraph::complete(8, 8);
        let r = diversify(&same, &packs, 0.1, 0.1).unwrap();
        assert_eq!(r.a.len(), 1);
    }

    #[test]
    fn claims_with_full_u() {
        let g = BipartiteGraph::complete(4, 4);
        let u = Selection::full(&g);
        let packs = [VertexPack::single(Side::Y, 0)];
        let d = verify_claims(&g, &u, &packs, 4, 4, &ConstructionParams::default()).unwrap();
        assert_eq!(d.deviation, 0.0);
        assert!(d.claim1);
        // A single pack: claims 4 and 5 hold vacuously.
        assert!(d.claim4 && d.claim5);
        assert_eq!(d.min_restricted_symdiff, None);
    }
}
