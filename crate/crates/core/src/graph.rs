//! Bipartite graphs, vertex packs, selections and the on-disk graph format.
//!
//! A [`BipartiteGraph`] stores one bit-vector row per X-vertex (over Y) and,
//! for the neighborhood algebra on the Y side, the transposed rows as well.
//! Graphs are immutable once built.
//!
//! A [`VertexPack`] is either a single vertex or two distinct vertices on the
//! same side treated as a unit. Its neighborhood is a multiset: a vertex
//! adjacent to both members is counted twice. Multisets are never
//! materialized; a pack's neighborhood is the pair (union, intersection) and
//! multiset cardinalities follow from popcounts of the two.

use std::fmt::Write as _;

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::seed;

/// Largest number of X·Y cells a graph may have.
pub const MAX_CELLS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub side: Side,
    pub index: usize,
}

impl VertexId {
    pub fn x(index: usize) -> Self {
        VertexId { side: Side::X, index }
    }

    pub fn y(index: usize) -> Self {
        VertexId { side: Side::Y, index }
    }
}

/// One vertex, or two distinct vertices of the same side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexPack {
    side: Side,
    first: usize,
    second: Option<usize>,
}

impl VertexPack {
    pub fn single(side: Side, index: usize) -> Self {
        VertexPack {
            side,
            first: index,
            second: None,
        }
    }

    /// A pair pack; members are stored in increasing order.
    pub fn pair(side: Side, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidPack(format!("pair repeats vertex {a}")));
        }
        Ok(VertexPack {
            side,
            first: a.min(b),
            second: Some(a.max(b)),
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_pair(&self) -> bool {
        self.second.is_some()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.first == index || self.second == Some(index)
    }

    pub fn overlaps(&self, other: &VertexPack) -> bool {
        self.side == other.side && other.members().any(|m| self.contains(m))
    }
}

/// A pair of vertex masks selecting an induced subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    #[serde(with = "mask_serde")]
    pub x_mask: BitSet,
    #[serde(with = "mask_serde")]
    pub y_mask: BitSet,
}

impl Selection {
    pub fn empty(g: &BipartiteGraph) -> Self {
        Selection {
            x_mask: BitSet::new(g.x_size()),
            y_mask: BitSet::new(g.y_size()),
        }
    }

    pub fn full(g: &BipartiteGraph) -> Self {
        Selection {
            x_mask: BitSet::full(g.x_size()),
            y_mask: BitSet::full(g.y_size()),
        }
    }

    pub fn mask(&self, side: Side) -> &BitSet {
        match side {
            Side::X => &self.x_mask,
            Side::Y => &self.y_mask,
        }
    }

    pub fn mask_mut(&mut self, side: Side) -> &mut BitSet {
        match side {
            Side::X => &mut self.x_mask,
            Side::Y => &mut self.y_mask,
        }
    }

    pub fn insert(&mut self, v: VertexId) {
        self.mask_mut(v.side).insert(v.index);
    }

    pub fn insert_pack(&mut self, pack: &VertexPack) {
        for m in pack.members() {
            self.mask_mut(pack.side()).insert(m);
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask(v.side).contains(v.index)
    }

    /// True when the pack shares a vertex with the selection.
    pub fn touches(&self, pack: &VertexPack) -> bool {
        pack.members().any(|m| self.mask(pack.side()).contains(m))
    }

    pub fn vertex_count(&self) -> usize {
        self.x_mask.count_ones() + self.y_mask.count_ones()
    }
}

mod mask_serde {
    use super::BitSet;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Mask {
        len: usize,
        ones: Vec<usize>,
    }

    pub fn serialize<S: Serializer>(b: &BitSet, s: S) -> Result<S::Ok, S::Error> {
        Mask {
            len: b.len(),
            ones: b.iter_ones().collect(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BitSet, D::Error> {
        let m = Mask::deserialize(d)?;
        if let Some(&bad) = m.ones.iter().find(|&&i| i >= m.len) {
            return Err(serde::de::Error::custom(format!("mask bit {bad} >= len {}", m.len)));
        }
        Ok(BitSet::from_indices(m.len, m.ones))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    x_size: usize,
    y_size: usize,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
    edge_count: u64,
    transposed: bool,
}

impl BipartiteGraph {
    /// Builds a graph from an explicit edge list; rejects out-of-range indices
    /// and repeated edges.
    pub fn new(x_size: usize, y_size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        check_cells(x_size, y_size)?;
        let mut rows = vec![BitSet::new(y_size); x_size];
        for &(x, y) in edges {
            if x >= x_size {
                return Err(Error::IndexOutOfRange {
                    side: Side::X,
                    index: x,
                    size: x_size,
                });
            }
            if y >= y_size {
                return Err(Error::IndexOutOfRange {
                    side: Side::Y,
                    index: y,
                    size: y_size,
                });
            }
            if rows[x].contains(y) {
                return Err(Error::DuplicateEdge { x, y });
            }
            rows[x].insert(y);
        }
        Ok(Self::from_rows(x_size, y_size, rows))
    }

    fn from_rows(x_size: usize, y_size: usize, rows: Vec<BitSet>) -> Self {
        let mut cols = vec![BitSet::new(x_size); y_size];
        let mut edge_count = 0u64;
        for (x, row) in rows.iter().enumerate() {
            for y in row.iter_ones() {
                cols[y].insert(x);
                edge_count += 1;
            }
        }
        BipartiteGraph {
            x_size,
            y_size,
            rows,
            cols,
            edge_count,
            transposed: false,
        }
    }

    pub fn complete(x_size: usize, y_size: usize) -> Self {
        check_cells(x_size, y_size).expect("complete graph too large");
        Self::from_rows(x_size, y_size, vec![BitSet::full(y_size); x_size])
    }

    pub fn empty(x_size: usize, y_size: usize) -> Self {
        check_cells(x_size, y_size).expect("empty graph too large");
        Self::from_rows(x_size, y_size, vec![BitSet::new(y_size); x_size])
    }

    /// Builds a graph from a predicate on cells.
    pub fn from_fn(x_size: usize, y_size: usize, mut adj: impl FnMut(usize, usize) -> bool) -> Self {
        check_cells(x_size, y_size).expect("graph too large");
        let rows = (0..x_size)
            .map(|x| BitSet::from_indices(y_size, (0..y_size).filter(|&y| adj(x, y))))
            .collect();
        Self::from_rows(x_size, y_size, rows)
    }

    /// G(x, y, p): every cell independently present with probability `p`.
    pub fn random(x_size: usize, y_size: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
        }
        check_cells(x_size, y_size)?;
        let mut rng = seed::rng(seed);
        let rows = (0..x_size)
            .map(|_| BitSet::from_indices(y_size, (0..y_size).filter(|_| rng.random::<f64>() < p)))
            .collect();
        Ok(Self::from_rows(x_size, y_size, rows))
    }

    /// Uniformly random graph with exactly `edges` edges.
    pub fn random_exact_edges(x_size: usize, y_size: usize, edges: u64, seed: u64) -> Result<Self> {
        check_cells(x_size, y_size)?;
        let cells = (x_size * y_size) as u64;
        if edges > cells {
            return Err(Error::TooLarge {
                what: "edge count",
                requested: edges,
                limit: cells,
            });
        }
        let mut rng = seed::rng(seed);
        let mut rows = vec![BitSet::new(y_size); x_size];
        for cell in index::sample(&mut rng, cells as usize, edges as usize) {
            rows[cell / y_size].insert(cell % y_size);
        }
        Ok(Self::from_rows(x_size, y_size, rows))
    }

    #[inline]
    pub fn x_size(&self) -> usize {
        self.x_size
    }

    #[inline]
    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn side_size(&self, side: Side) -> usize {
        match side {
            Side::X => self.x_size,
            Side::Y => self.y_size,
        }
    }

    #[inline]
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// m = |X|·|Y|.
    pub fn cells(&self) -> u64 {
        (self.x_size * self.y_size) as u64
    }

    /// f(m) = min(|X|, |Y|).
    pub fn smaller_side(&self) -> usize {
        self.x_size.min(self.y_size)
    }

    /// Whether this graph is a transposed view of an input graph.
    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    pub fn col(&self, y: usize) -> &BitSet {
        &self.cols[y]
    }

    pub fn neighbors(&self, v: VertexId) -> &BitSet {
        match v.side {
            Side::X => &self.rows[v.index],
            Side::Y => &self.cols[v.index],
        }
    }

    /// Neighborhoods of all vertices on `side`, indexed by vertex.
    pub fn neighborhoods(&self, side: Side) -> &[BitSet] {
        match side {
            Side::X => &self.rows,
            Side::Y => &self.cols,
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).count_ones()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter_ones().map(move |y| (x, y)))
    }

    /// Swaps the roles of X and Y and flips the transposition flag.
    pub fn transpose(&self) -> Self {
        BipartiteGraph {
            x_size: self.y_size,
            y_size: self.x_size,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            edge_count: self.edge_count,
            transposed: !self.transposed,
        }
    }

    /// A view with X the smaller side (ties keep the input orientation).
    pub fn oriented(&self) -> std::borrow::Cow<'_, BipartiteGraph> {
        if self.x_size > self.y_size {
            std::borrow::Cow::Owned(self.transpose())
        } else {
            std::borrow::Cow::Borrowed(self)
        }
    }

    /// Exact density e(G)/(|X||Y|).
    pub fn density(&self) -> Result<Ratio<u64>> {
        if self.x_size == 0 || self.y_size == 0 {
            return Err(Error::EmptySide);
        }
        Ok(Ratio::new(self.edge_count, self.cells()))
    }

    pub fn density_f64(&self) -> Result<f64> {
        self.density().map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    fn check_selection(&self, sel: &Selection) -> Result<()> {
        if sel.x_mask.len() != self.x_size || sel.y_mask.len() != self.y_size {
            return Err(Error::WidthMismatch {
                x_mask: sel.x_mask.len(),
                y_mask: sel.y_mask.len(),
                x_size: self.x_size,
                y_size: self.y_size,
            });
        }
        Ok(())
    }

    fn check_pack(&self, pack: &VertexPack) -> Result<()> {
        let size = self.side_size(pack.side());
        for m in pack.members() {
            if m >= size {
                return Err(Error::IndexOutOfRange {
                    side: pack.side(),
                    index: m,
                    size,
                });
            }
        }
        Ok(())
    }

    /// Number of edges with both endpoints selected.
    pub fn induced_edge_count(&self, sel: &Selection) -> Result<u64> {
        self.check_selection(sel)?;
        Ok(sel
            .x_mask
            .iter_ones()
            .map(|x| self.rows[x].count_and(&sel.y_mask) as u64)
            .sum())
    }

    /// Sum over pack members of the number of selected neighbors. A selected
    /// vertex adjacent to both members of a pair counts twice.
    pub fn pack_degree_into(&self, pack: &VertexPack, sel: &Selection) -> Result<u64> {
        self.check_selection(sel)?;
        self.check_pack(pack)?;
        let into = sel.mask(pack.side().opposite());
        let nbrs = self.neighborhoods(pack.side());
        Ok(pack.members().map(|m| nbrs[m].count_and(into) as u64).sum())
    }

    /// Full-graph pack degree d(v) = d(v1) + d(v2).
    pub fn pack_degree(&self, pack: &VertexPack) -> u64 {
        let nbrs = self.neighborhoods(pack.side());
        pack.members().map(|m| nbrs[m].count_ones() as u64).sum()
    }

    /// Multiset neighborhood of a pack as (union, intersection).
    pub fn pack_neighborhood(&self, pack: &VertexPack) -> (BitSet, BitSet) {
        let nbrs = self.neighborhoods(pack.side());
        let mut members = pack.members();
        let first = &nbrs[members.next().expect("pack has a member")];
        match members.next() {
            Some(s) => (first.or(&nbrs[s]), first.and(&nbrs[s])),
            None => (first.clone(), BitSet::new(first.len())),
        }
    }

    /// Size of the multiset symmetric difference of the two packs'
    /// neighborhoods, restricted to the selected vertices on the opposite side.
    pub fn pack_symdiff_size(&self, a: &VertexPack, b: &VertexPack, sel: &Selection) -> Result<u64> {
        self.check_selection(sel)?;
        self.check_pack(a)?;
        self.check_pack(b)?;
        if a.side() != b.side() {
            return Err(Error::InvalidPack("packs lie on different sides".into()));
        }
        if a.overlaps(b) {
            return Err(Error::OverlappingPacks);
        }
        let within = sel.mask(a.side().opposite());
        Ok(multiset_symdiff(&self.pack_neighborhood(a), &self.pack_neighborhood(b), Some(within)))
    }
}

/// |A △ B| for multisets given as (union, intersection) bit-vectors with
/// multiplicities in {0, 1, 2}. Per element, |mult_a − mult_b| equals
/// [union bits differ] + [intersection bits differ].
pub fn multiset_symdiff(a: &(BitSet, BitSet), b: &(BitSet, BitSet), within: Option<&BitSet>) -> u64 {
    match within {
        None => (a.0.count_xor(&b.0) + a.1.count_xor(&b.1)) as u64,
        Some(w) => {
            let count = |p: &BitSet, q: &BitSet| -> usize {
                p.words()
                    .iter()
                    .zip(q.words())
                    .zip(w.words())
                    .map(|((x, y), m)| ((x ^ y) & m).count_ones() as usize)
                    .sum()
            };
            (count(&a.0, &b.0) + count(&a.1, &b.1)) as u64
        }
    }
}

fn check_cells(x_size: usize, y_size: usize) -> Result<()> {
    let cells = (x_size as u64).saturating_mul(y_size as u64);
    if cells > MAX_CELLS {
        return Err(Error::GraphTooLarge { cells });
    }
    Ok(())
}

pub const FORMAT_HEADER: &str = "bipartite v1";

/// Text form: header, `x`, `y`, `e` lines, then one `xi yi` line per edge.
pub fn serialize_graph(g: &BipartiteGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "x {}", g.x_size());
    let _ = writeln!(out, "y {}", g.y_size());
    let _ = writeln!(out, "e {}", g.edge_count());
    for (x, y) in g.edges() {
        let _ = writeln!(out, "{x} {y}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let perr = |line: usize, message: String| Error::Parse { line, message };

    match lines.next() {
        Some((_, FORMAT_HEADER)) => {}
        Some((n, other)) => return Err(perr(n, format!("expected `{FORMAT_HEADER}`, found `{other}`"))),
        None => return Err(perr(1, "empty input".into())),
    }

    let mut header = |key: &str| -> Result<(usize, u64)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| perr(0, format!("missing `{key}` line")))?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(perr(n, format!("expected `{key} <count>`, found `{l}`")));
        }
        let v = parts
            .next()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| perr(n, format!("bad count in `{l}`")))?;
        if parts.next().is_some() {
            return Err(perr(n, format!("trailing tokens in `{l}`")));
        }
        Ok((n, v))
    };
    let (_, x_size) = header("x")?;
    let (_, y_size) = header("y")?;
    let (e_line, edge_count) = header("e")?;
    let (x_size, y_size) = (x_size as usize, y_size as usize);
    check_cells(x_size, y_size)?;

    let mut edges = Vec::with_capacity(edge_count.min(1 << 20) as usize);
    for (n, l) in lines {
        let mut parts = l.split_whitespace().map(|s| s.parse::<usize>());
        let (Some(Ok(x)), Some(Ok(y)), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(perr(n, format!("expected `<xi> <yi>`, found `{l}`")));
        };
        edges.push((x, y));
    }
    if edges.len() as u64 != edge_count {
        return Err(perr(
            e_line,
            format!("header declares {edge_count} edges, found {}", edges.len()),
        ));
    }
    BipartiteGraph::new(x_size, y_size, &edges)
}
