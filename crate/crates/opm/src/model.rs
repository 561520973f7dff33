//! Domain types and predicates shared by every matching algorithm: points with
//! exact rational frequencies, datasets, edges, matchings, dominance and
//! conflict tests, and the edge-weight functions.
//!
//! All frequency arithmetic is exact (integer counts over a dataset-level
//! denominator), so weight comparisons and tie-breaking are deterministic.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Grid coordinate. Real-valued data is scaled to an integer grid at ingestion.
pub type Coord = i64;

/// Exact rational used for frequencies and weights.
pub type Rat = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rat {
    Ratio::new(n, d)
}

/// A distinct value tuple with its record multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub coords: Vec<Coord>,
    /// Number of records holding this value tuple.
    pub raw_count: u64,
    /// Normalized share of records, summing to exactly 1 over a dataset.
    pub freq: Rat,
}

/// A sorted, deduplicated collection of points of equal dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    points: Vec<Point>,
    dim: usize,
    total_records: u64,
    /// Decimal digits represented by one grid unit (0 for plain integers).
    scale: u32,
}

impl Dataset {
    /// Builds a dataset from raw (coords, count) rows. Duplicate coordinate
    /// tuples are merged by summing counts; zero-count rows are dropped.
    pub fn from_raw(dim: usize, rows: Vec<(Vec<Coord>, u64)>, scale: u32) -> Result<Dataset> {
        if dim == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        let mut merged: std::collections::BTreeMap<Vec<Coord>, u64> = Default::default();
        for (coords, count) in rows {
            if coords.len() != dim {
                return Err(Error::DimensionMismatch(coords.len(), dim));
            }
            if count > 0 {
                *merged.entry(coords).or_insert(0) += count;
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyInput("dataset has no records"));
        }
        let total: u64 = merged.values().sum();
        let points = merged
            .into_iter()
            .map(|(coords, raw_count)| Point {
                coords,
                raw_count,
                freq: rat(raw_count as i128, total as i128),
            })
            .collect();
        Ok(Dataset {
            points,
            dim,
            total_records: total,
            scale,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_records(&self) -> u64 {
        self.total_records
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn point(&self, idx: usize) -> &Point {
        &self.points[idx]
    }

    /// Index of the point with the given coordinates, if present.
    pub fn find(&self, coords: &[Coord]) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.coords.as_slice().cmp(coords))
            .ok()
    }

    /// Largest normalized frequency in the dataset.
    pub fn max_freq(&self) -> Rat {
        self.points.iter().map(|p| p.freq).max().unwrap()
    }

    /// True when no two points share a value on any single axis.
    pub fn general_position(&self) -> bool {
        for axis in 0..self.dim {
            let mut vals: Vec<Coord> = self.points.iter().map(|p| p.coords[axis]).collect();
            vals.sort_unstable();
            if vals.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        true
    }

    /// Returns a copy with the given axes negated. Used to reduce decreasing
    /// chains to the increasing code path.
    pub fn negate_axes(&self, axes: &[usize]) -> Dataset {
        let rows = self
            .points
            .iter()
            .map(|p| {
                let mut c = p.coords.clone();
                for &a in axes {
                    c[a] = -c[a];
                }
                (c, p.raw_count)
            })
            .collect();
        Dataset::from_raw(self.dim, rows, self.scale).expect("negation preserves validity")
    }
}

/// A matched pair of indices, `p_idx` into P and `q_idx` into Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub p_idx: usize,
    pub q_idx: usize,
}

impl Edge {
    pub fn new(p_idx: usize, q_idx: usize) -> Edge {
        Edge { p_idx, q_idx }
    }

    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        self.p_idx == other.p_idx || self.q_idx == other.q_idx
    }
}

/// A set of edges, injective on both sides and mutually non-conflicting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    edges: BTreeSet<Edge>,
}

impl Matching {
    pub fn new() -> Matching {
        Matching::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Matching {
        Matching {
            edges: edges.into_iter().collect(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn insert(&mut self, e: Edge) {
        self.edges.insert(e);
    }

    pub fn contains_p(&self, p_idx: usize) -> bool {
        self.edges.iter().any(|e| e.p_idx == p_idx)
    }

    pub fn contains_q(&self, q_idx: usize) -> bool {
        self.edges.iter().any(|e| e.q_idx == q_idx)
    }
}

/// Edge-weight selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Unit,
    MinFreq,
    KappaDiff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub kind: WeightKind,
    /// Only used by `KappaDiff`; must dominate every |f(p) - f(q)|.
    pub kappa: Rat,
}

impl WeightSpec {
    pub fn unit() -> WeightSpec {
        WeightSpec {
            kind: WeightKind::Unit,
            kappa: Rat::from_integer(0),
        }
    }

    pub fn min_freq() -> WeightSpec {
        WeightSpec {
            kind: WeightKind::MinFreq,
            kappa: Rat::from_integer(0),
        }
    }

    pub fn kappa_diff(kappa: Rat) -> WeightSpec {
        WeightSpec {
            kind: WeightKind::KappaDiff,
            kappa,
        }
    }

    /// Default kappa: the maximum frequency over both datasets.
    pub fn kappa_diff_default(p: &Dataset, q: &Dataset) -> WeightSpec {
        WeightSpec::kappa_diff(p.max_freq().max(q.max_freq()))
    }
}

/// True iff `b` dominates `a` (written a < b in the dominance order).
///
/// In 2-D: a.x < b.x, or a.x = b.x and b.y < a.y. For d >= 3 the tie on the
/// first axis is broken the same way, by reversed comparison of the remaining
/// coordinates.
pub fn dominates(a: &Point, b: &Point) -> Result<bool> {
    if a.coords.len() != b.coords.len() {
        return Err(Error::DimensionMismatch(a.coords.len(), b.coords.len()));
    }
    match a.coords[0].cmp(&b.coords[0]) {
        Ordering::Less => Ok(true),
        Ordering::Greater => Ok(false),
        Ordering::Equal => Ok(b.coords[1..] < a.coords[1..]),
    }
}

/// Strict dominance on every axis; the relation monotone chains are built on.
pub fn strictly_dominates(a: &[Coord], b: &[Coord]) -> bool {
    a.iter().zip(b).all(|(x, y)| x < y)
}

/// Conflict test on raw coordinate tuples: some axis orders the P pair and the
/// Q pair inconsistently (opposite signs, or a tie on exactly one side).
pub fn coords_conflict(p1: &[Coord], p2: &[Coord], q1: &[Coord], q2: &[Coord]) -> bool {
    for axis in 0..p1.len() {
        let sp = p1[axis].cmp(&p2[axis]);
        let sq = q1[axis].cmp(&q2[axis]);
        if sp != sq {
            return true;
        }
    }
    false
}

/// True iff the two edges cannot coexist in an order-preserving matching.
pub fn edges_conflict(e1: &Edge, e2: &Edge, p: &Dataset, q: &Dataset) -> Result<bool> {
    if e1.shares_endpoint(e2) {
        return Err(Error::SharedEndpoint(
            e1.p_idx, e1.q_idx, e2.p_idx, e2.q_idx,
        ));
    }
    for (idx, ds) in [(e1.p_idx, p), (e2.p_idx, p), (e1.q_idx, q), (e2.q_idx, q)] {
        if idx >= ds.len() {
            return Err(Error::IndexOutOfRange(idx));
        }
    }
    Ok(coords_conflict(
        &p.point(e1.p_idx).coords,
        &p.point(e2.p_idx).coords,
        &q.point(e1.q_idx).coords,
        &q.point(e2.q_idx).coords,
    ))
}

/// True iff `m` is injective on both sides and pairwise non-conflicting.
pub fn is_order_preserving(m: &Matching, p: &Dataset, q: &Dataset) -> bool {
    let edges: Vec<&Edge> = m.edges().collect();
    for (i, e1) in edges.iter().enumerate() {
        if e1.p_idx >= p.len() || e1.q_idx >= q.len() {
            return false;
        }
        for e2 in &edges[i + 1..] {
            if e1.shares_endpoint(e2) {
                return false;
            }
            if coords_conflict(
                &p.point(e1.p_idx).coords,
                &p.point(e2.p_idx).coords,
                &q.point(e1.q_idx).coords,
                &q.point(e2.q_idx).coords,
            ) {
                return false;
            }
        }
    }
    true
}

/// Weight of matching `p` with `q` under the given spec. Always nonnegative;
/// a negative kappa-diff result signals a kappa that is too small.
pub fn edge_weight(p: &Point, q: &Point, w: &WeightSpec) -> Result<Rat> {
    match w.kind {
        WeightKind::Unit => Ok(Rat::from_integer(1)),
        WeightKind::MinFreq => Ok(p.freq.min(q.freq)),
        WeightKind::KappaDiff => {
            let diff = if p.freq >= q.freq {
                p.freq - q.freq
            } else {
                q.freq - p.freq
            };
            if diff > w.kappa {
                return Err(Error::Config(format!(
                    "kappa {} smaller than frequency difference {}",
                    w.kappa, diff
                )));
            }
            Ok(w.kappa - diff)
        }
    }
}

/// Total weight of a matching; 0 for the empty matching.
pub fn matching_weight(m: &Matching, p: &Dataset, q: &Dataset, w: &WeightSpec) -> Result<Rat> {
    let mut sum = Rat::from_integer(0);
    for e in m.edges() {
        sum += edge_weight(p.point(e.p_idx), q.point(e.q_idx), w)?;
    }
    Ok(sum)
}
