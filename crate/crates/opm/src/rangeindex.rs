//! Max-aggregate orthogonal range search over candidate edges, keyed by the
//! projected coordinate triple (p.y, q.x, q.y) in 2-D (and the analogous
//! 2d-1 tuple in higher dimensions). Three interchangeable backends: a
//! layered range tree, a kd-tree, and a naive linear scan. All values start
//! at 0 and only ever increase; queries are lower-open orthants.

use std::cell::Cell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Coord, Edge, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    RangeTree,
    KdTree,
    Naive,
}

/// A candidate edge with its search key. Values live in the index and start
/// at zero.
#[derive(Debug, Clone)]
pub struct IndexedCandidate {
    pub key: Vec<Coord>,
    pub id: Edge,
}

const NONE: u32 = u32::MAX;

/// Fenwick tree over value positions keeping a running prefix maximum.
/// Sound because stored values are increase-only.
struct FenwickMax {
    vals: Vec<Coord>,
    tree: Vec<u32>,
}

impl FenwickMax {
    fn new(mut vals: Vec<Coord>) -> FenwickMax {
        vals.sort_unstable();
        vals.dedup();
        let n = vals.len();
        FenwickMax {
            vals,
            tree: vec![NONE; n + 1],
        }
    }

    fn update(&mut self, v: Coord, slot: u32, values: &[Rat]) {
        let mut i = self.vals.binary_search(&v).expect("value present") + 1;
        while i < self.tree.len() {
            self.tree[i] = better(self.tree[i], slot, values);
            i += i & i.wrapping_neg();
        }
    }

    fn prefix_best(&self, bound: Coord, strict: bool, values: &[Rat], visited: &Cell<u64>) -> u32 {
        let mut i = if strict {
            self.vals.partition_point(|v| *v < bound)
        } else {
            self.vals.partition_point(|v| *v <= bound)
        };
        let mut acc = NONE;
        while i > 0 {
            visited.set(visited.get() + 1);
            acc = better(acc, self.tree[i], values);
            i -= i & i.wrapping_neg();
        }
        acc
    }
}

/// Highest value wins; ties go to the smaller slot, which is the
/// lexicographically smaller edge.
fn better(a: u32, b: u32, values: &[Rat]) -> u32 {
    match (a, b) {
        (NONE, x) | (x, NONE) => x,
        (a, b) => {
            let (va, vb) = (&values[a as usize], &values[b as usize]);
            if vb > va || (vb == va && b < a) {
                b
            } else {
                a
            }
        }
    }
}

enum Inner {
    Layer(Box<RangeLayer>),
    Fen(FenwickMax),
}

/// One axis of the layered range tree: a segment tree over the distinct axis
/// values, each node carrying a structure over the next axis for the
/// candidates in its subtree.
struct RangeLayer {
    axis: usize,
    vals: Vec<Coord>,
    /// 1-based segment tree; leaves at vals.len()..2*vals.len().
    nodes: Vec<Option<Inner>>,
}

impl RangeLayer {
    fn build(slots: &[u32], keys: &[Vec<Coord>], axis: usize, last_axis: usize) -> RangeLayer {
        let mut vals: Vec<Coord> = slots.iter().map(|&s| keys[s as usize][axis]).collect();
        vals.sort_unstable();
        vals.dedup();
        let len = vals.len();
        let mut groups: Vec<Vec<u32>> = vec![Vec::new(); 2 * len];
        for &s in slots {
            let pos = vals.binary_search(&keys[s as usize][axis]).unwrap();
            groups[len + pos].push(s);
        }
        for i in (1..len).rev() {
            let mut merged = groups[2 * i].clone();
            merged.extend_from_slice(&groups[2 * i + 1]);
            groups[i] = merged;
        }
        let nodes = groups
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                if i == 0 || g.is_empty() {
                    return None;
                }
                Some(if axis + 1 == last_axis {
                    Inner::Fen(FenwickMax::new(
                        g.iter().map(|&s| keys[s as usize][last_axis]).collect(),
                    ))
                } else {
                    Inner::Layer(Box::new(RangeLayer::build(&g, keys, axis + 1, last_axis)))
                })
            })
            .collect();
        RangeLayer { axis, vals, nodes }
    }

    fn update(&mut self, slot: u32, keys: &[Vec<Coord>], values: &[Rat]) {
        let key = &keys[slot as usize];
        let pos = self.vals.binary_search(&key[self.axis]).unwrap();
        let mut i = self.vals.len() + pos;
        loop {
            match self.nodes[i].as_mut().expect("path node populated") {
                Inner::Fen(f) => f.update(*key.last().unwrap(), slot, values),
                Inner::Layer(l) => l.update(slot, keys, values),
            }
            if i == 1 {
                break;
            }
            i >>= 1;
        }
    }

    fn query(
        &self,
        bounds: &[Coord],
        strict: &[bool],
        values: &[Rat],
        visited: &Cell<u64>,
    ) -> u32 {
        let pos = if strict[self.axis] {
            self.vals.partition_point(|v| *v < bounds[self.axis])
        } else {
            self.vals.partition_point(|v| *v <= bounds[self.axis])
        };
        let len = self.vals.len();
        let (mut l, mut r) = (len, len + pos);
        let mut acc = NONE;
        let last = bounds.len() - 1;
        while l < r {
            if l & 1 == 1 {
                acc = better(acc, self.query_node(l, bounds, strict, values, visited, last), values);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                acc = better(acc, self.query_node(r, bounds, strict, values, visited, last), values);
            }
            l >>= 1;
            r >>= 1;
        }
        acc
    }

    fn query_node(
        &self,
        i: usize,
        bounds: &[Coord],
        strict: &[bool],
        values: &[Rat],
        visited: &Cell<u64>,
        last: usize,
    ) -> u32 {
        visited.set(visited.get() + 1);
        match self.nodes[i].as_ref() {
            None => NONE,
            Some(Inner::Fen(f)) => f.prefix_best(bounds[last], strict[last], values, visited),
            Some(Inner::Layer(l)) => l.query(bounds, strict, values, visited),
        }
    }

    fn node_count(&self) -> usize {
        let mut total = 0;
        for n in self.nodes.iter().flatten() {
            total += 1;
            match n {
                Inner::Fen(f) => total += f.tree.len(),
                Inner::Layer(l) => total += l.node_count(),
            }
        }
        total
    }
}

enum KdContent {
    Leaf(u32),
    Split { left: usize, right: usize },
}

struct KdNode {
    lo: Vec<Coord>,
    hi: Vec<Coord>,
    best: u32,
    parent: usize,
    content: KdContent,
}

struct KdTree {
    nodes: Vec<KdNode>,
    leaf_of_slot: Vec<usize>,
}

impl KdTree {
    fn build(slots: &mut [u32], keys: &[Vec<Coord>]) -> KdTree {
        let mut tree = KdTree {
            nodes: Vec::new(),
            leaf_of_slot: vec![usize::MAX; keys.len()],
        };
        if !slots.is_empty() {
            tree.build_rec(slots, keys, 0, usize::MAX);
        }
        tree
    }

    fn build_rec(
        &mut self,
        slots: &mut [u32],
        keys: &[Vec<Coord>],
        depth: usize,
        parent: usize,
    ) -> usize {
        let k = keys[slots[0] as usize].len();
        let mut lo = keys[slots[0] as usize].clone();
        let mut hi = lo.clone();
        let mut best = slots[0];
        for &s in slots.iter() {
            for a in 0..k {
                lo[a] = lo[a].min(keys[s as usize][a]);
                hi[a] = hi[a].max(keys[s as usize][a]);
            }
            best = best.min(s); // all values start 0: smallest slot wins
        }
        let idx = self.nodes.len();
        self.nodes.push(KdNode {
            lo,
            hi,
            best,
            parent,
            content: KdContent::Leaf(0),
        });
        if slots.len() == 1 {
            self.nodes[idx].content = KdContent::Leaf(slots[0]);
            self.leaf_of_slot[slots[0] as usize] = idx;
            return idx;
        }
        let axis = depth % k;
        slots.sort_unstable_by_key(|&s| (keys[s as usize][axis], s));
        let mid = slots.len() / 2;
        let (ls, rs) = slots.split_at_mut(mid);
        let left = self.build_rec(ls, keys, depth + 1, idx);
        let right = self.build_rec(rs, keys, depth + 1, idx);
        self.nodes[idx].content = KdContent::Split { left, right };
        idx
    }

    fn update(&mut self, slot: u32, values: &[Rat]) {
        let mut i = self.leaf_of_slot[slot as usize];
        loop {
            let recomputed = match self.nodes[i].content {
                KdContent::Leaf(s) => s,
                KdContent::Split { left, right } => {
                    better(self.nodes[left].best, self.nodes[right].best, values)
                }
            };
            self.nodes[i].best = recomputed;
            if self.nodes[i].parent == usize::MAX {
                break;
            }
            i = self.nodes[i].parent;
        }
    }

    fn query(
        &self,
        i: usize,
        bounds: &[Coord],
        strict: &[bool],
        values: &[Rat],
        acc: u32,
        visited: &Cell<u64>,
    ) -> u32 {
        visited.set(visited.get() + 1);
        let node = &self.nodes[i];
        // subtree cannot beat what we already have
        if acc != NONE && better(node.best, acc, values) == acc && node.best != acc {
            return acc;
        }
        let mut inside = true;
        for a in 0..bounds.len() {
            let lo_ok = if strict[a] {
                node.lo[a] < bounds[a]
            } else {
                node.lo[a] <= bounds[a]
            };
            if !lo_ok {
                return acc; // disjoint
            }
            let hi_ok = if strict[a] {
                node.hi[a] < bounds[a]
            } else {
                node.hi[a] <= bounds[a]
            };
            inside &= hi_ok;
        }
        if inside {
            return better(acc, node.best, values);
        }
        match node.content {
            KdContent::Leaf(_) => acc, // leaf key outside the box
            KdContent::Split { left, right } => {
                let acc = self.query(left, bounds, strict, values, acc, visited);
                self.query(right, bounds, strict, values, acc, visited)
            }
        }
    }
}

enum Backend {
    Naive,
    RangeTree(Option<RangeLayer>),
    KdTree(KdTree),
}

/// A static max-aggregate index over candidate edges with increase-only point
/// updates and lower-open orthant max queries.
pub struct ChainIndex {
    keys: Vec<Vec<Coord>>,
    ids: Vec<Edge>,
    slot_of: HashMap<Edge, u32>,
    values: Vec<Rat>,
    backend: Backend,
    visited: Cell<u64>,
}

impl ChainIndex {
    /// Builds the index; all candidate values start at 0. Candidate ids must
    /// be unique.
    pub fn build(mut candidates: Vec<IndexedCandidate>, kind: IndexKind) -> Result<ChainIndex> {
        candidates.sort_by_key(|c| c.id);
        let keys: Vec<Vec<Coord>> = candidates.iter().map(|c| c.key.clone()).collect();
        let ids: Vec<Edge> = candidates.iter().map(|c| c.id).collect();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate candidate id ({}, {})",
                w[0].p_idx, w[0].q_idx
            )));
        }
        if let Some(k) = keys.first().map(|k| k.len()) {
            if keys.iter().any(|key| key.len() != k) {
                return Err(Error::Validation("candidate keys of mixed dimension".into()));
            }
        }
        let slot_of = ids
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let mut slots: Vec<u32> = (0..keys.len() as u32).collect();
        let values = vec![Rat::from_integer(0); keys.len()];
        let backend = match kind {
            IndexKind::Naive => Backend::Naive,
            IndexKind::KdTree => Backend::KdTree(KdTree::build(&mut slots, &keys)),
            IndexKind::RangeTree => {
                if keys.is_empty() {
                    Backend::RangeTree(None)
                } else {
                    let k = keys[0].len();
                    if k < 2 {
                        return Err(Error::Validation(
                            "range tree needs keys of at least 2 axes".into(),
                        ));
                    }
                    let mut layer = RangeLayer::build(&slots, &keys, 0, k - 1);
                    // make the initial zero values visible to queries
                    for s in 0..keys.len() as u32 {
                        layer.update(s, &keys, &values);
                    }
                    Backend::RangeTree(Some(layer))
                }
            }
        };
        Ok(ChainIndex {
            keys,
            ids,
            slot_of,
            values,
            backend,
            visited: Cell::new(0),
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Maximum value among candidates inside the lower orthant given by
    /// per-axis upper bounds, together with the edge attaining it (smallest
    /// edge on value ties). None if no candidate lies in the box.
    pub fn query_max(&self, bounds: &[Coord], strict: &[bool]) -> Option<(Edge, Rat)> {
        assert_eq!(bounds.len(), strict.len());
        let slot = match &self.backend {
            Backend::Naive => {
                let mut acc = NONE;
                for (s, key) in self.keys.iter().enumerate() {
                    self.visited.set(self.visited.get() + 1);
                    let inside = key.iter().enumerate().all(|(a, v)| {
                        if strict[a] {
                            *v < bounds[a]
                        } else {
                            *v <= bounds[a]
                        }
                    });
                    if inside {
                        acc = better(acc, s as u32, &self.values);
                    }
                }
                acc
            }
            Backend::KdTree(t) => {
                if t.nodes.is_empty() {
                    NONE
                } else {
                    t.query(0, bounds, strict, &self.values, NONE, &self.visited)
                }
            }
            Backend::RangeTree(layer) => match layer {
                None => NONE,
                Some(l) => l.query(bounds, strict, &self.values, &self.visited),
            },
        };
        if slot == NONE {
            None
        } else {
            Some((self.ids[slot as usize], self.values[slot as usize]))
        }
    }

    /// Raises the value of `id` to `value`. Values are increase-only.
    pub fn update(&mut self, id: Edge, value: Rat) -> Result<()> {
        let slot = *self
            .slot_of
            .get(&id)
            .ok_or_else(|| Error::Validation(format!("unknown id ({}, {})", id.p_idx, id.q_idx)))?;
        if value < self.values[slot as usize] {
            return Err(Error::Contract(format!(
                "decreasing update for ({}, {}): {} -> {}",
                id.p_idx, id.q_idx, self.values[slot as usize], value
            )));
        }
        self.values[slot as usize] = value;
        match &mut self.backend {
            Backend::Naive => {}
            Backend::KdTree(t) => t.update(slot, &self.values),
            Backend::RangeTree(layer) => {
                layer
                    .as_mut()
                    .expect("nonempty")
                    .update(slot, &self.keys, &self.values);
            }
        }
        Ok(())
    }

    pub fn value_of(&self, id: Edge) -> Option<Rat> {
        self.slot_of.get(&id).map(|&s| self.values[s as usize])
    }

    /// Structure size, for complexity audits.
    pub fn node_count(&self) -> usize {
        match &self.backend {
            Backend::Naive => self.keys.len(),
            Backend::KdTree(t) => t.nodes.len(),
            Backend::RangeTree(None) => 0,
            Backend::RangeTree(Some(l)) => l.node_count(),
        }
    }

    /// Cumulative count of structure nodes touched by queries.
    pub fn nodes_visited(&self) -> u64 {
        self.visited.get()
    }

    pub fn reset_visit_counter(&self) {
        self.visited.set(0);
    }
}
