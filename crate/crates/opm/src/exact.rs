//! Exact maximum-weight order-preserving matching via branch-and-bound over
//! candidate edges. Intended for desk-scale instances where it serves as the
//! ground-truth oracle for the heuristic matchers; it does not scale to
//! real-dataset sizes.

use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{
    coords_conflict, edge_weight, Dataset, Edge, Matching, Rat, WeightSpec,
};

/// Caps on the search effort.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    /// Maximum allowed min(|P|, |Q|).
    pub max_points: usize,
    /// Maximum number of explored search nodes.
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_points: 16,
            max_nodes: 50_000_000,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub matching: Matching,
    pub weight: Rat,
    /// True iff the search ran to completion within the budget.
    pub proof_of_optimality: bool,
    pub nodes_explored: u64,
}

struct Candidate {
    edge: Edge,
    weight: Rat,
}

struct Search<'a> {
    cands: &'a [Candidate],
    p_coords: Vec<&'a [i64]>,
    q_coords: Vec<&'a [i64]>,
    p_used: Vec<bool>,
    q_used: Vec<bool>,
    chosen: Vec<usize>,
    best_edges: Vec<Edge>,
    best_weight: Rat,
    root_bound: Rat,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
    truncated: bool,
}

impl<'a> Search<'a> {
    fn out_of_budget(&mut self) -> bool {
        if self.truncated {
            return true;
        }
        if self.nodes > self.max_nodes {
            self.truncated = true;
            return true;
        }
        if self.nodes % 1024 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    self.truncated = true;
                    return true;
                }
            }
        }
        false
    }

    /// Admissible bound on the weight still addable from candidate `k` on:
    /// for every unmatched P point, the best remaining edge to an unmatched Q
    /// point, ignoring conflicts.
    fn bound(&self, k: usize) -> Rat {
        let mut total = Rat::zero();
        let mut cur_p = usize::MAX;
        let mut cur_best = Rat::zero();
        for c in &self.cands[k..] {
            if c.edge.p_idx != cur_p {
                total += cur_best;
                cur_p = c.edge.p_idx;
                cur_best = Rat::zero();
            }
            if !self.p_used[c.edge.p_idx] && !self.q_used[c.edge.q_idx] && c.weight > cur_best {
                cur_best = c.weight;
            }
        }
        total + cur_best
    }

    fn compatible(&self, edge: &Edge) -> bool {
        if self.p_used[edge.p_idx] || self.q_used[edge.q_idx] {
            return false;
        }
        self.chosen.iter().all(|&ci| {
            let other = &self.cands[ci].edge;
            !coords_conflict(
                self.p_coords[edge.p_idx],
                self.p_coords[other.p_idx],
                self.q_coords[edge.q_idx],
                self.q_coords[other.q_idx],
            )
        })
    }

    fn record_if_better(&mut self, cur: Rat) {
        if cur > self.best_weight {
            self.best_weight = cur;
            self.best_edges = self.chosen.iter().map(|&ci| self.cands[ci].edge).collect();
        }
    }

    fn dfs(&mut self, k: usize, cur: Rat) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        self.record_if_better(cur);
        if k == self.cands.len() || self.best_weight == self.root_bound {
            return;
        }
        if cur + self.bound(k) <= self.best_weight {
            return;
        }
        let edge = self.cands[k].edge;
        if self.compatible(&edge) {
            self.p_used[edge.p_idx] = true;
            self.q_used[edge.q_idx] = true;
            self.chosen.push(k);
            self.dfs(k + 1, cur + self.cands[k].weight);
            self.chosen.pop();
            self.p_used[edge.p_idx] = false;
            self.q_used[edge.q_idx] = false;
        }
        self.dfs(k + 1, cur);
    }
}

/// Finds a maximum-weight order-preserving matching. Candidate edges are
/// branched on in lexicographic (p_idx, q_idx) order, so the result is
/// deterministic. If the budget runs out, the best matching found so far is
/// returned with `proof_of_optimality` false.
pub fn exact_max_matching(
    p: &Dataset,
    q: &Dataset,
    w: &WeightSpec,
    budget: &SearchBudget,
) -> Result<ExactResult> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    let small = p.len().min(q.len());
    if small > budget.max_points {
        return Err(Error::SizeLimit {
            got: small,
            cap: budget.max_points,
        });
    }
    let mut cands = Vec::with_capacity(p.len() * q.len());
    for i in 0..p.len() {
        for j in 0..q.len() {
            cands.push(Candidate {
                edge: Edge::new(i, j),
                weight: edge_weight(p.point(i), q.point(j), w)?,
            });
        }
    }
    let mut search = Search {
        cands: &cands,
        p_coords: p.points().iter().map(|pt| pt.coords.as_slice()).collect(),
        q_coords: q.points().iter().map(|pt| pt.coords.as_slice()).collect(),
        p_used: vec![false; p.len()],
        q_used: vec![false; q.len()],
        chosen: Vec::new(),
        best_edges: Vec::new(),
        best_weight: Rat::zero(),
        root_bound: Rat::zero(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        deadline: budget.time_limit.map(|d| Instant::now() + d),
        truncated: false,
    };
    search.root_bound = search.bound(0);
    search.dfs(0, Rat::zero());
    Ok(ExactResult {
        matching: Matching::from_edges(search.best_edges.iter().copied()),
        weight: search.best_weight,
        proof_of_optimality: !search.truncated,
        nodes_explored: search.nodes,
    })
}
