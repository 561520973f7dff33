//! Brute-force oracles used to cross-check the production algorithms. Every
//! function here is deliberately simple, exponential where necessary, and
//! shares no code path with the implementation it validates.

use num_traits::Zero;

use crate::model::{
    coords_conflict, edge_weight, strictly_dominates, Dataset, Edge, Matching, Rat, WeightSpec,
};

/// Maximum weight over every injective, non-conflicting edge subset, found by
/// enumerating assignments of each P point in turn.
pub fn enumerate_max_weight(p: &Dataset, q: &Dataset, w: &WeightSpec) -> Rat {
    fn go(
        p: &Dataset,
        q: &Dataset,
        w: &WeightSpec,
        i: usize,
        q_used: &mut Vec<bool>,
        chosen: &mut Vec<Edge>,
        best: &mut Rat,
        cur: Rat,
    ) {
        if cur > *best {
            *best = cur;
        }
        if i == p.len() {
            return;
        }
        go(p, q, w, i + 1, q_used, chosen, best, cur);
        for j in 0..q.len() {
            if q_used[j] {
                continue;
            }
            let e = Edge::new(i, j);
            let ok = chosen.iter().all(|c| {
                !coords_conflict(
                    &p.point(e.p_idx).coords,
                    &p.point(c.p_idx).coords,
                    &q.point(e.q_idx).coords,
                    &q.point(c.q_idx).coords,
                )
            });
            if !ok {
                continue;
            }
            let wt = edge_weight(p.point(i), q.point(j), w).unwrap();
            q_used[j] = true;
            chosen.push(e);
            go(p, q, w, i + 1, q_used, chosen, best, cur + wt);
            chosen.pop();
            q_used[j] = false;
        }
    }
    let mut best = Rat::zero();
    let mut q_used = vec![false; q.len()];
    let mut chosen = Vec::new();
    go(p, q, w, 0, &mut q_used, &mut chosen, &mut best, Rat::zero());
    best
}

/// Maximum weight together with the number of distinct matchings attaining
/// it and one witness. Same enumeration as [`enumerate_max_weight`]; a
/// matching counts once per edge set.
pub fn enumerate_optima(p: &Dataset, q: &Dataset, w: &WeightSpec) -> (Rat, usize, Matching) {
    struct State {
        best: Rat,
        ties: usize,
        witness: Vec<Edge>,
    }
    fn go(
        p: &Dataset,
        q: &Dataset,
        w: &WeightSpec,
        i: usize,
        q_used: &mut Vec<bool>,
        chosen: &mut Vec<Edge>,
        st: &mut State,
        cur: Rat,
    ) {
        if i == p.len() {
            if cur > st.best {
                st.best = cur;
                st.ties = 1;
                st.witness = chosen.clone();
            } else if cur == st.best {
                st.ties += 1;
            }
            return;
        }
        go(p, q, w, i + 1, q_used, chosen, st, cur.clone());
        for j in 0..q.len() {
            if q_used[j] {
                continue;
            }
            let e = Edge::new(i, j);
            let ok = chosen.iter().all(|c| {
                !coords_conflict(
                    &p.point(e.p_idx).coords,
                    &p.point(c.p_idx).coords,
                    &q.point(e.q_idx).coords,
                    &q.point(c.q_idx).coords,
                )
            });
            if !ok {
                continue;
            }
            let wt = edge_weight(p.point(i), q.point(j), w).unwrap();
            q_used[j] = true;
            chosen.push(e);
            go(p, q, w, i + 1, q_used, chosen, st, cur.clone() + wt);
            chosen.pop();
            q_used[j] = false;
        }
    }
    let mut st = State {
        best: Rat::zero(),
        ties: 0,
        witness: Vec::new(),
    };
    let mut q_used = vec![false; q.len()];
    go(p, q, w, 0, &mut q_used, &mut Vec::new(), &mut st, Rat::zero());
    (st.best, st.ties, Matching::from_edges(st.witness))
}

/// Exact conflict mass of candidate `e`: total weight of candidate edges that
/// are disjoint from `e`, have both endpoints unmatched, do not conflict with
/// `m`, and conflict with `e`. Direct pair enumeration.
pub fn conflict_score_enumerated(
    e: &Edge,
    p: &Dataset,
    q: &Dataset,
    m: &Matching,
    w: &WeightSpec,
) -> Rat {
    let mut total = Rat::zero();
    for i in 0..p.len() {
        if i == e.p_idx || m.contains_p(i) {
            continue;
        }
        for j in 0..q.len() {
            if j == e.q_idx || m.contains_q(j) {
                continue;
            }
            let cand = Edge::new(i, j);
            let survives = m.edges().all(|me| {
                !coords_conflict(
                    &p.point(cand.p_idx).coords,
                    &p.point(me.p_idx).coords,
                    &q.point(cand.q_idx).coords,
                    &q.point(me.q_idx).coords,
                )
            });
            if !survives {
                continue;
            }
            if coords_conflict(
                &p.point(e.p_idx).coords,
                &p.point(cand.p_idx).coords,
                &q.point(e.q_idx).coords,
                &q.point(cand.q_idx).coords,
            ) {
                total += edge_weight(p.point(i), q.point(j), w).unwrap();
            }
        }
    }
    total
}

/// Heaviest strictly-monotone-increasing chain of candidate edges compatible
/// with `m`, by depth-first enumeration of every chain.
pub fn enumerate_best_chain_weight(
    p: &Dataset,
    q: &Dataset,
    m: &Matching,
    w: &WeightSpec,
) -> Rat {
    let mut cands: Vec<(Edge, Rat)> = Vec::new();
    for i in 0..p.len() {
        if m.contains_p(i) {
            continue;
        }
        for j in 0..q.len() {
            if m.contains_q(j) {
                continue;
            }
            let e = Edge::new(i, j);
            let clean = m.edges().all(|me| {
                !coords_conflict(
                    &p.point(e.p_idx).coords,
                    &p.point(me.p_idx).coords,
                    &q.point(e.q_idx).coords,
                    &q.point(me.q_idx).coords,
                )
            });
            if clean {
                cands.push((e, edge_weight(p.point(i), q.point(j), w).unwrap()));
            }
        }
    }
    fn extends(p: &Dataset, q: &Dataset, prev: &Edge, next: &Edge) -> bool {
        strictly_dominates(&p.point(prev.p_idx).coords, &p.point(next.p_idx).coords)
            && strictly_dominates(&q.point(prev.q_idx).coords, &q.point(next.q_idx).coords)
    }
    fn go(
        p: &Dataset,
        q: &Dataset,
        cands: &[(Edge, Rat)],
        last: Option<&Edge>,
        cur: Rat,
        best: &mut Rat,
    ) {
        if cur > *best {
            *best = cur;
        }
        for (e, wt) in cands {
            let ok = match last {
                None => true,
                Some(prev) => extends(p, q, prev, e),
            };
            if ok {
                go(p, q, cands, Some(e), cur + *wt, best);
            }
        }
    }
    let mut best = Rat::zero();
    go(p, q, &cands, None, Rat::zero(), &mut best);
    best
}

/// True iff `pattern` occurs in `text` as an order-isomorphic subsequence.
/// Plain backtracking over positions.
pub fn pattern_contains(text: &[usize], pattern: &[usize]) -> bool {
    fn go(text: &[usize], pattern: &[usize], chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == pattern.len() {
            return true;
        }
        let start = chosen.last().map_or(0, |&i| i + 1);
        let next = chosen.len();
        for pos in start..text.len() {
            let ok = (0..next).all(|r| {
                (text[chosen[r]] < text[pos]) == (pattern[r] < pattern[next])
            });
            if ok {
                chosen.push(pos);
                if go(text, pattern, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if pattern.len() > text.len() {
        return false;
    }
    go(text, pattern, &mut Vec::new())
}
