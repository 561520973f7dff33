//! Greedy matching by repeatedly committing the heaviest monotone chain of
//! candidate edges. A chain is a sequence of edges whose P points and Q points
//! are both strictly increasing on every axis (or both strictly decreasing on
//! the non-primary axes for the decreasing variant).
//!
//! The heaviest chain is found with one sweep in lexicographic candidate
//! order, scoring each candidate as its weight plus the best score inside the
//! strictly-dominated box, looked up in an orthogonal range index.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{
    coords_conflict, edge_weight, Coord, Dataset, Edge, Matching, Rat, WeightSpec,
};
use crate::rangeindex::{ChainIndex, IndexKind, IndexedCandidate};

/// Chain direction selector for the greedy matcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Increasing,
    Decreasing,
    /// Per iteration, take the heavier of the best increasing and best
    /// decreasing chain (ties prefer increasing).
    Mix,
}

/// A monotone chain of edges, listed in increasing chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub edges: Vec<Edge>,
    pub weight: Rat,
}

impl Chain {
    pub fn empty() -> Chain {
        Chain {
            edges: Vec::new(),
            weight: Rat::zero(),
        }
    }
}

/// Candidate edges available next to `m`: endpoints unmatched and no conflict
/// with any committed edge. Lexicographic (p_idx, q_idx) order.
pub fn candidate_edges(p: &Dataset, q: &Dataset, m: &Matching) -> Vec<Edge> {
    let committed: Vec<(&[Coord], &[Coord])> = m
        .edges()
        .map(|e| {
            (
                p.point(e.p_idx).coords.as_slice(),
                q.point(e.q_idx).coords.as_slice(),
            )
        })
        .collect();
    let p_free: Vec<bool> = (0..p.len()).map(|i| !m.contains_p(i)).collect();
    let q_free: Vec<bool> = (0..q.len()).map(|j| !m.contains_q(j)).collect();
    let mut out = Vec::new();
    for i in 0..p.len() {
        if !p_free[i] {
            continue;
        }
        for j in 0..q.len() {
            if !q_free[j] {
                continue;
            }
            let pc = p.point(i).coords.as_slice();
            let qc = q.point(j).coords.as_slice();
            if committed
                .iter()
                .all(|&(mp, mq)| !coords_conflict(pc, mp, qc, mq))
            {
                out.push(Edge::new(i, j));
            }
        }
    }
    out
}

/// Heaviest strictly increasing chain among the candidate edges compatible
/// with `m`. One sweep in lexicographic order of (P coords, Q coords); a
/// candidate's box predecessor is any already-swept candidate strictly smaller
/// on every remaining key axis. Candidates sharing the first P axis value are
/// scored before any of them is inserted, so a same-value candidate can never
/// serve as a predecessor.
pub fn heaviest_monotone_chain(
    p: &Dataset,
    q: &Dataset,
    m: &Matching,
    w: &WeightSpec,
    kind: IndexKind,
) -> Result<Chain> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    if p.dim() < 2 {
        return Err(Error::Validation(
            "monotone chains need at least 2 dimensions".into(),
        ));
    }
    let cands = candidate_edges(p, q, m);
    if cands.is_empty() {
        return Ok(Chain::empty());
    }
    // key: P coords minus the primary axis, then all Q coords
    let key_of = |e: &Edge| -> Vec<Coord> {
        let mut k: Vec<Coord> = p.point(e.p_idx).coords[1..].to_vec();
        k.extend_from_slice(&q.point(e.q_idx).coords);
        k
    };
    let indexed = cands
        .iter()
        .map(|e| IndexedCandidate {
            key: key_of(e),
            id: *e,
        })
        .collect();
    let mut index = ChainIndex::build(indexed, kind)?;
    let strict = vec![true; 2 * p.dim() - 1];

    // sweep in lex order of (P coords, Q coords); since both datasets are
    // stored sorted, candidate_edges already emits that order
    let mut info: HashMap<Edge, (Rat, Option<Edge>)> = HashMap::with_capacity(cands.len());
    let mut best: Option<(Rat, Edge)> = None;
    let mut pending: Vec<(Edge, Rat)> = Vec::new();
    let mut group_val: Option<Coord> = None;
    for e in &cands {
        let x = p.point(e.p_idx).coords[0];
        if group_val != Some(x) {
            for (pe, score) in pending.drain(..) {
                index.update(pe, score)?;
            }
            group_val = Some(x);
        }
        let wt = edge_weight(p.point(e.p_idx), q.point(e.q_idx), w)?;
        debug_assert!(wt > Rat::zero());
        let key = key_of(e);
        // unflushed candidates sit in the index at their initial value 0;
        // flushed ones carry their strictly positive chain score, so a
        // positive hit is exactly a valid predecessor
        let (score, pred) = match index.query_max(&key, &strict) {
            Some((pred, pred_score)) if pred_score > Rat::zero() => (wt + pred_score, Some(pred)),
            _ => (wt, None),
        };
        info.insert(*e, (score, pred));
        pending.push((*e, score));
        let improves = match &best {
            None => true,
            Some((bs, _)) => score > *bs,
        };
        if improves {
            best = Some((score, *e));
        }
    }
    let (weight, last) = best.expect("nonempty candidates");
    let mut edges = Vec::new();
    let mut cur = Some(last);
    while let Some(e) = cur {
        edges.push(e);
        cur = info[&e].1;
    }
    edges.reverse();
    Ok(Chain { edges, weight })
}

/// Index mapping from a dataset with negated non-primary axes back to the
/// original point indices.
fn negated_view(ds: &Dataset) -> (Dataset, Vec<usize>) {
    let axes: Vec<usize> = (1..ds.dim()).collect();
    let neg = ds.negate_axes(&axes);
    let back = neg
        .points()
        .iter()
        .map(|pt| {
            let mut c = pt.coords.clone();
            for &a in &axes {
                c[a] = -c[a];
            }
            ds.find(&c).expect("negation is a bijection")
        })
        .collect();
    (neg, back)
}

fn remap(chain: Chain, p_back: &[usize], q_back: &[usize]) -> Chain {
    Chain {
        edges: chain
            .edges
            .iter()
            .map(|e| Edge::new(p_back[e.p_idx], q_back[e.q_idx]))
            .collect(),
        weight: chain.weight,
    }
}

/// Iteration trace of the greedy matcher.
#[derive(Debug, Clone, Default)]
pub struct GreedyTrace {
    pub iterations: usize,
    pub chain_lengths: Vec<usize>,
}

/// Greedy matching: repeatedly find the heaviest monotone chain compatible
/// with the committed edges and commit it whole, until no candidate remains.
pub fn greedy_monotone(
    p: &Dataset,
    q: &Dataset,
    mode: ChainMode,
    w: &WeightSpec,
    kind: IndexKind,
) -> Result<(Matching, GreedyTrace)> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    let need_dec = mode != ChainMode::Increasing;
    let negated = if need_dec {
        let (pn, pb) = negated_view(p);
        let (qn, qb) = negated_view(q);
        Some((pn, pb, qn, qb))
    } else {
        None
    };
    let mut m = Matching::new();
    let mut trace = GreedyTrace::default();
    loop {
        let inc = if mode == ChainMode::Decreasing {
            Chain::empty()
        } else {
            heaviest_monotone_chain(p, q, &m, w, kind)?
        };
        let dec = match &negated {
            None => Chain::empty(),
            Some((pn, pb, qn, qb)) => {
                let mn = Matching::from_edges(m.edges().map(|e| {
                    Edge::new(
                        pb.iter().position(|&o| o == e.p_idx).unwrap(),
                        qb.iter().position(|&o| o == e.q_idx).unwrap(),
                    )
                }));
                remap(heaviest_monotone_chain(pn, qn, &mn, w, kind)?, pb, qb)
            }
        };
        let chain = match mode {
            ChainMode::Increasing => inc,
            ChainMode::Decreasing => dec,
            ChainMode::Mix => {
                if dec.weight > inc.weight {
                    dec
                } else {
                    inc
                }
            }
        };
        if chain.edges.is_empty() {
            break;
        }
        trace.iterations += 1;
        trace.chain_lengths.push(chain.edges.len());
        for e in chain.edges {
            m.insert(e);
        }
    }
    Ok((m, trace))
}
