//! Attack-quality and dataset-similarity metrics: recovery rates against the
//! ground truth, their normalizations by the achievable upper bound, the
//! objective ratio against the provably optimal matching, overlap ratios, and
//! the Hellinger distance between frequency distributions.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::datagen::Truth;
use crate::error::{Error, Result};
use crate::model::{Coord, Dataset, Matching, Rat};

/// Per-target-point plaintext assignment, indexed like the Q dataset.
pub type Assignment = Vec<Option<Vec<Coord>>>;

/// Assignment induced by a matching: each matched Q point gets its partner's
/// coordinates.
pub fn assignment_from_matching(m: &Matching, p: &Dataset, q: &Dataset) -> Assignment {
    let mut out = vec![None; q.len()];
    for e in m.edges() {
        out[e.q_idx] = Some(p.point(e.p_idx).coords.clone());
    }
    out
}

fn correct(assignment: &Assignment, q: &Dataset, truth: &Truth, idx: usize) -> bool {
    match (&assignment[idx], truth.map.get(&q.point(idx).coords)) {
        (Some(a), Some(t)) => a == t,
        _ => false,
    }
}

/// Fraction of target points assigned their true coordinates. Unassigned
/// points count as incorrect.
pub fn point_recovery_rate(assignment: &Assignment, q: &Dataset, truth: &Truth) -> Rat {
    let hits = (0..q.len()).filter(|&i| correct(assignment, q, truth, i)).count();
    Rat::new(hits as i128, q.len() as i128)
}

/// Frequency-weighted recovery: the share of records sitting on correctly
/// assigned points.
pub fn record_recovery_rate(assignment: &Assignment, q: &Dataset, truth: &Truth) -> Rat {
    (0..q.len())
        .filter(|&i| correct(assignment, q, truth, i))
        .map(|i| q.point(i).freq)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    Point,
    Record,
}

/// Indices of recoverable targets: Q points whose true plaintext exists.
fn recoverable(q: &Dataset, truth: &Truth) -> Vec<usize> {
    (0..q.len())
        .filter(|&i| truth.map.contains_key(&q.point(i).coords))
        .collect()
}

/// Raw rate divided by its achievable upper bound: the share of Q (by points
/// or records) that has a true counterpart at all.
pub fn normalized_recovery(raw: Rat, q: &Dataset, truth: &Truth, kind: RateKind) -> Result<Rat> {
    let rec = recoverable(q, truth);
    let bound = match kind {
        RateKind::Point => Rat::new(rec.len() as i128, q.len() as i128),
        RateKind::Record => rec.iter().map(|&i| q.point(i).freq).sum(),
    };
    if bound.is_zero() {
        return Err(Error::UndefinedMetric(
            "no recoverable targets: upper bound is 0",
        ));
    }
    Ok(raw / bound)
}

/// Achieved objective over the proven optimum.
pub fn normalized_objective(achieved: Rat, exact: Rat) -> Result<Rat> {
    if exact.is_zero() {
        return Err(Error::UndefinedMetric("optimal objective is 0"));
    }
    Ok(achieved / exact)
}

/// Effective data density: recoverable targets over auxiliary points. With an
/// axis, the ratio of distinct axis values instead.
pub fn overlap_ratio(p: &Dataset, q: &Dataset, truth: &Truth, axis: Option<usize>) -> Rat {
    let rec = recoverable(q, truth);
    match axis {
        None => Rat::new(rec.len() as i128, p.len() as i128),
        Some(a) => {
            let qv: BTreeSet<Coord> = rec.iter().map(|&i| q.point(i).coords[a]).collect();
            let pv: BTreeSet<Coord> = p.points().iter().map(|pt| pt.coords[a]).collect();
            Rat::new(qv.len() as i128, pv.len() as i128)
        }
    }
}

/// Hellinger distance between the two frequency distributions over the union
/// of their supports. In [0, 1]; 0 iff identical, 1 iff disjoint.
pub fn hellinger(p: &Dataset, q: &Dataset) -> f64 {
    let support: BTreeSet<&[Coord]> = p
        .points()
        .iter()
        .chain(q.points().iter())
        .map(|pt| pt.coords.as_slice())
        .collect();
    let as_f64 = |r: Rat| *r.numer() as f64 / *r.denom() as f64;
    let mut sum = 0.0;
    for coords in support {
        let fp = p.find(coords).map_or(0.0, |i| as_f64(p.point(i).freq));
        let fq = q.find(coords).map_or(0.0, |i| as_f64(q.point(i).freq));
        let d = fp.sqrt() - fq.sqrt();
        sum += d * d;
    }
    (sum.sqrt() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Bundle of every metric for one attack run.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub point_recovery: Rat,
    pub record_recovery: Rat,
    pub normalized_point_recovery: Option<Rat>,
    pub normalized_record_recovery: Option<Rat>,
    /// achieved / optimal objective; only present when a proven optimum is
    /// supplied
    pub normalized_objective: Option<Rat>,
    pub overlap_ratio_2d: Rat,
    pub overlap_ratio_per_axis: Vec<Rat>,
    pub hellinger: f64,
    pub runtime_seconds: f64,
}

impl MetricsReport {
    pub fn compute(
        assignment: &Assignment,
        p: &Dataset,
        q: &Dataset,
        truth: &Truth,
        objective: Option<(Rat, Rat)>,
        runtime_seconds: f64,
    ) -> MetricsReport {
        let point = point_recovery_rate(assignment, q, truth);
        let record = record_recovery_rate(assignment, q, truth);
        MetricsReport {
            point_recovery: point,
            record_recovery: record,
            normalized_point_recovery: normalized_recovery(point, q, truth, RateKind::Point).ok(),
            normalized_record_recovery: normalized_recovery(record, q, truth, RateKind::Record)
                .ok(),
            normalized_objective: objective
                .and_then(|(achieved, exact)| normalized_objective(achieved, exact).ok()),
            overlap_ratio_2d: overlap_ratio(p, q, truth, None),
            overlap_ratio_per_axis: (0..q.dim())
                .map(|a| overlap_ratio(p, q, truth, Some(a)))
                .collect(),
            hellinger: hellinger(p, q),
            runtime_seconds,
        }
    }
}
