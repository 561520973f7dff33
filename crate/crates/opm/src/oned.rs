//! The 1-D max-weight non-crossing matching baseline and its per-axis
//! extension to multi-dimensional data, used for comparison against the joint
//! 2-D algorithms.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Coord, Dataset, Rat};

/// Cumulative distribution over sorted distinct 1-D values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdfTable {
    values: Vec<Coord>,
    cum: Vec<Rat>,
}

impl CdfTable {
    pub fn values(&self) -> &[Coord] {
        &self.values
    }

    pub fn cum(&self) -> &[Rat] {
        &self.cum
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds a CDF table from (value, frequency) pairs. Duplicate values are
/// merged; frequencies are renormalized so the last entry is exactly 1.
pub fn build_cdf(values_with_freq: &[(Coord, Rat)]) -> Result<CdfTable> {
    let mut merged: BTreeMap<Coord, Rat> = BTreeMap::new();
    for &(v, f) in values_with_freq {
        if f < Rat::zero() {
            return Err(Error::Validation(format!("negative frequency for {v}")));
        }
        *merged.entry(v).or_insert_with(Rat::zero) += f;
    }
    let total: Rat = merged.values().cloned().sum();
    if total.is_zero() {
        return Err(Error::EmptyInput("no positive frequency"));
    }
    let mut values = Vec::with_capacity(merged.len());
    let mut cum = Vec::with_capacity(merged.len());
    let mut acc = Rat::zero();
    for (v, f) in merged {
        acc += f;
        values.push(v);
        cum.push(acc / total);
    }
    Ok(CdfTable { values, cum })
}

/// Marginal CDF of one axis of a dataset (frequencies summed over points
/// sharing the axis value).
pub fn marginal_cdf(ds: &Dataset, axis: usize) -> Result<CdfTable> {
    let pairs: Vec<(Coord, Rat)> = ds
        .points()
        .iter()
        .map(|p| (p.coords[axis], p.freq))
        .collect();
    build_cdf(&pairs)
}

fn pair_weight(a: &CdfTable, b: &CdfTable, i: usize, j: usize, kappa: Rat) -> Rat {
    let d = a.cum[i] - b.cum[j];
    let d = if d < Rat::zero() { -d } else { d };
    kappa - d
}

/// Max-weight non-crossing matching between the entries of two CDF tables,
/// weight kappa - |F_A(i) - F_B(j)|. Returns index pairs strictly increasing
/// in both components. O(|A| * |B|) dynamic program.
///
/// Ties prefer taking the match, then advancing in A.
pub fn max_weight_noncrossing(a: &CdfTable, b: &CdfTable, kappa: Rat) -> Vec<(usize, usize)> {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // best[i][j]: optimum over prefixes a[..i], b[..j]
    let mut best = vec![vec![Rat::zero(); m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let take = best[i - 1][j - 1] + pair_weight(a, b, i - 1, j - 1, kappa);
            best[i][j] = take.max(best[i - 1][j]).max(best[i][j - 1]);
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        let take = best[i - 1][j - 1] + pair_weight(a, b, i - 1, j - 1, kappa);
        if best[i][j] == take {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if best[i][j] == best[i - 1][j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    pairs
}

/// Per-axis 1-D attack on multi-dimensional data: each axis is matched
/// independently on its marginal CDFs, and a target point is assigned the
/// tuple of matched axis values. A point with any unmatched axis value stays
/// unassigned (counted as incorrect by the metrics).
pub fn extended_1d_attack(
    p: &Dataset,
    q: &Dataset,
    kappa: Rat,
) -> Result<Vec<Option<Vec<Coord>>>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    let dim = p.dim();
    let mut axis_maps: Vec<BTreeMap<Coord, Coord>> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let q_cdf = marginal_cdf(q, axis)?;
        let p_cdf = marginal_cdf(p, axis)?;
        let pairs = max_weight_noncrossing(&q_cdf, &p_cdf, kappa);
        let map = pairs
            .into_iter()
            .map(|(qi, pi)| (q_cdf.values[qi], p_cdf.values[pi]))
            .collect();
        axis_maps.push(map);
    }
    Ok(q
        .points()
        .iter()
        .map(|qp| {
            let mut assigned = Vec::with_capacity(dim);
            for axis in 0..dim {
                match axis_maps[axis].get(&qp.coords[axis]) {
                    Some(&v) => assigned.push(v),
                    None => return None,
                }
            }
            Some(assigned)
        })
        .collect())
}
