//! Synthetic instance generation: a uniform superset of grid points with
//! random frequencies, from which auxiliary (P) and target (Q) datasets are
//! sampled, plus the permutation embedding used for worst-case style
//! instances.
//!
//! All randomness comes from ChaCha8 seeded explicitly, so every dataset is
//! reproducible from its parameters.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Coord, Dataset};

/// Parameters for superset generation and sampling.
#[derive(Debug, Clone)]
pub struct GenParams {
    /// Number of distinct points in the superset R.
    pub superset_size: usize,
    /// Per-axis grid sizes; coordinates range over [0, extent).
    pub extent: Vec<Coord>,
    /// Inclusive bounds for the uniform per-point frequency f'.
    pub f_min: u64,
    pub f_max: u64,
    /// Probability that a superset point is copied into a sample.
    pub beta: f64,
    /// Per-record retention probability of the binomial count draw.
    pub p_bion: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.superset_size == 0 {
            return Err(Error::Config("superset_size must be positive".into()));
        }
        if self.extent.is_empty() || self.extent.iter().any(|&e| e <= 0) {
            return Err(Error::Config("extent must be positive on every axis".into()));
        }
        if self.f_min < 1 || self.f_min > self.f_max {
            return Err(Error::Config("need 1 <= f_min <= f_max".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Config("beta must lie in (0, 1)".into()));
        }
        if !(self.p_bion > 0.0 && self.p_bion <= 1.0) {
            return Err(Error::Config("p_bion must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// True coordinates of each target point, keyed by its (encrypted-side)
/// coordinates. Injective by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Truth {
    pub map: BTreeMap<Vec<Coord>, Vec<Coord>>,
}

fn grid_capacity(extent: &[Coord]) -> u128 {
    extent
        .iter()
        .fold(1u128, |acc, &e| acc.saturating_mul(e as u128))
}

fn decode_cell(mut idx: u128, extent: &[Coord]) -> Vec<Coord> {
    let mut coords = vec![0; extent.len()];
    for (a, &e) in extent.iter().enumerate().rev() {
        coords[a] = (idx % e as u128) as Coord;
        idx /= e as u128;
    }
    coords
}

/// Generates the superset R: `superset_size` distinct uniform grid points,
/// each with an unnormalized count uniform in [f_min, f_max].
pub fn generate_superset(params: &GenParams) -> Result<Dataset> {
    params.validate()?;
    let capacity = grid_capacity(&params.extent);
    if (params.superset_size as u128) > capacity {
        return Err(Error::Capacity {
            capacity,
            requested: params.superset_size,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cells: Vec<u128> = if capacity <= usize::MAX as u128 {
        rand::seq::index::sample(&mut rng, capacity as usize, params.superset_size)
            .into_iter()
            .map(|i| i as u128)
            .collect()
    } else {
        // sparse regime: rejection sampling cannot realistically collide
        let mut seen = std::collections::HashSet::new();
        while seen.len() < params.superset_size {
            seen.insert(rng.gen_range(0..capacity));
        }
        seen.into_iter().collect()
    };
    // counts are drawn in a fixed (sorted-cell) order for determinism
    cells.sort_unstable();
    let rows = cells
        .into_iter()
        .map(|c| {
            (
                decode_cell(c, &params.extent),
                rng.gen_range(params.f_min..=params.f_max),
            )
        })
        .collect();
    Dataset::from_raw(params.extent.len(), rows, 0)
}

/// Bernoulli(beta) copy of each point of `r`, with the kept point's count
/// redrawn as Binomial(count, p_bion). Zero draws are dropped.
fn beta_sample(r: &Dataset, beta: f64, p_bion: f64, rng: &mut ChaCha8Rng) -> Vec<(Vec<Coord>, u64)> {
    let mut rows = Vec::new();
    for pt in r.points() {
        if !rng.gen_bool(beta) {
            continue;
        }
        let count = (0..pt.raw_count).filter(|_| rng.gen_bool(p_bion)).count() as u64;
        if count > 0 {
            rows.push((pt.coords.clone(), count));
        }
    }
    rows
}

/// Target-inside-auxiliary sampling: P is the whole superset, Q a thinned
/// copy. The truth map is the identity on Q's support.
pub fn sample_case1(
    r: &Dataset,
    beta: f64,
    p_bion: f64,
    seed: u64,
) -> Result<(Dataset, Dataset, Truth)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_rows = beta_sample(r, beta, p_bion, &mut rng);
    if q_rows.is_empty() {
        return Err(Error::ResampleNeeded);
    }
    let truth = Truth {
        map: q_rows
            .iter()
            .map(|(c, _)| (c.clone(), c.clone()))
            .collect(),
    };
    let p = Dataset::from_raw(r.dim(), r.points().iter().map(|pt| (pt.coords.clone(), pt.raw_count)).collect(), r.scale())?;
    let q = Dataset::from_raw(r.dim(), q_rows, r.scale())?;
    Ok((p, q, truth))
}

/// Partially overlapping sampling: P and Q are independent thinned copies of
/// the superset. The truth map covers the Q points whose coordinates also
/// appear in P.
pub fn sample_case2(
    r: &Dataset,
    beta: f64,
    p_bion: f64,
    seed: u64,
) -> Result<(Dataset, Dataset, Truth)> {
    let mut p_rng = ChaCha8Rng::seed_from_u64(seed);
    p_rng.set_stream(0);
    let mut q_rng = ChaCha8Rng::seed_from_u64(seed);
    q_rng.set_stream(1);
    let p_rows = beta_sample(r, beta, p_bion, &mut p_rng);
    let q_rows = beta_sample(r, beta, p_bion, &mut q_rng);
    if p_rows.is_empty() || q_rows.is_empty() {
        return Err(Error::ResampleNeeded);
    }
    let p = Dataset::from_raw(r.dim(), p_rows, r.scale())?;
    let q = Dataset::from_raw(r.dim(), q_rows, r.scale())?;
    let truth = Truth {
        map: q
            .points()
            .iter()
            .filter(|pt| p.find(&pt.coords).is_some())
            .map(|pt| (pt.coords.clone(), pt.coords.clone()))
            .collect(),
    };
    Ok((p, q, truth))
}

/// Number of 3-point permutation blocks in [`block_grid_instance`].
pub const BLOCK_GRID_BLOCKS: usize = 6;

/// Hard instance for marginal-frequency attacks: six 3-point clusters, one
/// per permutation pattern of {0,1,2}, laid out on an anti-diagonal of
/// well-separated bands. The target dataset is a single cluster
/// (`true_block`), re-expressed on a small grid with the same counts.
///
/// Counts are chosen so that for every choice of the embedded cluster the
/// full 2-D maximum-weight matching under the default kappa-diff weight is
/// uniquely the true triple, and the greedy monotone matcher finds it, while
/// both axis marginals are dominated by the near-identical heavy counts, so
/// per-axis CDF matching carries almost no signal:
/// - per cluster, one light, one medium and one heavy count;
/// - lights and mediums each form a global geometric ladder of ratio 12,
///   which keeps every foreign count outside the rival band
///   (c, (2 T/t - 1) c) of a target count c, where t is the cluster total;
/// - heavies are nearly equal (so every cluster total is close to T/6) with
///   the all-decreasing cluster holding the strict maximum, and each heavy
///   sits at a position whose order pattern cross-cluster points cannot
///   reproduce.
pub fn block_grid_instance(true_block: usize) -> Result<(Dataset, Dataset, Truth)> {
    if true_block >= BLOCK_GRID_BLOCKS {
        return Err(Error::Config(format!(
            "true_block {true_block} out of range 0..{BLOCK_GRID_BLOCKS}"
        )));
    }
    const BAND: Coord = 12;
    const SIGMA: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    // y-band of cluster k; anti-diagonal makes every cross-cluster pair of
    // points decreasing
    const PI: [usize; 6] = [5, 4, 3, 2, 1, 0];
    // count class (0 light, 1 medium, 2 heavy) at positions 0..3; the heavy
    // goes to a position with one increasing and one decreasing pair where
    // the pattern has them
    const CLASS_AT: [[usize; 3]; 6] = [
        [2, 1, 0],
        [1, 2, 0],
        [2, 1, 0],
        [2, 1, 0],
        [1, 2, 0],
        [2, 1, 0],
    ];
    const RATIO: u64 = 12;
    let light: Vec<u64> = (0..6).map(|k| 1000 * RATIO.pow(k)).collect();
    let medium: Vec<u64> = (0..6).map(|k| 24 * light[5] * RATIO.pow(k)).collect();
    const HEAVY_OFFSET: [u64; 6] = [0, 1, 2, 3, 4, 10];
    let heavy: Vec<u64> = (0..6).map(|k| 16 * medium[5] + HEAVY_OFFSET[k]).collect();

    let count_at = |k: usize, i: usize| match CLASS_AT[k][i] {
        0 => light[k],
        1 => medium[k],
        _ => heavy[k],
    };
    let mut p_rows = Vec::with_capacity(18);
    for k in 0..6 {
        for i in 0..3 {
            let coords = vec![
                BAND * k as Coord + i as Coord,
                BAND * PI[k] as Coord + SIGMA[k][i] as Coord,
            ];
            p_rows.push((coords, count_at(k, i)));
        }
    }
    let b = true_block;
    let mut q_rows = Vec::with_capacity(3);
    let mut truth = Truth::default();
    for i in 0..3 {
        let q_coords = vec![i as Coord, SIGMA[b][i] as Coord];
        let p_coords = vec![
            BAND * b as Coord + i as Coord,
            BAND * PI[b] as Coord + SIGMA[b][i] as Coord,
        ];
        truth.map.insert(q_coords.clone(), p_coords);
        q_rows.push((q_coords, count_at(b, i)));
    }
    let p = Dataset::from_raw(2, p_rows, 0)?;
    let q = Dataset::from_raw(2, q_rows, 0)?;
    Ok((p, q, truth))
}

/// Embeds a permutation of 1..=n as the unit-frequency point set
/// {(i, perm_i)}.
pub fn permutation_to_points(perm: &[usize]) -> Result<Dataset> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &v in perm {
        if v < 1 || v > n || seen[v - 1] {
            return Err(Error::Validation(format!(
                "not a permutation of 1..={n}: {perm:?}"
            )));
        }
        seen[v - 1] = true;
    }
    Dataset::from_raw(
        2,
        perm.iter()
            .enumerate()
            .map(|(i, &v)| (vec![(i + 1) as Coord, v as Coord], 1))
            .collect(),
        0,
    )
}
