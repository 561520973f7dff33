//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single PASS line on success (run with --nocapture to see them).

use std::sync::OnceLock;
use std::time::Instant;

use num_traits::Zero;
use opm::datagen::*;
use opm::exact::{exact_max_matching, SearchBudget};
use opm::metrics::*;
use opm::minconflict::{
    conflict_score_bruteforce, greedy_min_conflict, scaled_score, survivor_list, weight_levels,
    ConflictCounter, ScoreMode,
};
use opm::model::*;
use opm::monotone::{greedy_monotone, ChainMode};
use opm::oned::extended_1d_attack;
use opm::oracle::{enumerate_max_weight, enumerate_optima, pattern_contains};
use opm::rangeindex::{ChainIndex, IndexKind, IndexedCandidate};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn pass(n: usize, what: &str) {
    println!("criterion {n}: PASS - {what}");
}

/// Random 2-D dataset in general position: distinct values on each axis.
fn random_dataset(rng: &mut ChaCha8Rng, n: usize, extent: Coord) -> Dataset {
    let mut xs: Vec<Coord> = (0..extent).collect();
    let mut ys: Vec<Coord> = (0..extent).collect();
    xs.shuffle(rng);
    ys.shuffle(rng);
    let rows = (0..n)
        .map(|i| (vec![xs[i], ys[i]], rng.gen_range(1..=20u64)))
        .collect();
    Dataset::from_raw(2, rows, 0).unwrap()
}

/// Random order-preserving partial matching of at most `cap` edges.
fn random_partial_matching(rng: &mut ChaCha8Rng, p: &Dataset, q: &Dataset, cap: usize) -> Matching {
    let mut edges: Vec<Edge> = (0..p.len())
        .flat_map(|i| (0..q.len()).map(move |j| Edge::new(i, j)))
        .collect();
    edges.shuffle(rng);
    let mut m = Matching::new();
    for e in edges {
        if m.len() >= cap {
            break;
        }
        if m.contains_p(e.p_idx) || m.contains_q(e.q_idx) {
            continue;
        }
        let clean = m.edges().all(|c| !edges_conflict(&e, c, p, q).unwrap());
        if clean {
            m.insert(e);
        }
    }
    m
}

fn weights_cycle() -> [WeightSpec; 3] {
    [
        WeightSpec::unit(),
        WeightSpec::min_freq(),
        WeightSpec::kappa_diff(rat(30, 1)),
    ]
}

#[test]
fn c01_exact_search_equals_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let budget = SearchBudget::default();
    for trial in 0..200 {
        let (np, nq) = (rng.gen_range(2..=7), rng.gen_range(2..=7));
        let p = random_dataset(&mut rng, np, 40);
        let q = random_dataset(&mut rng, nq, 40);
        let w = &weights_cycle()[trial % 3];
        let ex = exact_max_matching(&p, &q, w, &budget).unwrap();
        assert!(ex.proof_of_optimality);
        let brute = enumerate_max_weight(&p, &q, w);
        assert_eq!(ex.weight, brute, "trial {trial}");
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs:.1}s");
    pass(1, "exact search equals exhaustive enumeration on 200 instances");
}

#[test]
fn c02_conflict_counts_equal_bruteforce() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let unit = WeightSpec::unit();
    for trial in 0..200 {
        let (np, nq, cap) = (rng.gen_range(2..=12), rng.gen_range(2..=12), rng.gen_range(0..=3));
        let p = random_dataset(&mut rng, np, 60);
        let q = random_dataset(&mut rng, nq, 60);
        let m = random_partial_matching(&mut rng, &p, &q, cap);
        let survivors = survivor_list(&p, &q, &m, &unit).unwrap();
        let counter = ConflictCounter::new(&p, &q, &m);
        for (e, _) in &survivors {
            let fast = counter.count_conflicts(e, &p, &q, None);
            let brute = conflict_score_bruteforce(e, &survivors, &p, &q);
            assert_eq!(Rat::from_integer(fast as i128), brute, "trial {trial}");
        }
    }
    pass(2, "cell-based conflict counts equal brute force on 200 instances");
}

#[test]
fn c03_greedy_monotone_approximation_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..200 {
        let (np, nq) = (rng.gen_range(2..=7), rng.gen_range(2..=7));
        let p = random_dataset(&mut rng, np, 40);
        let q = random_dataset(&mut rng, nq, 40);
        let small = Rat::from_integer(p.len().min(q.len()) as i128);
        for w in &weights_cycle() {
            let (m, _) = greedy_monotone(&p, &q, ChainMode::Mix, w, IndexKind::Naive).unwrap();
            let g = matching_weight(&m, &p, &q, w).unwrap();
            let opt = enumerate_max_weight(&p, &q, w);
            // g >= opt / sqrt(min) checked squared to stay in rationals
            assert!(g * g * small >= opt * opt, "trial {trial}");
        }
    }
    pass(3, "greedy chain weight within opt/sqrt(min size) on 200 instances");
}

#[test]
fn c04_index_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut ops = 0usize;
    while ops < 10_000 {
        let n = rng.gen_range(1..=40);
        let cands: Vec<IndexedCandidate> = (0..n)
            .map(|i| IndexedCandidate {
                key: vec![rng.gen_range(0..100), rng.gen_range(0..100)],
                id: Edge::new(i, i),
            })
            .collect();
        let mut idx: Vec<ChainIndex> = [IndexKind::RangeTree, IndexKind::KdTree, IndexKind::Naive]
            .iter()
            .map(|&k| ChainIndex::build(cands.clone(), k).unwrap())
            .collect();
        let mut vals = vec![Rat::zero(); n];
        for _ in 0..40 {
            if rng.gen_bool(0.5) {
                let slot = rng.gen_range(0..n);
                vals[slot] += Rat::new(rng.gen_range(1..100), rng.gen_range(1..10));
                for t in &mut idx {
                    t.update(Edge::new(slot, slot), vals[slot]).unwrap();
                }
            } else {
                let bounds = [rng.gen_range(0..110), rng.gen_range(0..110)];
                let strict = [rng.gen_bool(0.5), rng.gen_bool(0.5)];
                let answers: Vec<_> = idx.iter().map(|t| t.query_max(&bounds, &strict)).collect();
                assert_eq!(answers[0], answers[1]);
                assert_eq!(answers[0], answers[2]);
            }
            ops += 1;
        }
    }
    pass(4, "range-tree, kd-tree and naive agree over 10^4 index operations");
}

#[test]
fn c05_scaled_score_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let min = WeightSpec::min_freq();
    let epsilons = [rat(1, 4), rat(1, 2), rat(1, 1)];
    for trial in 0..100 {
        let (np, nq, cap) = (rng.gen_range(2..=10), rng.gen_range(2..=10), rng.gen_range(0..=2));
        let p = random_dataset(&mut rng, np, 50);
        let q = random_dataset(&mut rng, nq, 50);
        let m = random_partial_matching(&mut rng, &p, &q, cap);
        let survivors = survivor_list(&p, &q, &m, &min).unwrap();
        if survivors.is_empty() {
            continue;
        }
        let counter = ConflictCounter::new(&p, &q, &m);
        for eps in &epsilons {
            let levels = weight_levels(&survivors, eps);
            let factor = Rat::from_integer(1) + *eps;
            for (e, _) in &survivors {
                let brute = conflict_score_bruteforce(e, &survivors, &p, &q);
                let scaled = scaled_score(e, &counter, &levels, &p, &q);
                assert!(scaled <= brute, "trial {trial}");
                assert!(brute <= scaled * factor, "trial {trial} eps {eps}");
            }
        }
    }
    pass(5, "scaled conflict score within (1+eps) of brute force, eps in {1/4, 1/2, 1}");
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for shorter in permutations(n - 1) {
        for pos in 0..=shorter.len() {
            let mut perm = shorter.clone();
            perm.insert(pos, n);
            out.push(perm);
        }
    }
    out
}

#[test]
fn c06_pattern_embedding_consistency() {
    let budget = SearchBudget::default();
    let unit = WeightSpec::unit();
    let patterns: Vec<Vec<usize>> = (1..=4).flat_map(permutations).collect();
    for n in 1..=7usize {
        for text in permutations(n) {
            let q = permutation_to_points(&text).unwrap();
            for pattern in &patterns {
                let p = permutation_to_points(pattern).unwrap();
                let ex = exact_max_matching(&p, &q, &unit, &budget).unwrap();
                assert!(ex.proof_of_optimality);
                let full = ex.weight == Rat::from_integer(pattern.len() as i128);
                assert_eq!(full, pattern_contains(&text, pattern), "{pattern:?} in {text:?}");
            }
        }
    }
    pass(6, "full-size matching exists iff the pattern embeds in the text");
}

fn norm_point(a: &Assignment, q: &Dataset, t: &Truth) -> f64 {
    let r = point_recovery_rate(a, q, t);
    let n = normalized_recovery(r, q, t, RateKind::Point).unwrap();
    *n.numer() as f64 / *n.denom() as f64
}

/// Mean normalized point recovery of (min-conflict, monotone-mix, extended
/// 1-D) over 30 synthetic draws.
fn synthetic_means(case1: bool, rsize: usize) -> (f64, f64, f64) {
    let (mut mc, mut mono, mut od) = (0.0, 0.0, 0.0);
    let mut used = 0;
    for seed in 0..30u64 {
        let params = GenParams {
            superset_size: rsize,
            extent: vec![200, 200],
            f_min: 1,
            f_max: 100,
            beta: 0.6,
            p_bion: 0.7,
            seed,
        };
        let r = generate_superset(&params).unwrap();
        let out = if case1 {
            sample_case1(&r, 0.6, 0.7, seed + 1000)
        } else {
            sample_case2(&r, 0.6, 0.7, seed + 1000)
        };
        let (p, q, truth) = match out {
            Ok(v) => v,
            Err(_) => continue,
        };
        used += 1;
        let w = WeightSpec::kappa_diff_default(&p, &q);
        let (m1, _) = greedy_min_conflict(&p, &q, &w, ScoreMode::Exact).unwrap();
        mc += norm_point(&assignment_from_matching(&m1, &p, &q), &q, &truth);
        let (m2, _) = greedy_monotone(&p, &q, ChainMode::Mix, &w, IndexKind::RangeTree).unwrap();
        mono += norm_point(&assignment_from_matching(&m2, &p, &q), &q, &truth);
        let a = extended_1d_attack(&p, &q, rat(1, 1)).unwrap();
        od += norm_point(&a, &q, &truth);
    }
    assert!(used >= 25, "only {used} usable draws");
    let u = used as f64;
    (mc / u, mono / u, od / u)
}

static SUBSET_MEANS: OnceLock<(f64, f64, f64)> = OnceLock::new();

fn subset_means() -> (f64, f64, f64) {
    *SUBSET_MEANS.get_or_init(|| synthetic_means(true, 60))
}

#[test]
fn c07_subset_case_ranking() {
    let start = Instant::now();
    let (mc, mono, od) = subset_means();
    assert!(
        mc >= od + 0.05,
        "min-conflict {mc:.3} vs extended 1-D {od:.3}"
    );
    assert!(mc >= mono, "min-conflict {mc:.3} vs monotone {mono:.3}");
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 600.0, "took {secs:.1}s");
    pass(7, "subset case: min-conflict beats extended 1-D by >= 5 points and monotone");
}

#[test]
fn c08_intersection_case_close_to_subset() {
    let start = Instant::now();
    let (mc1, mono1, od1) = subset_means();
    let (mc2, mono2, od2) = synthetic_means(false, 100);
    assert!(mc2 <= mc1 + 0.02, "min-conflict {mc2:.3} vs {mc1:.3}");
    assert!(mono2 <= mono1 + 0.02, "monotone {mono2:.3} vs {mono1:.3}");
    assert!(od2 <= od1 + 0.02, "extended 1-D {od2:.3} vs {od1:.3}");
    assert!(
        (mono2 - mc2).abs() <= 0.10,
        "monotone {mono2:.3} vs min-conflict {mc2:.3}"
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 600.0, "took {secs:.1}s");
    pass(8, "intersection case: rates drop and greedy algorithms stay within 10 points");
}

#[test]
fn c09_normalized_objective_floor() {
    let mut ok_mc = 0;
    let mut ok_mono = 0;
    let mut used = 0;
    for seed in 0..200u64 {
        if used >= 50 {
            break;
        }
        let params = GenParams {
            superset_size: 15,
            extent: vec![300, 300],
            f_min: 1,
            f_max: 100,
            beta: 0.6,
            p_bion: 0.7,
            seed,
        };
        let r = generate_superset(&params).unwrap();
        let (p, q, _) = match sample_case2(&r, 0.6, 0.7, seed + 1) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if p.len().min(q.len()) > 12 {
            continue;
        }
        used += 1;
        let w = WeightSpec::kappa_diff_default(&p, &q);
        let ex = exact_max_matching(&p, &q, &w, &SearchBudget::default()).unwrap();
        assert!(ex.proof_of_optimality);
        let (m1, _) = greedy_min_conflict(&p, &q, &w, ScoreMode::Exact).unwrap();
        let (m2, _) = greedy_monotone(&p, &q, ChainMode::Mix, &w, IndexKind::RangeTree).unwrap();
        // weight / optimum > 3/5, kept in exact rationals
        if matching_weight(&m1, &p, &q, &w).unwrap() * rat(5, 3) > ex.weight {
            ok_mc += 1;
        }
        if matching_weight(&m2, &p, &q, &w).unwrap() * rat(5, 3) > ex.weight {
            ok_mono += 1;
        }
    }
    assert_eq!(used, 50);
    assert!(ok_mc >= 40, "min-conflict above 0.6 in only {ok_mc}/50");
    assert!(ok_mono >= 40, "monotone above 0.6 in only {ok_mono}/50");
    pass(9, "greedy objective above 60% of the proven optimum in >= 80% of draws");
}

#[test]
fn c10_chain_time_scaling() {
    let mut per_iter = Vec::new();
    let mut max_total_400 = 0.0f64;
    for n in [100usize, 200, 400] {
        let (mut total, mut iters) = (0.0, 0usize);
        for rep in 0..5u64 {
            let seed = 11 + rep * 7;
            let params = GenParams {
                superset_size: n,
                extent: vec![100 * n as i64, 100 * n as i64],
                f_min: 1,
                f_max: 100,
                beta: 0.6,
                p_bion: 0.7,
                seed,
            };
            let r = generate_superset(&params).unwrap();
            let (p, q, _) = sample_case1(&r, 0.6, 0.7, seed + 1).unwrap();
            let w = WeightSpec::kappa_diff_default(&p, &q);
            let t0 = Instant::now();
            let (_, trace) =
                greedy_monotone(&p, &q, ChainMode::Mix, &w, IndexKind::RangeTree).unwrap();
            let secs = t0.elapsed().as_secs_f64();
            total += secs;
            iters += trace.iterations;
            if n == 400 {
                max_total_400 = max_total_400.max(secs);
            }
        }
        per_iter.push(total / iters as f64);
    }
    for pair in per_iter.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            (3.5..=6.0).contains(&ratio),
            "per-iteration ratio {ratio:.2} outside [3.5, 6] ({per_iter:?})"
        );
    }
    assert!(max_total_400 < 300.0, "n=400 attack took {max_total_400:.1}s");
    pass(10, "per-iteration chain time grows 3.5-6x per doubling; n=400 under 5 min");
}

#[test]
fn c11_block_grid_separation() {
    let mut oned_sum = 0.0;
    for b in 0..BLOCK_GRID_BLOCKS {
        let (p, q, truth) = block_grid_instance(b).unwrap();
        let w = WeightSpec::kappa_diff_default(&p, &q);

        let (_, ties, witness) = enumerate_optima(&p, &q, &w);
        assert_eq!(ties, 1, "block {b}: optimum not unique");
        let a = assignment_from_matching(&witness, &p, &q);
        assert_eq!(point_recovery_rate(&a, &q, &truth), rat(1, 1), "block {b}");

        let (m, _) = greedy_monotone(&p, &q, ChainMode::Mix, &w, IndexKind::RangeTree).unwrap();
        let g = assignment_from_matching(&m, &p, &q);
        assert_eq!(point_recovery_rate(&g, &q, &truth), rat(1, 1), "block {b}");

        let od = extended_1d_attack(&p, &q, rat(1, 1)).unwrap();
        let r = point_recovery_rate(&od, &q, &truth);
        oned_sum += *r.numer() as f64 / *r.denom() as f64;
    }
    let oned_mean = oned_sum / BLOCK_GRID_BLOCKS as f64;
    assert!(
        oned_mean <= 1.0 / 6.0 + 0.05,
        "extended 1-D recovery {oned_mean:.3}"
    );
    pass(11, "2-D attacks pin the hidden block uniquely; 1-D stays at chance level");
}
