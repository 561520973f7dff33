//! Command-line front end: generate synthetic instances, run the attacks,
//! evaluate result files, benchmark scaling, and cross-check the fast
//! algorithms against their brute-force oracles.
//!
//! Exit codes: 0 success, 2 validation/configuration, 3 size or search
//! budget, 4 oracle mismatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opm::dataio::{load_dataset, load_truth, save_dataset, save_truth, ResultFile};
use opm::datagen::{generate_superset, sample_case1, sample_case2, GenParams, Truth};
use opm::exact::{exact_max_matching, SearchBudget};
use opm::metrics::{assignment_from_matching, Assignment, MetricsReport};
use opm::minconflict::{
    conflict_score_bruteforce, greedy_min_conflict, survivor_list, ConflictCounter, ScoreMode,
};
use opm::model::{matching_weight, rat, Matching, WeightKind};
use opm::monotone::{greedy_monotone, heaviest_monotone_chain, ChainMode};
use opm::oned::extended_1d_attack;
use opm::oracle;
use opm::rangeindex::IndexKind;
use opm::{Coord, Dataset, Error, Rat, WeightSpec};

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_ORACLE: u8 = 4;

struct Failure {
    msg: String,
    code: u8,
}

impl Failure {
    fn validation(msg: impl Into<String>) -> Failure {
        Failure { msg: msg.into(), code: EXIT_VALIDATION }
    }
    fn budget(msg: impl Into<String>) -> Failure {
        Failure { msg: msg.into(), code: EXIT_BUDGET }
    }
    fn oracle(msg: impl Into<String>) -> Failure {
        Failure { msg: msg.into(), code: EXIT_ORACLE }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SizeLimit { .. } | Error::Capacity { .. } => EXIT_BUDGET,
            _ => EXIT_VALIDATION,
        };
        Failure { msg: e.to_string(), code }
    }
}

#[derive(Parser)]
#[command(name = "opm", about = "Order-preserving matching attacks on OPE-encrypted data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic instance: P.csv, Q.csv, truth.csv (and R.csv)
    Generate(GenerateArgs),
    /// Run one attack algorithm and write a result document
    Attack(AttackArgs),
    /// Recompute the metrics of a result file against the ground truth
    Eval(EvalArgs),
    /// Time an attack across instance sizes; emits CSV
    Bench(BenchArgs),
    /// Cross-check the fast algorithms against brute-force oracles
    OracleCheck(OracleCheckArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CaseArg {
    /// Q is a thinned copy of P (target inside auxiliary)
    Subset,
    /// P and Q are independent thinned copies of the superset
    Intersect,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AlgoArg {
    Oned,
    Minconflict,
    MinconflictSampled,
    MinconflictScaled,
    MonotoneInc,
    MonotoneDec,
    MonotoneMix,
    Exact,
}

impl AlgoArg {
    fn id(self) -> &'static str {
        match self {
            AlgoArg::Oned => "oned",
            AlgoArg::Minconflict => "minconflict",
            AlgoArg::MinconflictSampled => "minconflict-sampled",
            AlgoArg::MinconflictScaled => "minconflict-scaled",
            AlgoArg::MonotoneInc => "monotone-inc",
            AlgoArg::MonotoneDec => "monotone-dec",
            AlgoArg::MonotoneMix => "monotone-mix",
            AlgoArg::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WeightArg {
    Unit,
    Min,
    KappaDiff,
}

impl WeightArg {
    fn id(self) -> &'static str {
        match self {
            WeightArg::Unit => "unit",
            WeightArg::Min => "min",
            WeightArg::KappaDiff => "kappa-diff",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum IndexArg {
    RangeTree,
    KdTree,
    Naive,
}

impl From<IndexArg> for IndexKind {
    fn from(a: IndexArg) -> IndexKind {
        match a {
            IndexArg::RangeTree => IndexKind::RangeTree,
            IndexArg::KdTree => IndexKind::KdTree,
            IndexArg::Naive => IndexKind::Naive,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Superset size |R|
    #[arg(long = "r", default_value_t = 60)]
    superset_size: usize,
    /// Per-axis grid sizes, comma-separated
    #[arg(long, default_value = "1000,1000")]
    extent: String,
    #[arg(long, default_value_t = 1)]
    fmin: u64,
    #[arg(long, default_value_t = 100)]
    fmax: u64,
    #[arg(long, default_value_t = 0.6)]
    beta: f64,
    #[arg(long, default_value_t = 0.7)]
    pbion: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decimal digits represented by one grid unit in the output files
    #[arg(long, default_value_t = 0)]
    scale: u32,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    p: PathBuf,
    #[arg(long)]
    q: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "kappa-diff")]
    weight: WeightArg,
    /// Kappa as `num/den` (kappa-diff weight and oned); defaults to the max
    /// point frequency for kappa-diff and to 1 for oned
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long, value_enum, default_value = "range-tree")]
    index: IndexArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected sample size for minconflict-sampled
    #[arg(long, default_value_t = 100)]
    sample_k: usize,
    /// Epsilon as `num/den` for minconflict-scaled
    #[arg(long, default_value = "1/2")]
    eps: String,
    #[arg(long, default_value_t = 0)]
    scale: u32,
    /// Upper bound on worker threads (algorithms may use fewer)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also run the exact solver and report achieved/optimal objective
    #[arg(long, default_value_t = false)]
    prove_optimum: bool,
    /// Result path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    p: PathBuf,
    #[arg(long)]
    q: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value_t = 0)]
    scale: u32,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes |R|; emitted in ascending order
    #[arg(long, default_value = "100,200,400")]
    sizes: String,
    /// Repetitions per size
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, value_enum, default_value = "monotone-mix")]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "kappa-diff")]
    weight: WeightArg,
    #[arg(long, value_enum, default_value = "range-tree")]
    index: IndexArg,
    #[arg(long, default_value_t = 0.6)]
    beta: f64,
    #[arg(long, default_value_t = 0.7)]
    pbion: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Maximum points per side of a random instance
    #[arg(long, default_value_t = 7)]
    size_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// Named sub-stream of the run seed; every random choice in a command draws
/// from one of these, so a single --seed reproduces the whole run.
fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.gen()
}

fn parse_rat(s: &str) -> Result<Rat, Failure> {
    let bad = || Failure::validation(format!("malformed rational {s:?}; expected num or num/den"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i128 = n.trim().parse().map_err(|_| bad())?;
    let d: i128 = d.trim().parse().map_err(|_| bad())?;
    if d <= 0 || n < 0 {
        return Err(Failure::validation(format!(
            "rational {s} must be nonnegative with positive denominator"
        )));
    }
    Ok(rat(n, d))
}

fn parse_extent(s: &str) -> Result<Vec<Coord>, Failure> {
    let ext: Result<Vec<Coord>, _> = s.split(',').map(|t| t.trim().parse::<Coord>()).collect();
    match ext {
        Ok(e) if !e.is_empty() => Ok(e),
        _ => Err(Failure::validation(format!("malformed extent {s:?}"))),
    }
}

fn check_threads(threads: usize) -> Result<usize, Failure> {
    if threads == 0 {
        return Err(Failure::validation("threads must be at least 1"));
    }
    Ok(threads)
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    let params = GenParams {
        superset_size: a.superset_size,
        extent: parse_extent(&a.extent)?,
        f_min: a.fmin,
        f_max: a.fmax,
        beta: a.beta,
        p_bion: a.pbion,
        seed: sub_seed(a.seed, 0),
    };
    let r = generate_superset(&params)?;
    let r = Dataset::from_raw(
        r.dim(),
        r.points().iter().map(|pt| (pt.coords.clone(), pt.raw_count)).collect(),
        a.scale,
    )?;
    // thinning may leave a side empty; retry on fresh sampling sub-streams
    let mut picked = None;
    for attempt in 0..64 {
        let s = sub_seed(a.seed, 1 + attempt);
        let out = match a.case {
            CaseArg::Subset => sample_case1(&r, a.beta, a.pbion, s),
            CaseArg::Intersect => sample_case2(&r, a.beta, a.pbion, s),
        };
        match out {
            Ok(triple) => {
                picked = Some(triple);
                break;
            }
            Err(Error::ResampleNeeded) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let (p, q, truth) =
        picked.ok_or_else(|| Failure::validation("sampling kept producing empty datasets"))?;
    std::fs::create_dir_all(&a.out_dir).map_err(Error::from)?;
    save_dataset(&r, &a.out_dir.join("R.csv"))?;
    save_dataset(&p, &a.out_dir.join("P.csv"))?;
    save_dataset(&q, &a.out_dir.join("Q.csv"))?;
    save_truth(&truth, p.dim(), a.scale, &a.out_dir.join("truth.csv"))?;
    println!(
        "wrote R ({} pts), P ({} pts), Q ({} pts), truth ({} pairs) to {}",
        r.len(),
        p.len(),
        q.len(),
        truth.map.len(),
        a.out_dir.display()
    );
    Ok(())
}

struct AttackRun {
    assignment: Assignment,
    matching: Option<Matching>,
    kappa_used: Option<Rat>,
}

fn run_algo(
    algo: AlgoArg,
    p: &Dataset,
    q: &Dataset,
    w: &WeightSpec,
    kappa: Option<&Rat>,
    index: IndexKind,
    seed: u64,
    sample_k: usize,
    eps: &Rat,
) -> Result<AttackRun, Failure> {
    let matching = match algo {
        AlgoArg::Oned => {
            let kap = kappa.cloned().unwrap_or_else(|| rat(1, 1));
            let assignment = extended_1d_attack(p, q, kap)?;
            return Ok(AttackRun { assignment, matching: None, kappa_used: Some(kap) });
        }
        AlgoArg::Minconflict => greedy_min_conflict(p, q, w, ScoreMode::Exact)?.0,
        AlgoArg::MinconflictSampled => {
            let mode = ScoreMode::Sampled { k: sample_k, seed: sub_seed(seed, 2) };
            greedy_min_conflict(p, q, w, mode)?.0
        }
        AlgoArg::MinconflictScaled => {
            greedy_min_conflict(p, q, w, ScoreMode::Scaled { eps: *eps })?.0
        }
        AlgoArg::MonotoneInc => greedy_monotone(p, q, ChainMode::Increasing, w, index)?.0,
        AlgoArg::MonotoneDec => greedy_monotone(p, q, ChainMode::Decreasing, w, index)?.0,
        AlgoArg::MonotoneMix => greedy_monotone(p, q, ChainMode::Mix, w, index)?.0,
        AlgoArg::Exact => {
            let res = exact_max_matching(p, q, w, &SearchBudget::default())?;
            if !res.proof_of_optimality {
                return Err(Failure::budget("exact search budget exhausted"));
            }
            res.matching
        }
    };
    Ok(AttackRun {
        assignment: assignment_from_matching(&matching, p, q),
        matching: Some(matching),
        kappa_used: kappa.cloned(),
    })
}

fn weight_spec(
    weight: WeightArg,
    kappa_flag: Option<&str>,
    p: &Dataset,
    q: &Dataset,
) -> Result<(WeightSpec, Option<Rat>), Failure> {
    let kappa = kappa_flag.map(parse_rat).transpose()?;
    let spec = match weight {
        WeightArg::Unit => WeightSpec::unit(),
        WeightArg::Min => WeightSpec::min_freq(),
        WeightArg::KappaDiff => match kappa {
            Some(k) => WeightSpec::kappa_diff(k),
            None => WeightSpec::kappa_diff_default(p, q),
        },
    };
    let used = match spec.kind {
        WeightKind::KappaDiff => Some(spec.kappa),
        _ => kappa,
    };
    Ok((spec, used))
}

fn cmd_attack(a: &AttackArgs) -> Result<(), Failure> {
    check_threads(a.threads)?;
    if a.algo == AlgoArg::MinconflictScaled && a.weight != WeightArg::Min {
        return Err(Failure::validation("minconflict-scaled requires --weight min"));
    }
    let p = load_dataset(&a.p, a.scale, false)?;
    let q = load_dataset(&a.q, a.scale, false)?;
    let truth = match &a.truth {
        Some(path) => load_truth(path, q.dim(), a.scale)?,
        None => Truth::default(),
    };
    let (w, kappa) = weight_spec(a.weight, a.kappa.as_deref(), &p, &q)?;
    let eps = parse_rat(&a.eps)?;
    let start = Instant::now();
    let run = run_algo(a.algo, &p, &q, &w, kappa.as_ref(), a.index.into(), a.seed, a.sample_k, &eps)?;
    let runtime = start.elapsed().as_secs_f64();
    let objective = match (&run.matching, a.prove_optimum) {
        (Some(m), true) => {
            let achieved = matching_weight(m, &p, &q, &w)?;
            let res = exact_max_matching(&p, &q, &w, &SearchBudget::default())?;
            if !res.proof_of_optimality {
                return Err(Failure::budget("exact search budget exhausted while proving optimum"));
            }
            Some((achieved, res.weight))
        }
        _ => None,
    };
    let metrics = MetricsReport::compute(&run.assignment, &p, &q, &truth, objective, runtime);
    let seed_field = match a.algo {
        AlgoArg::MinconflictSampled => Some(a.seed),
        _ => None,
    };
    let result = ResultFile::new(
        a.algo.id(),
        a.weight.id(),
        run.kappa_used.as_ref(),
        seed_field,
        &run.assignment,
        &q,
        &metrics,
    );
    match &a.out {
        Some(path) => result.save(path)?,
        None => println!("{}", serde_json::to_string_pretty(&result).map_err(Error::from)?),
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<(), Failure> {
    let p = load_dataset(&a.p, a.scale, false)?;
    let q = load_dataset(&a.q, a.scale, false)?;
    let truth = load_truth(&a.truth, q.dim(), a.scale)?;
    let result = ResultFile::load(&a.result)?;
    if result.assignment.len() != q.len() {
        return Err(Failure::validation(format!(
            "result has {} assignment entries, Q has {} points",
            result.assignment.len(),
            q.len()
        )));
    }
    let mut assignment: Assignment = vec![None; q.len()];
    let mut seen = vec![false; q.len()];
    for entry in &result.assignment {
        let coords = entry
            .target
            .iter()
            .map(|s| opm::dataio::parse_coord(s, a.scale))
            .collect::<Result<Vec<Coord>, _>>()
            .map_err(Failure::validation)?;
        let idx = q
            .find(&coords)
            .ok_or_else(|| Failure::validation(format!("target {coords:?} not in Q")))?;
        if seen[idx] {
            return Err(Failure::validation(format!("duplicate target {coords:?}")));
        }
        seen[idx] = true;
        assignment[idx] = match &entry.assigned {
            None => None,
            Some(vals) => Some(
                vals.iter()
                    .map(|s| opm::dataio::parse_coord(s, a.scale))
                    .collect::<Result<Vec<Coord>, _>>()
                    .map_err(Failure::validation)?,
            ),
        };
    }
    let metrics = MetricsReport::compute(&assignment, &p, &q, &truth, None, 0.0);
    let json = opm::dataio::MetricsJson::from(&metrics);
    println!("{}", serde_json::to_string_pretty(&json).map_err(Error::from)?);
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    check_threads(a.threads)?;
    let mut sizes = a
        .sizes
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::validation(format!("malformed sizes {:?}", a.sizes)))?;
    if sizes.is_empty() || a.seeds == 0 {
        return Err(Failure::validation("need at least one size and one seed"));
    }
    sizes.sort_unstable();
    let mut rows = vec!["size,rep,p_points,q_points,iterations,total_seconds,seconds_per_iteration,matching_weight".to_string()];
    for (si, &n) in sizes.iter().enumerate() {
        for rep in 0..a.seeds {
            let stream = 2 + (si as u64) * 10_000 + rep;
            let params = GenParams {
                superset_size: n,
                extent: vec![(n as Coord) * 100, (n as Coord) * 100],
                f_min: 1,
                f_max: 100,
                beta: a.beta,
                p_bion: a.pbion,
                seed: sub_seed(a.seed, stream),
            };
            let r = generate_superset(&params)?;
            let (p, q, _) = sample_case1(&r, a.beta, a.pbion, sub_seed(a.seed, stream + 1))?;
            let (w, kappa) = weight_spec(a.weight, None, &p, &q)?;
            let start = Instant::now();
            let (iterations, weight) = match a.algo {
                AlgoArg::MonotoneInc | AlgoArg::MonotoneDec | AlgoArg::MonotoneMix => {
                    let mode = match a.algo {
                        AlgoArg::MonotoneInc => ChainMode::Increasing,
                        AlgoArg::MonotoneDec => ChainMode::Decreasing,
                        _ => ChainMode::Mix,
                    };
                    let (m, trace) = greedy_monotone(&p, &q, mode, &w, a.index.into())?;
                    (trace.iterations.max(1), matching_weight(&m, &p, &q, &w)?)
                }
                AlgoArg::Minconflict => {
                    let (m, picks) = greedy_min_conflict(&p, &q, &w, ScoreMode::Exact)?;
                    (picks.len().max(1), matching_weight(&m, &p, &q, &w)?)
                }
                _ => {
                    let run = run_algo(
                        a.algo,
                        &p,
                        &q,
                        &w,
                        kappa.as_ref(),
                        a.index.into(),
                        sub_seed(a.seed, stream + 2),
                        100,
                        &rat(1, 2),
                    )?;
                    let weight = match &run.matching {
                        Some(m) => matching_weight(m, &p, &q, &w)?,
                        None => rat(0, 1),
                    };
                    (1, weight)
                }
            };
            let total = start.elapsed().as_secs_f64();
            rows.push(format!(
                "{n},{rep},{},{},{iterations},{total},{},{}/{}",
                p.len(),
                q.len(),
                total / iterations as f64,
                weight.numer(),
                weight.denom()
            ));
        }
    }
    let text = rows.join("\n") + "\n";
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// One random general-position instance: distinct values on every axis.
fn random_instance(rng: &mut ChaCha8Rng, cap: usize) -> (Dataset, Dataset) {
    let side = |rng: &mut ChaCha8Rng, n: usize| {
        let span = 20 * n as u64;
        let mut xs: Vec<Coord> = Vec::new();
        let mut ys: Vec<Coord> = Vec::new();
        while xs.len() < n {
            let v = rng.gen_range(0..span) as Coord;
            if !xs.contains(&v) {
                xs.push(v);
            }
        }
        while ys.len() < n {
            let v = rng.gen_range(0..span) as Coord;
            if !ys.contains(&v) {
                ys.push(v);
            }
        }
        let rows = xs
            .into_iter()
            .zip(ys)
            .map(|(x, y)| (vec![x, y], rng.gen_range(1..10u64)))
            .collect();
        Dataset::from_raw(2, rows, 0).unwrap()
    };
    let n = rng.gen_range(1..=cap);
    let m = rng.gen_range(1..=cap);
    (side(rng, n), side(rng, m))
}

/// Random conflict-free partial matching, committed greedily.
fn random_partial_matching(rng: &mut ChaCha8Rng, p: &Dataset, q: &Dataset) -> Matching {
    let mut m = Matching::new();
    let target = rng.gen_range(0..=2usize);
    for _ in 0..target {
        let cands = opm::monotone::candidate_edges(p, q, &m);
        if cands.is_empty() {
            break;
        }
        m.insert(cands[rng.gen_range(0..cands.len())]);
    }
    m
}

fn oracle_trial(trial: u64, seed: u64, cap: usize) -> Vec<String> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let (p, q) = random_instance(&mut rng, cap);
    let specs = [
        WeightSpec::unit(),
        WeightSpec::min_freq(),
        WeightSpec::kappa_diff_default(&p, &q),
    ];
    let w = &specs[(trial % 3) as usize];

    match exact_max_matching(&p, &q, w, &SearchBudget::default()) {
        Ok(res) => {
            let oracle_w = oracle::enumerate_max_weight(&p, &q, w);
            if !res.proof_of_optimality || res.weight != oracle_w {
                failures.push(format!("trial {trial}: exact weight != enumeration"));
            }
        }
        Err(e) => failures.push(format!("trial {trial}: exact failed: {e}")),
    }

    let m = random_partial_matching(&mut rng, &p, &q);
    let unit = WeightSpec::unit();
    match survivor_list(&p, &q, &m, &unit) {
        Ok(survivors) => {
            let counter = ConflictCounter::new(&p, &q, &m);
            for (e, _) in &survivors {
                let fast = counter.count_conflicts(e, &p, &q, None);
                let brute = conflict_score_bruteforce(e, &survivors, &p, &q);
                if Rat::from_integer(fast as i128) != brute {
                    failures.push(format!(
                        "trial {trial}: fast conflict count {fast} != brute {brute} at ({}, {})",
                        e.p_idx, e.q_idx
                    ));
                }
            }
        }
        Err(e) => failures.push(format!("trial {trial}: survivors failed: {e}")),
    }

    let chain_oracle = oracle::enumerate_best_chain_weight(&p, &q, &m, w);
    for kind in [IndexKind::RangeTree, IndexKind::KdTree, IndexKind::Naive] {
        match heaviest_monotone_chain(&p, &q, &m, w, kind) {
            Ok(chain) => {
                if chain.weight != chain_oracle {
                    failures.push(format!(
                        "trial {trial}: chain weight ({kind:?}) != enumeration"
                    ));
                }
            }
            Err(e) => failures.push(format!("trial {trial}: chain ({kind:?}) failed: {e}")),
        }
    }
    failures
}

fn cmd_oracle_check(a: &OracleCheckArgs) -> Result<(), Failure> {
    let threads = check_threads(a.threads)?;
    if a.trials == 0 {
        return Err(Failure::validation("trials must be at least 1"));
    }
    let trials: Vec<u64> = (0..a.trials).collect();
    let chunk = trials.len().div_ceil(threads);
    let mut failures: Vec<String> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = trials
            .chunks(chunk)
            .map(|ts| {
                scope.spawn(move || {
                    ts.iter()
                        .flat_map(|&t| oracle_trial(t, a.seed, a.size_cap))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            failures.extend(h.join().unwrap());
        }
    });
    if failures.is_empty() {
        println!(
            "oracle-check: {} trials at size cap {} — exact, conflict-count, and chain suites all match",
            a.trials, a.size_cap
        );
        Ok(())
    } else {
        for f in &failures {
            eprintln!("{f}");
        }
        Err(Failure::oracle(format!("{} oracle mismatches", failures.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Attack(a) => cmd_attack(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::OracleCheck(a) => cmd_oracle_check(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
