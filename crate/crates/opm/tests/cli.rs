//! Black-box tests of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn opm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = opm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn generate(dir: &Path, case: &str, r: &str, seed: &str) {
    ok(&[
        "generate",
        "--case",
        case,
        "--r",
        r,
        "--extent",
        "300,300",
        "--seed",
        seed,
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
}

fn json_without_runtime(path: &Path) -> Value {
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap()["runtime_seconds"] = Value::from(0.0);
    v
}

#[test]
fn generate_is_byte_reproducible() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    generate(a.path(), "subset", "25", "7");
    generate(b.path(), "subset", "25", "7");
    for name in ["R.csv", "P.csv", "Q.csv", "truth.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
}

#[test]
fn attack_then_eval_round_trip() {
    let dir = tempdir().unwrap();
    generate(dir.path(), "subset", "20", "5");
    let res = dir.path().join("res.json");
    ok(&[
        "attack",
        "--p",
        dir.path().join("P.csv").to_str().unwrap(),
        "--q",
        dir.path().join("Q.csv").to_str().unwrap(),
        "--truth",
        dir.path().join("truth.csv").to_str().unwrap(),
        "--algo",
        "minconflict",
        "--out",
        res.to_str().unwrap(),
    ]);
    let result: Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    let out = ok(&[
        "eval",
        "--result",
        res.to_str().unwrap(),
        "--p",
        dir.path().join("P.csv").to_str().unwrap(),
        "--q",
        dir.path().join("Q.csv").to_str().unwrap(),
        "--truth",
        dir.path().join("truth.csv").to_str().unwrap(),
    ]);
    let eval: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eval["point_recovery"], result["metrics"]["point_recovery"]);
    assert_eq!(eval["record_recovery"], result["metrics"]["record_recovery"]);
}

#[test]
fn attack_is_reproducible_modulo_runtime() {
    let dir = tempdir().unwrap();
    generate(dir.path(), "intersect", "20", "9");
    let mut results = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        ok(&[
            "attack",
            "--p",
            dir.path().join("P.csv").to_str().unwrap(),
            "--q",
            dir.path().join("Q.csv").to_str().unwrap(),
            "--truth",
            dir.path().join("truth.csv").to_str().unwrap(),
            "--algo",
            "minconflict-sampled",
            "--weight",
            "min",
            "--seed",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        results.push(json_without_runtime(&out));
    }
    assert_eq!(results[0], results[1]);
}

#[test]
fn index_backends_give_identical_results() {
    let dir = tempdir().unwrap();
    generate(dir.path(), "subset", "25", "3");
    let mut results = Vec::new();
    for index in ["range-tree", "kd-tree", "naive"] {
        let out = dir.path().join(format!("{index}.json"));
        ok(&[
            "attack",
            "--p",
            dir.path().join("P.csv").to_str().unwrap(),
            "--q",
            dir.path().join("Q.csv").to_str().unwrap(),
            "--truth",
            dir.path().join("truth.csv").to_str().unwrap(),
            "--algo",
            "monotone-mix",
            "--index",
            index,
            "--out",
            out.to_str().unwrap(),
        ]);
        results.push(json_without_runtime(&out));
    }
    assert_eq!(results[0], results[1]);
    assert_eq!(results[0], results[2]);
}

#[test]
fn scaled_mode_rejects_other_weights() {
    let dir = tempdir().unwrap();
    generate(dir.path(), "subset", "15", "1");
    let out = opm(&[
        "attack",
        "--p",
        dir.path().join("P.csv").to_str().unwrap(),
        "--q",
        dir.path().join("Q.csv").to_str().unwrap(),
        "--algo",
        "minconflict-scaled",
        "--weight",
        "kappa-diff",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_refuses_oversize_instance() {
    let dir = tempdir().unwrap();
    generate(dir.path(), "subset", "60", "2");
    let out = opm(&[
        "attack",
        "--p",
        dir.path().join("P.csv").to_str().unwrap(),
        "--q",
        dir.path().join("Q.csv").to_str().unwrap(),
        "--algo",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_check_passes() {
    ok(&["oracle-check", "--trials", "20", "--size-cap", "5", "--threads", "2"]);
}

#[test]
fn bench_emits_sorted_csv() {
    let out = ok(&["bench", "--sizes", "30,20", "--seeds", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "size,rep,p_points,q_points,iterations,total_seconds,seconds_per_iteration,matching_weight"
    );
    let sizes: Vec<u64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sizes, vec![20, 30]);
}
