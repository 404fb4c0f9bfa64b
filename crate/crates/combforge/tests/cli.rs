use std::path::Path;
use std::process::{Command, Output};

use combforge::io::read_operator;
use combforge::report::strip_timing;
use combforge_core::linalg::max_abs_diff;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combforge")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bound_prints_both_metrics() {
    let o = run(&["certify", "bound", "--d", "2", "--eps", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "average: 3\ndiamond: 3\n");
    let o = run(&["certify", "bound", "--d", "2", "--eps", "1", "--metric", "diamond"]);
    assert_eq!(stdout(&o), "diamond: 0\n");
}

#[test]
fn passing_suite_exits_zero() {
    let o = run(&["verify", "lemma39", "--d", "2", "--n", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"][0]["value"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "nonsense"])), 2);
    assert_eq!(code(&run(&["verify", "lemma38", "--d", "2", "--n", "9"])), 2);
    assert_eq!(code(&run(&["verify", "lemma38", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["verify", "lemma39", "--d", "2", "--n", "2", "--k", "5"])), 2);
    assert_eq!(code(&run(&["certify", "--random", "3"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn bad_budget_env_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_combforge"))
        .args(["verify", "lemma39", "--d", "2", "--n", "1"])
        .env("COMBFORGE_BUDGET_BYTES", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn failing_checks_exit_one() {
    // a budget too small for the moment is a runtime failure, not a usage error
    let o = run(&["verify", "lemma38", "--d", "2", "--n", "2", "--budget-bytes", "1024"]);
    assert_eq!(code(&o), 1);
    // too few Monte-Carlo samples to meet the oracle tolerance
    let o = run(&["verify", "haar", "--d", "2", "--n", "1", "--samples", "20"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn moment_methods_agree_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("m.lop");
    let b = dir.path().join("w.json");
    assert_eq!(code(&run(&["moment", "--d", "2", "--k", "2", "--method", "rep", "-o", a.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["moment", "--d", "2", "--k", "2", "--method", "weingarten", "-o", b.to_str().unwrap()])), 0);
    let (a, b) = (read_operator(&a).unwrap(), read_operator(&b).unwrap());
    assert_eq!(a.labels(), b.labels());
    assert!(max_abs_diff(a.matrix(), b.matrix()) <= 1e-9);
}

#[test]
fn random_certificates_respect_query_bound() {
    let o = run(&["certify", "--d", "2", "--n", "1", "--random", "20", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.len(), 20);
    for c in &v {
        assert!(c["score"].as_f64().unwrap() <= 2.0 + 1e-8);
        assert_eq!(c["pass"], true);
        assert_eq!(c["input_sha256"].as_str().unwrap().len(), 64);
    }
}

fn stripped(path: &Path) -> String {
    strip_timing(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["verify", "all", "--d", "2", "--n", "1", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(stripped(&a), stripped(&b));
}

#[test]
fn csv_has_header_and_rows() {
    let o = run(&["verify", "lemma38", "--d", "2", "--n", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "suite,name,params,value,limit,relation,passed,exact");
    assert_eq!(lines.count(), 1);
}

#[test]
fn generated_comb_certifies_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let comb = dir.path().join("r.json");
    let cert = dir.path().join("c.json");
    assert_eq!(code(&run(&["gen-comb", "--d", "2", "--n", "1", "--seed", "9", "-o", comb.to_str().unwrap()])), 0);
    let o = run(&["certify", comb.to_str().unwrap(), "-o", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["d"], 2);
    assert_eq!(v["n"], 1);
    assert!(v["thm36_max_eig"].as_f64().unwrap() <= 1.0 + 1e-8);
    assert_eq!(code(&run(&["certify", dir.path().join("missing.lop").to_str().unwrap()])), 1);
}
