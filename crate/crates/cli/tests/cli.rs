use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn golden(name: &str) -> String {
    fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn cullen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cullen")).args(args).env_remove("CULLEN_PRECISION").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    cullen(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_fib_replay_matches_golden() {
    let o = cullen(&["bound", "fib", "--mode", "replay"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("bound_fib_replay.json"));
}

#[test]
fn bound_writes_ledger_file_and_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ledger.json");
    let o = cullen(&["bound", "fib", "--mode", "rigorous", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["mode"], "rigorous");
    assert!(doc["entries"].as_array().unwrap().len() > 10);
    assert!(stdout(&o).contains("alpha_1"));
}

#[test]
fn bound_general_pell() {
    let spec = data("pell.json");
    let o = cullen(&["bound", "general", "--spec", path(&spec), "--x", "3", "--k", "2", "--q", "x + 1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["mode"], "rigorous");
}

#[test]
fn bound_rejects_counterexample_hypotheses() {
    let spec = data("counterexample.json");
    let o = cullen(&["bound", "general", "--spec", path(&spec), "--q", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("irreducible"));
}

#[test]
fn search_fib_matches_golden_and_expectation() {
    let expect = data("fib_solutions.json");
    let o = cullen(&["search", "fib", "--ell-max", "135", "--n1-max", "200", "--expect", path(&expect)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("search_fib.json"));
}

#[test]
fn search_mismatch_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let want = dir.path().join("want.json");
    fs::write(&want, r#"[{"indices":["14","6"],"ell":"6","x":"2"}]"#).unwrap();
    assert_eq!(code(&["search", "fib", "--ell-max", "10", "--n1-max", "50", "--expect", want.to_str().unwrap()]), 5);
}

#[test]
fn search_tsv_and_worker_independence() {
    let one = cullen(&["--workers", "1", "search", "fib", "--ell-max", "60", "--n1-max", "120", "--tsv"]);
    let four = cullen(&["--workers", "4", "search", "fib", "--ell-max", "60", "--n1-max", "120", "--tsv"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(stdout(&one), stdout(&four));
    let text = stdout(&one);
    assert!(text.starts_with("indices\tell\tx\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn search_general_counterexample_period() {
    let spec = data("counterexample.json");
    let o = cullen(&[
        "search", "general", "--spec", path(&spec), "--q", "-1", "--ell-min", "1", "--ell-max", "1", "--n1-max", "30",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mut ns: Vec<u64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["indices"][0].as_str().unwrap().parse().unwrap())
        .collect();
    ns.sort();
    assert_eq!(ns, vec![1, 2, 7, 8, 13, 14, 19, 20, 25, 26]);
}

#[test]
fn verify_counterexample_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    assert_eq!(code(&["verify-counterexample", "--k-max", "500", "--out", out.to_str().unwrap()]), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["complete"], true);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"order": 3, "coefficients": [3, -3, 1], "initials": [1, 1, 1]}"#).unwrap();
    assert_eq!(code(&["verify-counterexample", "--k-max", "50", "--spec", bad.to_str().unwrap()]), 5);
}

#[test]
fn input_errors_exit_1() {
    assert_eq!(code(&["--precision", "32", "bound", "fib"]), 1);
    assert_eq!(code(&["--precision", "9000", "bound", "fib"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["reduce", "fib", "--stage", "2"]), 1);
    assert_eq!(code(&["bound", "general"]), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"order": 2, "coefficients": [1, 1]}"#).unwrap();
    let o = cullen(&["bound", "general", "--spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("initials"));
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&["bound", "general", "--spec", missing.to_str().unwrap()]), 1);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cullen"))
        .args(["bound", "fib", "--mode", "replay"])
        .env("CULLEN_PRECISION", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_writes_stage_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reduce.json");
    let o = cullen(&["reduce", "fib", "--stage", "1", "--n1-max", "1000", "--ell-max", "750", "--out", out.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let stage = &doc["stages"][0];
    assert_eq!(stage["stage"], 1);
    match o.status.code() {
        Some(0) => assert!(stage["bound"].is_string()),
        Some(4) => assert!(stage["failure"].is_string()),
        c => panic!("unexpected exit {c:?}: {}", stderr(&o)),
    }
}
