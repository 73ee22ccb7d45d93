use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_blocksmith")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, s) = run(args);
    assert!(s.ends_with('\n'));
    (code, serde_json::from_str(&s).unwrap())
}

#[test]
fn snf_payload() {
    let (code, v) = json(&["snf", "--matrix", "[[7,1],[1,4]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["diagonal"], serde_json::json!([1, 27]));
}

#[test]
fn trivial_gram() {
    let (code, v) = json(&["solve-gram", "--gram", "[[1]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["count"], 1);
}

#[test]
fn proved_empty_exit_code() {
    let (code, v) = json(&["solve-gram", "--gram", "[[7,1],[1,4]]", "--rows", "8..9", "--indecomposable"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "proved_empty");
}

#[test]
fn invalid_input_exit_code() {
    let (code, v) = json(&["snf", "--matrix", "[[1,2],[3,]]"]);
    assert_eq!(code, 1);
    assert!(v["payload"]["error"].as_str().unwrap().contains("column"));
    let (code, _) = run(&["solve-gram", "--gram", "[[1,2],[2,1]]"]);
    assert_eq!(code, 1);
    let (code, _) = run(&["no-such-command"]);
    assert_eq!(code, 1);
}

#[test]
fn file_and_inline_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"rows": [[5, 2], [2, 4]]}"#).unwrap();
    let a = run(&["solve-gram", "--gram", path.to_str().unwrap()]);
    let b = run(&["solve-gram", "--gram", "[[5,2],[2,4]]"]);
    assert_eq!(a, b);
}

#[test]
fn deterministic_output() {
    let args = ["casebook", "run", "--dim", "14"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn regression_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rules.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "dimension": 13, "rules": [
            {"id": "wrong", "kind": "feasibility", "candidate": [[7, 1], [1, 4]],
             "expected_outcome": {"status": "rejected"}}
        ]}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let (code, v) = json(&[
        "casebook", "run", "--dim", "13", "--rules", path.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "regression");
    let written: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(written, v["payload"]);
}

#[test]
fn max_sum_bound() {
    let out = Command::new(env!("CARGO_BIN_EXE_blocksmith"))
        .args(["enumerate-cartan", "--sum", "13", "--l", "2"])
        .env("BLOCKSMITH_MAX_SUM", "12")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn contribution_heights() {
    let (code, v) = json(&[
        "contribution",
        "--q",
        "[[2,0],[1,0],[1,0],[0,1],[0,1],[0,1],[1,1]]",
        "--c",
        "[[7,1],[1,4]]",
        "--defect-order",
        "27",
        "--heights",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["diagonal"], serde_json::json!([16, 4, 4, 7, 7, 7, 9]));
    assert_eq!(v["payload"]["heights"]["k0"], 6);
    let (code, v) = json(&["heights", "--diag", "16,4,4,7,7,7,9", "--defect-order", "27"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["k_h"], serde_json::json!({"0": 6, "1": 1}));
}

#[test]
fn text_formats() {
    let (code, s) = run(&["enumerate-cartan", "--sum", "13", "--l", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(s.lines().count(), 10);
    assert!(s.starts_with("matrix,det,elementary_divisors,verdict\n"));
    let (code, s) = run(&["brauer-trees", "--dim", "13", "--format", "table"]);
    assert_eq!(code, 0);
    assert_eq!(s.lines().count(), 6);
    let (_, v) = json(&["brauer-trees", "--edges", "3"]);
    assert_eq!(v["payload"]["count"], 4);
}
