use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forestmat")).args(args).output().expect("binary runs")
}

fn run_on(command: &str, file: &str, extra: &[&str]) -> (i32, Value) {
    let path = data(file);
    let mut args = vec![command, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let doc = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    (out.status.code().unwrap(), doc)
}

#[test]
fn forests_on_p3() {
    let (code, doc) = run_on("forests", "p3.txt", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["sigmas"], serde_json::json!([1.0, 2.0, 1.0]));
    assert_eq!(doc["d_prime"], 1);
    assert_eq!(doc["jbar"][0], serde_json::json!([1.0, 1.0, 1.0]));
    assert_eq!(doc["labeling"], "row-major, 1-based vertex labels");
}

#[test]
fn exact_forests_on_p3() {
    let path = data("p3.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_forestmat"))
        .args(["forests", "--input", path.to_str().unwrap()])
        .env("FOREST_CALC_EXACT", "1")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["parameters"]["exact"], true);
    assert_eq!(doc["sigmas"], serde_json::json!(["1", "2", "1"]));
}

#[test]
fn mean_scores_on_two_sources() {
    let (code, doc) = run_on("rank", "two_sources.txt", &["--method", "mean-jbar"]);
    assert_eq!(code, 0);
    assert_eq!(doc["scores"], serde_json::json!([0.5, 0.5, 0.0]));
    assert_eq!(doc["ranking"], serde_json::json!([[1, 2], [3]]));
}

#[test]
fn knots_and_reach_report_patterns() {
    let (_, doc) = run_on("knots", "two_sources.txt", &[]);
    assert_eq!(doc["knots"], serde_json::json!([[1], [2]]));
    assert_eq!(doc["d_prime"], 2);
    let (_, doc) = run_on("reach", "p3.txt", &["--tau", "0.5"]);
    assert_eq!(doc["reachability"], serde_json::json!([[1, 1, 1], [0, 1, 1], [0, 0, 1]]));
    assert_eq!(doc["top_reachability"], serde_json::json!([[1, 1, 1], [0, 0, 0], [0, 0, 0]]));
    assert_eq!(doc["parameters"]["tau"], 0.5);
}

#[test]
fn access_check_echoes_parameters() {
    let (code, doc) = run_on("access", "p3.txt", &["--tau", "inf", "--check", "transit:A"]);
    assert_eq!(code, 0);
    assert_eq!(doc["parameters"]["tau"], "inf");
    assert_eq!(doc["parameters"]["check"], "transit-property:A");
    assert_eq!(doc["report"]["verdict"], "fail");
    let (_, doc) = run_on("access", "p3.txt", &["--tau", "inf", "--check", "transit:A", "--mode", "nonstrict"]);
    assert_eq!(doc["report"]["verdict"], "pass");
}

#[test]
fn markov_limit_matches_jbar_transpose() {
    let (code, doc) = run_on("markov", "weighted5.txt", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["equals_jbar_transpose"], true);
    assert!(doc["parameters"]["alpha"].as_f64().unwrap() > 0.0);
    let (code, doc) = run_on("markov", "weighted5.txt", &["--alpha", "5"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "parameter_out_of_range");
}

#[test]
fn identical_invocations_are_byte_identical() {
    for (cmd, extra) in [("simulate", vec!["--trials", "5000", "--seed", "3"]), ("markov", vec![]), ("verify", vec![])] {
        let path = data("dissemination3.txt");
        let mut args = vec![cmd, "--input", path.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(run(&args).stdout, run(&args).stdout, "{cmd}");
    }
}

#[test]
fn domain_errors_exit_one_with_error_json() {
    let (code, doc) = run_on("rank", "p3.txt", &["--method", "daniels"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "not_strong");
    let (code, doc) = run_on("forests", "missing.txt", &[]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "io");
    let (code, doc) = run_on("simulate", "tournament4.txt", &[]);
    assert_eq!(code, 1);
    assert!(doc["error"]["message"].is_string());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = std::env::temp_dir().join(format!("forestmat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("loop.txt");
    std::fs::write(&file, "3\n1 2\n2 2\n").unwrap();
    let out = run(&["forests", "--input", file.to_str().unwrap()]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(doc["error"]["message"].as_str().unwrap().contains("line 3"), "{doc}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["forests"]).status.code(), Some(2));
    let path = data("p3.txt");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["rank", "--input", p, "--method", "elo"]).status.code(), Some(2));
    assert_eq!(run(&["access", "--input", p, "--check", "bogus"]).status.code(), Some(2));
}
