use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn freeness_at_depth_four_passes() {
    let out = run(&["freeness", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "freeness");
    assert_eq!(v["passed"], true);
}

#[test]
fn lemma_verify_covers_every_branch() {
    let out = run(&["lemma-verify", "--instances", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let counts = &json(&out)["report"]["branch_counts"];
    for branch in ["scalar_identity", "scalar_target", "zero"] {
        assert!(counts[branch].as_u64().unwrap() > 0, "{branch}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&["faithfulness", "--instances", "20", "--seed", "3", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn single_factor_moments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.json");
    fs::write(
        &cfg,
        r#"{"schema": 1, "factors": [{"label": "a", "blocks": [1, 2], "weights": [[0.4], [0.3, 0.3]]}]}"#,
    )
    .unwrap();
    let out = run(&["moments", "--config", cfg.to_str().unwrap(), "--with-oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let one = v["report"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "1")
        .unwrap()
        .clone();
    assert!((one["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn custom_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let polys = dir.path().join("polys.json");
    fs::write(
        &polys,
        r#"{"schema": 1,
            "elements": {"P": {"factor": "p", "blocks": [[[[1, 0]]], [[[0, 0]]]]}},
            "polynomials": [{"name": "P", "terms": [{"coef": [1, 0], "word": [["p", "P"]]}]}]}"#,
    )
    .unwrap();
    let out = run(&["moments", "--polys", polys.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["report"]["entries"][0]["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"schema": 1, "factors": [{"label": "a", "blocks": [1, 1], "weights": [[0.7], [0.7]]}]}"#).unwrap();
    assert_eq!(run(&["moments", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(run(&["moments", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["moments", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    assert_eq!(run(&["freeness", "--tol-free", "-1"]).status.code(), Some(2));
}

#[test]
fn trivial_factor_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trivial.json");
    fs::write(&cfg, r#"{"schema": 1, "factors": [{"label": "a", "blocks": [1]}, {"label": "b", "blocks": [1, 1]}]}"#)
        .unwrap();
    assert_eq!(run(&["freeness", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn insufficient_depth_exits_three() {
    let out = run(&["faithfulness", "--depth", "3", "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains('4'));
}

#[test]
fn toeplitz_example() {
    let out = run(&["example-toeplitz", "--K", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["v_onto"]["onto"], true);
    assert_eq!(v["report"]["noncyclic"]["noncyclic"], true);
}
