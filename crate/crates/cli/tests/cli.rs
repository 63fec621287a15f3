use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tverberg")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn square(dir: &Path) -> String {
    let path = dir.join("square.json");
    fs::write(&path, r#"{"k":2,"r":2,"dim":2,"colors":[[[0,0],[1,0]],[[0,1],[1,1]]]}"#).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_square_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let input = square(dir.path());
    let out = dir.path().join("report.json");
    let res = run(&["solve", "--space", "euclid", "--in", &input, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rep = read_json(&out);
    assert!((rep["bound_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((rep["theoretical_bound"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((rep["objective"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(rep["certificate"]["passed"], Value::Bool(true));
    let cp = rep["common_point"].as_array().unwrap();
    assert!((cp[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn restarts_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.json");
    let res = run(&[
        "generate",
        "--kind",
        "gaussian",
        "--k",
        "5",
        "--r",
        "3",
        "--dim",
        "3",
        "--seed",
        "2",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let out = dir.path().join("rep.json");
    let res = run(&[
        "solve",
        "--space",
        "euclid",
        "--in",
        inst.to_str().unwrap(),
        "--restarts",
        "4",
        "--seed",
        "10",
        "--oracle",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rep = read_json(&out);
    let restarts = rep["restarts"].as_array().unwrap();
    assert_eq!(restarts.len(), 4);
    let best = restarts.iter().map(|r| r["objective"].as_f64().unwrap()).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(rep["objective"].as_f64().unwrap(), best);
    assert_eq!(restarts[0]["seed"].as_u64().unwrap(), 10);
    assert!(rep["oracle"]["local_gap"].as_f64().unwrap() >= -1e-9);
    assert_eq!(rep["oracle"]["num_enumerated"].as_u64().unwrap(), 14400);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("h.json");
    run(&[
        "generate",
        "--kind",
        "hyperbolic",
        "--k",
        "3",
        "--r",
        "3",
        "--dim",
        "2",
        "--seed",
        "4",
        "--out",
        inst.to_str().unwrap(),
    ]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let res = run(&[
            "solve",
            "--space",
            "hyper",
            "--in",
            inst.to_str().unwrap(),
            "--restarts",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(read_json(&a)["residual"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn verify_flags_tampered_partition() {
    let dir = tempfile::tempdir().unwrap();
    let input = square(dir.path());
    let part = dir.path().join("p.json");
    fs::write(&part, r#"{"assignment":[[0,1],[0,1]]}"#).unwrap();
    let res = run(&["verify", "--space", "euclid", "--in", &input, "--partition", part.to_str().unwrap()]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("parts (0,1)"), "{stderr}");
    assert!(stderr.contains("pair-inequality[0,1]"), "{stderr}");

    fs::write(&part, r#"{"assignment":[[0,1],[1,0]]}"#).unwrap();
    let res = run(&["verify", "--space", "euclid", "--in", &input, "--partition", part.to_str().unwrap()]);
    assert!(res.status.success());
}

#[test]
fn spherical_demo_passes() {
    let res = run(&["demo", "--kind", "spherical-square"]);
    assert!(res.status.success());
    let demo: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(demo["certificate"]["passed"], Value::Bool(true));
    let gap = demo["partitions"][0]["gap"].as_f64().unwrap();
    assert!((gap - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn linf_sweep_within_half() {
    let res = run(&[
        "sweep", "--space", "banach", "--norm", "linf", "--k", "2..3", "--r", "2..3", "--trials", "5", "--oracle",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rep: Value = serde_json::from_slice(&res.stdout).unwrap();
    for cell in rep["cells"].as_array().unwrap() {
        assert!(cell["max_bound_ratio"].as_f64().unwrap() <= 0.5 + 1e-7);
        assert_eq!(cell["all_passed"], Value::Bool(true));
    }
    assert_eq!(rep["trials"].as_array().unwrap().len(), 20);
}

#[test]
fn euclid_sweep_within_bound() {
    let res = run(&["sweep", "--space", "euclid", "--k", "2..5", "--r", "2..4", "--trials", "20", "--seed", "3"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rep: Value = serde_json::from_slice(&res.stdout).unwrap();
    for cell in rep["cells"].as_array().unwrap() {
        let r = cell["r"].as_f64().unwrap();
        assert!(cell["max_bound_ratio"].as_f64().unwrap() <= 1.0 / (2.0 * r).sqrt() + 1e-7);
    }
}

#[test]
fn malformed_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"k":2,"r":2,"dim":2,"colors":[[[0,0]],[[1,1]]]}"#).unwrap();
    let res = run(&["solve", "--in", bad.to_str().unwrap()]);
    assert!(!res.status.success());
    let res = run(&["solve", "--in", dir.path().join("missing.json").to_str().unwrap()]);
    assert!(!res.status.success());
    let euclid = square(dir.path());
    let res = run(&["solve", "--space", "hyper", "--in", &euclid]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("hyperboloid"));
}
