use std::path::PathBuf;
use std::process::{Command, Output};

use crnlab::fixtures;

fn write(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crnlab")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&run_ok(args)).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn classify_reverse_lotka_volterra() {
    let f = write("rlv.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let text = run_ok(&["classify", path(&f)]);
    assert!(text.contains("strongly endotactic: true"), "{text}");
    let v = json(&["classify", path(&f), "--json"]);
    assert_eq!(v["result"]["strongly_endotactic"], true);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn classify_conversion_reports_witness() {
    let f = write("ab.crn", "A -> B\n");
    let v = json(&["classify", path(&f), "--json"]);
    assert_eq!(v["result"]["endotactic"], false);
    assert!(v["result"]["witness"].is_array());
}

#[test]
fn classify_single_direction() {
    let f = write("tilted.crn", fixtures::TILTED_THREE_REACTIONS.text);
    assert!(run_ok(&["classify", path(&f), "--direction", "1,0"]).contains("w-endotactic: true"));
    let v = json(&["classify", path(&f), "--direction", "1,0", "--json"]);
    assert_eq!(v["result"]["w_endotactic"], true);
}

#[test]
fn birch_closed_form_and_echo() {
    let f = write("iso.crn", "A <-> B\n");
    let v = json(&["birch", path(&f), "--x0", "2,2", "--alpha", "1,3"]);
    let p = floats(&v["result"]["point"]);
    assert!((p[0] - 1.0).abs() < 1e-10 && (p[1] - 3.0).abs() < 1e-10);
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-12);
    let g = write("full.crn", "0 <-> A\n0 <-> B\n");
    let v = json(&["birch", path(&g), "--x0", "5,7", "--alpha", "0.5,2"]);
    assert_eq!(floats(&v["result"]["point"]), vec![0.5, 2.0]);
}

#[test]
fn simulate_conversion_matches_closed_form() {
    let f = write("ab_sim.crn", "A -> B\n");
    let v = json(&["simulate", path(&f), "--x0", "1,0.5", "--t-end", "2", "--rates", "1"]);
    let times = floats(&v["result"]["times"]);
    let states = v["result"]["states"].as_array().unwrap();
    assert_eq!(*times.last().unwrap(), 2.0);
    for (t, x) in times.iter().zip(states) {
        let x = floats(x);
        assert!((x[0] - (-t).exp()).abs() < 1e-6);
        assert!((x[0] + x[1] - 1.5).abs() < 1e-9);
    }
}

#[test]
fn simulate_reverse_lotka_volterra_rest_point() {
    let f = write("rlv_sim.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let v = json(&["simulate", path(&f), "--x0", "1,1", "--t-end", "10"]);
    for x in v["result"]["states"].as_array().unwrap() {
        for c in floats(x) {
            assert!((c - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn simulate_futile_cycle_plot() {
    let f = write("futile.crn", fixtures::FUTILE_CYCLE.text);
    let out = run_ok(&[
        "simulate",
        path(&f),
        "--x0",
        "1,0.01,0.01,1,0.01",
        "--rates",
        "1,1,2,2",
        "--t-end",
        "50",
        "--format",
        "svg",
        "--species",
        "E,F",
    ]);
    assert!(out.starts_with("<svg") && out.contains("schema_version"));
    let csv = run_ok(&["simulate", path(&f), "--x0", "1,0.01,0.01,1,0.01", "--rates", "1,1,2,2", "--t-end", "50", "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,S0,S1,S2,E,F,g,dg_dt");
    let first: f64 = rows[1].split(',').nth(5).unwrap().parse().unwrap();
    let last: f64 = rows.last().unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!(last < first);
}

#[test]
fn steady_state_and_no_convergence() {
    let f = write("rlv_steady.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let v = json(&["steady", path(&f), "--x0", "3,0.2", "--rates", "1,1,1"]);
    let x = floats(&v["result"]["x"]);
    assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] - 1.0).abs() < 1e-10);
    let g = write("ab_steady.crn", "A -> B\n");
    assert_eq!(run(&["steady", path(&g), "--x0", "1,1", "--rates", "1"]).status.code(), Some(3));
}

#[test]
fn scan_reverse_lotka_volterra_directions() {
    let f = write("rlv_scan.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let v = json(&["scan", path(&f), "--samples", "4000", "--seed", "5"]);
    assert_eq!(v["seed"], 5);
    let clusters = v["result"]["near_zero_clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 3);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for target in [[-1.0, 0.0], [0.0, -1.0], [s, s]] {
        assert!(clusters.iter().any(|c| {
            let c = floats(&c["center"]);
            (c[0] * target[0] + c[1] * target[1]).clamp(-1.0, 1.0).acos() < 0.05
        }));
    }
    assert!(run_ok(&["scan", path(&f), "--format", "svg"]).contains("</svg>"));
}

#[test]
fn scan_conversion_has_no_cutoff() {
    let f = write("ab_scan.crn", "A -> B\n");
    let v = json(&["scan", path(&f), "--samples", "1000"]);
    assert!(v["result"]["log_theta_hat"].is_null());
    let v = json(&["scan", path(&f), "--samples", "200", "--x0", "1,1"]);
    assert_eq!(v["result"]["mode"]["mode"], "polyhedron");
    assert!(v["result"]["log_theta_hat"].is_null());
}

#[test]
fn jets_reverse_lotka_volterra_domination() {
    let f = write("rlv_jets.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let v = json(&["jets", path(&f), "--frame", "0,-1;-1,0"]);
    assert_eq!(v["result"]["domination"]["all_dominated"], true);
    assert_eq!(v["result"]["reactions"][0]["class"]["type"], "draining");
    let csv = run_ok(&["jets", path(&f), "--frame", "0,-1;-1,0", "--format", "csv"]);
    assert!(csv.contains("draining,dominating,i,log_ratio"));
    let g = write("iso_jets.crn", "A <-> B\n");
    let v = json(&["jets", path(&g), "--frame", "1,1;-1,1", "--schedule", "expsq", "--i-max", "50"]);
    assert_eq!(v["result"]["domination"]["all_dominated"], false);
    assert_eq!(v["result"]["domination"]["warnings"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["jets", path(&g), "--frame", "1,0;1,1"]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let f = write("rlv_det.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let args = ["simulate", path(&f), "--x0", "0.5,2", "--t-end", "5", "--policy", "piecewise", "--seed", "9", "--rates", "1,1,1"];
    let a = run_ok(&args);
    assert_eq!(a, run_ok(&args));
    assert!(a.contains("\"seed\": 9"));
    let csv: Vec<&str> = args.iter().copied().chain(["--format", "csv"]).collect();
    assert_eq!(run_ok(&csv), run_ok(&csv));
    let scan = ["scan", path(&f), "--samples", "500", "--seed", "2"];
    assert_eq!(run_ok(&scan), run_ok(&scan));
}

#[test]
fn exit_codes() {
    let bad = write("bad.crn", "A -> -> B\n");
    assert_eq!(run(&["classify", path(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["classify", "/nonexistent/file.crn"]).status.code(), Some(1));
    let f = write("rlv_limit.crn", fixtures::REVERSE_LOTKA_VOLTERRA.text);
    let out = Command::new(env!("CARGO_BIN_EXE_crnlab"))
        .args(["classify", path(&f)])
        .env("CRN_MAX_HYPERPLANES", "1")
        .output()
        .unwrap();
    // a fast path cannot fire for this network, so the limit is fatal
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
