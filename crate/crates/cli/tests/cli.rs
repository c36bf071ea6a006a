use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equilat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn ones(n: usize) -> Value {
    json!({ "k": 1, "n": n, "A": [vec!["1"; n]] })
}

#[test]
fn construct_hyperplane_orthant_split() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "h4.json", &ones(4));
    let out = dir.path().join("cert.json");
    let o = run(&["construct", "--bound", "2", "--ell", "1", s(&spec), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = read(&out);
    assert_eq!(cert["points"].as_array().unwrap().len(), 4);
    assert_eq!(cert["distance"], "1");
    let v = run(&["verify", s(&out), "--spec", s(&spec)]);
    assert_eq!(code(&v), 0);
}

#[test]
fn auto_picks_orthant_split_with_ell_two_at_k2_n9() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("s.json");
    assert_eq!(code(&run(&["gen", "spec", "--k", "2", "--n", "9", "--seed", "5", "-o", s(&spec)])), 0);
    let out = dir.path().join("c.json");
    assert_eq!(code(&run(&["construct", s(&spec), "-o", s(&out)])), 0);
    let cert = read(&out);
    assert_eq!(cert["source"]["construction"], "orthant_split");
    assert_eq!(cert["source"]["ell"], 2);
    assert!(cert["points"].as_array().unwrap().len() >= 9);
}

#[test]
fn malformed_rational_reports_position() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.json", &json!({ "k": 1, "n": 3, "A": [["1", "1/0", "2"]] }));
    let o = run(&["construct", s(&spec)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("A[0][1]"), "{err}");
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let rank_deficient = write(&dir, "r.json", &json!({ "k": 2, "n": 3, "A": [["1", "2", "3"], ["2", "4", "6"]] }));
    assert_eq!(code(&run(&["construct", s(&rank_deficient)])), 2);
    let spec = write(&dir, "h.json", &ones(4));
    assert_eq!(code(&run(&["construct", "--bound", "3", "--ell", "5", s(&spec)])), 2);
    assert_eq!(code(&run(&["bounds", "--n", "3", "--k", "3"])), 2);
    let flat = write(&dir, "p.json", &json!({ "d": 2, "normals": [["1", "0"], ["2", "0"]] }));
    assert_eq!(code(&run(&["polytope", s(&flat)])), 2);
}

#[test]
fn budget_exceeded_exits_4() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "h.json", &ones(8));
    assert_eq!(code(&run(&["construct", "--bound", "1", "--budget", "16", s(&spec)])), 4);
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "h.json", &ones(5));
    let out = dir.path().join("c.json");
    assert_eq!(code(&run(&["construct", "--bound", "3", "--ell", "1", s(&spec), "-o", s(&out)])), 0);
    let mut cert = read(&out);
    cert["points"][1][0] = json!("-1/2");
    let bad = write(&dir, "bad.json", &cert);
    let o = run(&["verify", s(&bad)]);
    assert_eq!(code(&o), 3);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert!(report["failures"].as_array().unwrap().iter().all(|f| f["pair"].is_null()
        || f["pair"].as_array().unwrap().contains(&json!(1))));
}

#[test]
fn bounds_table_json() {
    let o = run(&["bounds", "--n", "9", "--k", "2", "--json"]);
    assert_eq!(code(&o), 0);
    let t: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["best"].as_array().unwrap().len(), 3);
    let rows = t["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["bound"] == "2" && r["ell"] == 2 && r["raw"] == "17/2" && r["ceiled"] == "9"));
    let text = run(&["bounds", "--n", "9", "--k", "2"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("best: bound 2, ell = 2 with 9 points"));
}

#[test]
fn polytope_cube_and_random() {
    let dir = TempDir::new().unwrap();
    let cube = write(&dir, "cube.json", &json!({ "d": 3, "normals": [["1","0","0"],["0","1","0"],["0","0","1"]] }));
    let out = dir.path().join("r.json");
    assert_eq!(code(&run(&["polytope", s(&cube), "-o", s(&out)])), 0);
    let r = read(&out);
    assert_eq!(r["petty"], true);
    assert_eq!(r["certificate"]["points"].as_array().unwrap().len(), 8);

    let p = dir.path().join("p.json");
    assert_eq!(code(&run(&["gen", "polytope", "--d", "6", "--f", "7", "--seed", "2", "-o", s(&p)])), 0);
    assert_eq!(code(&run(&["polytope", s(&p), "-o", s(&out)])), 0);
    let r = read(&out);
    assert_eq!(r["petty"], true);
    assert!(r["certificate"]["points"].as_array().unwrap().len() >= 7);
}

fn weights(n: usize, first: &str, rest: &str) -> Value {
    let mut w = vec![rest.to_string(); n];
    w[0] = first.to_string();
    json!({ "kind": "weighted_linf", "c": "1/5", "params": { "weights": w } })
}

#[test]
fn perturb_exit_codes() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "o.json", &ones(10));
    let out = dir.path().join("p.json");

    let linf = write(&dir, "linf.json", &weights(10, "1", "1"));
    assert_eq!(code(&run(&["perturb", s(&spec), s(&linf), "--ell", "2", "-o", s(&out)])), 0);
    let r = read(&out);
    assert_eq!(r["convergence"]["iterations"], 1);
    assert_eq!(r["certificate"]["points"].as_array().unwrap().len(), 6);

    let scaled = write(&dir, "scaled.json", &weights(10, "5/6", "5/6"));
    assert_eq!(code(&run(&["perturb", s(&spec), s(&scaled), "--ell", "2", "-o", s(&out)])), 0);
    let r = read(&out);
    assert!(r["eps"]["values"].as_array().unwrap().iter().all(|v| v == "1/5"));

    assert_eq!(code(&run(&["perturb", s(&spec), s(&scaled), "--ell", "2", "--max-iter", "2", "-o", s(&out)])), 5);
    assert!(read(&out)["convergence"]["residuals"].as_array().unwrap().len() == 2);

    let low = write(&dir, "low.json", &weights(10, "5/7", "1"));
    assert_eq!(code(&run(&["perturb", s(&spec), s(&low), "--ell", "2", "-o", s(&out)])), 6);

    let short = write(&dir, "short.json", &weights(3, "1", "1"));
    assert_eq!(code(&run(&["perturb", s(&spec), s(&short), "--ell", "2"])), 2);
}

#[test]
fn output_is_byte_identical_across_workers() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("s.json");
    assert_eq!(code(&run(&["gen", "spec", "--k", "2", "--n", "11", "--seed", "9", "-o", s(&spec)])), 0);
    let mut outputs = Vec::new();
    for w in ["1", "3", "8", "1"] {
        let o = run(&["construct", "--bound", "1", "--workers", w, s(&spec)]);
        assert_eq!(code(&o), 0);
        outputs.push(o.stdout);
    }
    assert!(outputs.windows(2).all(|p| p[0] == p[1]));
    let a = run(&["gen", "degenerate", "--k", "2", "--n", "8", "--seed", "4"]).stdout;
    let b = run(&["gen", "degenerate", "--k", "2", "--n", "8", "--seed", "4"]).stdout;
    assert_eq!(a, b);
}
