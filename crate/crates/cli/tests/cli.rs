use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_theta-opers"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn curve_file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn periods_of_the_square_lattice() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let out = run(&["--curve", c.to_str().unwrap(), "periods"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["genus"], 1);
    let (re, im) = complex(&r["riemann_matrix"][0][0]);
    assert!(re.abs() < 1e-9 && (im - 1.0).abs() < 1e-9, "{re} {im}");
    assert!(r["symmetry_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn periods_csv_lists_the_riemann_matrix() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 0, 0, 1]}"#);
    let out = run(&["--curve", c.to_str().unwrap(), "--format", "csv", "periods"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "row,col,re,im");
    assert_eq!(lines.len(), 5);
}

#[test]
fn malformed_input_exits_with_input_code() {
    let dir = TempDir::new().unwrap();
    let bad = curve_file(dir.path(), "bad.json", r#"{"f": [0, "#);
    let out = run(&["--curve", bad.to_str().unwrap(), "periods"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let singular = curve_file(dir.path(), "sing.json", r#"{"f": [0, 0, 0, 1]}"#);
    assert_eq!(run(&["--curve", singular.to_str().unwrap(), "periods"]).status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["--curve", missing.to_str().unwrap(), "periods"]).status.code(), Some(2));
    assert_eq!(run(&["periods"]).status.code(), Some(2));
}

#[test]
fn unknown_suite_is_rejected() {
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn jets_suite_passes_exactly() {
    let out = run(&["verify", "jets", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["max_residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn fay_suite_passes_in_genus_one() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let out = run(&["--curve", c.to_str().unwrap(), "verify", "fay"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn curve_suites_need_a_curve() {
    assert_eq!(run(&["verify", "kernels"]).status.code(), Some(2));
}

#[test]
fn probe_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let c = c.to_str().unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let a = run(&["--curve", c, "--seed", "0", "probe", "--csv-out", csv1.to_str().unwrap()]);
    let b = run(&["--curve", c, "--seed", "0", "probe", "--csv-out", csv2.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let r = json(&a);
    assert_eq!(r["samples"], 200);
    assert_eq!(r["nontrivial_collisions"], 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());

    let c3 = run(&["--curve", c, "--seed", "1", "probe"]);
    assert_ne!(a.stdout, c3.stdout);
}

#[test]
fn probe_flags_a_negated_point_as_trivial() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let out = run(&[
        "--curve",
        c.to_str().unwrap(),
        "--samples",
        "2",
        "probe",
        "--point",
        "[[0.21, 0.13]]",
        "--point",
        "[[-0.21, -0.13]]",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["trivial_collisions"].as_u64().unwrap() >= 1);
    assert_eq!(r["nontrivial_collisions"], 0);
}

#[test]
fn probe_needs_two_samples() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let out = run(&["--curve", c.to_str().unwrap(), "--samples", "1", "probe"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theta_closed_form() {
    let out = run(&["eval", "theta", "--omega", "[[[0, 1]]]"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = complex(&json(&out)["value"]);
    assert!((re - 1.086_434_811_213_308).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn odd_theta_vanishes_at_origin() {
    let out = run(&["eval", "theta", "--omega", "[[[0, 1]]]", "--characteristic", "[[1], [1]]"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = complex(&json(&out)["value"]);
    assert!(re.hypot(im) < 1e-14);
}

#[test]
fn non_symmetric_omega_is_input_error() {
    let out = run(&["eval", "theta", "--omega", "[[[0, 1], 0.1], [0.2, [0, 1]]]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn szego_on_the_theta_divisor() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let c = c.to_str().unwrap();
    let on = run(&["--curve", c, "eval", "szego", "--e", "[[0.5, 0.5]]", "--x", "[0.3, 0.4]", "--y", "[-0.7, 0.2]"]);
    assert_eq!(on.status.code(), Some(4));
    let off = run(&["--curve", c, "eval", "szego", "--e", "[[0.5, 0]]", "--x", "[0.3, 0.4]", "--y", "[-0.7, 0.2]"]);
    assert_eq!(off.status.code(), Some(0));
}

#[test]
fn bergman_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 0, 0, 1]}"#);
    let c = c.to_str().unwrap();
    let p = r#"{"x": [0.3, 0.4], "sheet": -1}"#;
    let q = "[-0.7, 0.2]";
    let a = json(&run(&["--curve", c, "eval", "bergman", "--x", p, "--y", q]));
    let b = json(&run(&["--curve", c, "eval", "bergman", "--x", q, "--y", p]));
    let (ar, ai) = complex(&a["value"]);
    let (br, bi) = complex(&b["value"]);
    assert!((ar - br).hypot(ai - bi) <= 1e-9 * ar.hypot(ai).max(1.0));
}

#[test]
fn klein_coordinates_without_points() {
    let dir = TempDir::new().unwrap();
    let c = curve_file(dir.path(), "c.json", r#"{"f": [0, -1, 0, 1]}"#);
    let out = run(&["--curve", c.to_str().unwrap(), "eval", "klein", "--e", "[[0.21, 0.13]]"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r.get("coordinates").is_some() || r.get("coords").is_some(), "{r}");
}

#[test]
fn out_flag_writes_a_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("theta.json");
    let out = run(&["--out", target.to_str().unwrap(), "eval", "theta", "--omega", "[[[0, 1]]]"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_slice(&std::fs::read(target).unwrap()).unwrap();
    assert_eq!(r["what"], "theta");
}
