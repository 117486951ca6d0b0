use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn degmag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degmag")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = degmag(args);
    assert!(out.status.success(), "{:?} failed: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn kstar_near_065() {
    let v = json(&["dynamics", "kstar", "--nu", "2", "--parity", "even"]);
    assert_eq!(v["schema"], 1);
    let k = v["kstar"].as_f64().unwrap();
    assert!((k - 0.65).abs() <= 0.01, "{k}");
    for key in ["kappa", "omega_star", "S0"] {
        assert!(v[key].as_f64().unwrap().is_finite());
    }
}

#[test]
fn trajectory_closes() {
    let text = ok(&["dynamics", "trajectory", "--nu", "2", "--parity", "even", "--k", "0.65", "--periods", "3"]);
    let (h, rows) = csv_table(&text);
    assert_eq!(h, ["t", "x1", "x2", "xi1", "xi2", "energy"]);
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((last[1] - first[1]).abs() < 1e-6 && (last[3] - first[3]).abs() < 1e-6);
    let gap = ((last[1] - first[1]).powi(2) + (last[2] - first[2]).powi(2)).sqrt();
    assert!(gap <= 1e-4, "endpoint {gap:.3e} from start");
}

#[test]
fn trajectory_svg() {
    let text = ok(&["dynamics", "trajectory", "--k", "0.65", "--format", "svg"]);
    assert!(text.starts_with("<?xml") && text.contains("<polyline") && text.trim_end().ends_with("</svg>"));
}

#[test]
fn odd_orbit_table_antisymmetric() {
    let text = ok(&[
        "dynamics", "orbit-table", "--nu", "3", "--parity", "odd", "--k-min", "-0.9", "--k-max", "0.9", "--n", "19",
    ]);
    let (h, rows) = csv_table(&text);
    assert_eq!(h, ["k", "b1", "b2", "T", "I", "v"]);
    assert_eq!(rows.len(), 19);
    let v = column(&h, &rows, "v");
    for i in 0..19 {
        assert!((v[i] + v[18 - i]).abs() <= 1e-8, "row {i}");
    }
}

#[test]
fn eigs_fd_matches_bs() {
    let text = ok(&["spectrum", "eigs", "--nu", "2", "--xi2", "0.65", "--hbar", "0.05", "--lo", "-0.2", "--hi", "0.2"]);
    let (h, rows) = csv_table(&text);
    assert_eq!(h, ["n", "lambda_fd", "lambda_bs", "delta"]);
    assert!(!rows.is_empty());
    let worst = column(&h, &rows, "delta").iter().fold(0.0f64, |m, d| m.max(d.abs()));
    assert!(worst <= 0.01, "{worst}");
}

#[test]
fn n0_empty_below_minimum() {
    let v = json(&["spectrum", "n0", "--nu", "2", "--xi2", "-2", "--hbar", "0.3", "--parity", "even"]);
    assert_eq!(v["n0"], 0);
    assert!(v["n0_weyl"].is_number() && v["S"].is_number());
}

#[test]
fn gaps_exponent_four_thirds() {
    let v = json(&["spectrum", "gaps", "--nu", "2", "--xi2", "0", "--hbar-list", "0.2,0.1,0.05,0.025"]);
    let e = v["exponents"][0][1].as_f64().unwrap();
    assert!((e - 4.0 / 3.0).abs() <= 0.15, "{e}");
}

#[test]
fn curves_table() {
    let text = ok(&["spectrum", "curves", "--hbar", "0.2", "--xi2-min", "0", "--xi2-max", "1.2", "--points", "5"]);
    let (h, rows) = csv_table(&text);
    assert_eq!(h, ["xi2", "index", "class", "lambda", "d1", "d2"]);
    assert_eq!(rows.len(), 5);
}

#[test]
fn gfun_zero_mean() {
    let (h, rows) = csv_table(&ok(&["asympt", "gfun", "--n", "201"]));
    assert_eq!(h, ["t", "G", "G1"]);
    assert_eq!(rows.len(), 201);
    let g = column(&h, &rows, "G");
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    assert!(mean.abs() <= 1e-6, "mean of G = {mean:.3e}");
}

#[test]
fn correction_identity() {
    let v = json(&["asympt", "correction", "--nu", "2", "--hbar", "0.05", "--gamma-bar", "0.1", "--w", "1"]);
    let f = |k: &str| v[k].as_f64().unwrap();
    let d = f("corr_exact") - (f("n0_integral") - f("emw0_integral"));
    assert!(d.abs() <= 1e-9 * f("n0_integral").abs());
}

#[test]
fn scaling_residual_decreasing() {
    let text = ok(&["asympt", "scaling", "--nu", "2", "--hbar-list", "0.1,0.05,0.025", "--gamma-bar", "0.1"]);
    let (h, rows) = csv_table(&text);
    assert_eq!(rows.len(), 3);
    let r: Vec<f64> = column(&h, &rows, "residual").iter().map(|x| x.abs()).collect();
    assert!(r[1] < r[0] && r[2] < r[1], "residual column {r:?}");
}

#[test]
fn counting_json() {
    let v = json(&["asympt", "counting", "--hbar", "0.1", "--amp", "0.2"]);
    assert!(v["counting_density"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = degmag(&["verify", "--quick", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["all_pass"], true);
    for c in v["criteria"].as_array().unwrap() {
        for key in ["criterion", "target", "measured", "pass"] {
            assert!(!c[key].is_null(), "{key}");
        }
    }
}

#[test]
fn tampered_drift_fails_kstar() {
    let out = degmag(&["verify", "--quick", "--tamper", "flip-drift"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c1 = v["criteria"].as_array().unwrap().iter().find(|c| c["criterion"] == 1).unwrap();
    assert_eq!(c1["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL [ 1]"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(degmag(&["bogus"]).status.code(), Some(2));
    assert_eq!(degmag(&["dynamics", "kstar", "--parity", "sideways"]).status.code(), Some(2));
    assert_eq!(degmag(&["dynamics", "orbit-table", "--k-min", "1", "--k-max", "0", "--n", "3"]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/dir/out.csv");
    assert_eq!(degmag(&["asympt", "gfun", "--out", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let out = degmag(&["spectrum", "n0", "--xi2", "0.5", "--hbar", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "InvalidParameter");
    assert!(v["message"].is_string());
    let out = degmag(&["dynamics", "orbit-table", "--k-min", "0.5", "--k-max", "1.5", "--n", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        ok(&["dynamics", "orbit-table", "--k-min", "-0.9", "--k-max", "3", "--n", "25", "--out", p.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
