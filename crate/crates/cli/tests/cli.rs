use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn eprkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eprkit")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = eprkit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid JSON")
}

/// Rows of a CSV table keyed by header.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn symmetric_efficiency_preset_crosses_at_half() {
    let (h, rows) = table(&ok(&["sweep", "--preset", "fig3-symmetric"]));
    let eta = column(&h, &rows, "eta");
    let eps = column(&h, &rows, "epsilon");
    assert_eq!(eta.len(), 101);
    for (e, v) in eta.iter().zip(&eps) {
        if (e - 0.5).abs() < 1e-12 {
            assert!((v - 1.0).abs() < 1e-10, "ε({e}) = {v}");
        } else if *e > 0.0 && *e < 0.5 {
            assert!(*v > 1.0, "ε({e}) = {v}");
        } else if *e > 0.5 {
            assert!(*v < 1.0, "ε({e}) = {v}");
        }
    }
}

#[test]
fn perfect_steering_detector_always_gives_paradox() {
    let (h, rows) = table(&ok(&["sweep", "--preset", "fig3-eta-a"]));
    let eta = column(&h, &rows, "eta_A");
    let eps = column(&h, &rows, "epsilon");
    for (e, v) in eta.iter().zip(&eps) {
        if *e > 0.0 {
            assert!(*v < 1.0, "ε({e}) = {v}");
        }
    }
    let (h, rows) = table(&ok(&["sweep", "--preset", "fig3-eta-b"]));
    let eta = column(&h, &rows, "eta_B");
    let eps = column(&h, &rows, "epsilon");
    for (e, v) in eta.iter().zip(&eps) {
        if *e <= 0.5 {
            assert!(*v >= 1.0 - 1e-12, "ε({e}) = {v}");
        }
    }
}

#[test]
fn squeezing_sweep_matches_ideal_product() {
    let (h, rows) = table(&ok(&["sweep", "--variable", "r", "--lo", "0", "--hi", "3", "--steps", "31"]));
    let r = column(&h, &rows, "r");
    let eps_sq = column(&h, &rows, "epsilon_sq");
    assert_eq!(r.len(), 31);
    for (r, v) in r.iter().zip(&eps_sq) {
        assert!((v - 1.0 / (2.0 * r).cosh().powi(2)).abs() < 1e-12, "r = {r}: {v}");
    }
}

#[test]
fn csv_is_plain_and_deterministic() {
    let args = ["sweep", "--variable", "eta_B", "--r", "1.5", "--steps", "11"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert!(!a.contains('\r'));
    assert!(a.starts_with("eta_B,epsilon_sq,"));
    assert!(a.ends_with('\n'));
    let (_, rows) = table(&a);
    assert!(rows[3][1].contains('.') && !rows[3][1].contains(','));
}

#[test]
fn other_sweep_families() {
    let (h, rows) = table(&ok(&["sweep", "--criterion", "bohm", "--variable", "p_W", "--steps", "5"]));
    assert_eq!(h[0], "p_W");
    assert_eq!(rows.last().unwrap().last().unwrap(), "true");
    let (h, rows) = table(&ok(&["sweep", "--criterion", "qkd", "--variable", "eta_B", "--lo", "0.1", "--steps", "10"]));
    assert_eq!(rows.len(), 10);
    assert!(h.contains(&"delta_I_reverse".to_string()));
    let (h, rows) = table(&ok(&["sweep", "--criterion", "teleport", "--variable", "gain", "--r", "0"]));
    for t in column(&h, &rows, "T") {
        assert!(t <= 1.0);
    }
    let v = json(&["sweep", "--criterion", "swap", "--variable", "r", "--steps", "3", "--output", "json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(v["rows"][2]["duan_D"].as_f64().unwrap() < 0.01);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["sweep", "--variable", "r", "--criterion", "bell"][..],
        &["sweep", "--criterion", "cv"],
        &["sweep", "--variable", "r", "--lo", "2", "--hi", "1"],
        &["sweep", "--variable", "p_W", "--criterion", "cv"],
        &["montecarlo", "--n-samples", "9999"],
        &["qkd", "--eta-b", "0"],
        &["teleport", "--r", "-1"],
        &["werner", "--criterion", "chsh"],
        &["catalog", "--output", "xml"],
        &["frobnicate"],
    ] {
        let out = eprkit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(eprkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn montecarlo_report() {
    let args = ["montecarlo", "--r", "1", "--n-samples", "1000000", "--seed", "42"];
    let raw = ok(&args);
    assert_eq!(raw, ok(&args), "same seed must give identical output");
    let v: Value = serde_json::from_str(&raw).unwrap();
    let emp = v["empirical"]["epsilon_sq"].as_f64().unwrap();
    let se = v["empirical"]["stderr"]["epsilon_sq"].as_f64().unwrap();
    let exact = v["analytic"]["epsilon_sq"].as_f64().unwrap();
    assert!((exact - 1.0 / 2f64.cosh().powi(2)).abs() < 1e-12);
    assert!((emp - exact).abs() < 3.0 * se, "{emp} vs {exact} ± {se}");
    assert!(v["analytic"]["stderr"].is_null());

    let v = json(&["montecarlo", "--r", "0", "--n-samples", "100000", "--seed", "3"]);
    let emp = v["empirical"]["epsilon_sq"].as_f64().unwrap();
    let se = v["empirical"]["stderr"]["epsilon_sq"].as_f64().unwrap();
    assert!((emp - 1.0).abs() < 3.0 * se);
    let other = json(&["montecarlo", "--r", "0", "--n-samples", "100000", "--seed", "4"]);
    assert_ne!(v["empirical"], other["empirical"]);
}

#[test]
fn catalog_check_passes() {
    let v = json(&["catalog", "--check", "--output", "json"]);
    let recs = v.as_array().unwrap();
    let get = |id: &str| recs.iter().find(|r| r["id"] == id).unwrap_or_else(|| panic!("{id}")).clone();
    assert_eq!(get("silberhorn2001")["verdict"]["epr_inferable"], true);
    assert_eq!(get("wenger2005")["verdict"]["epr_paradox"], false);
    assert_eq!(get("julsgaard2001")["verdict"]["entangled"], true);
    assert_eq!(get("julsgaard2001")["verdict"]["epr_inferable"], false);
    assert!(get("zhang2000")["epsilon_sq"].is_null());
    assert_eq!(get("zhang2000")["citation_only"], true);
    assert!(recs.iter().all(|r| r["verdict"]["consistent"] == true));
    let (h, rows) = table(&ok(&["catalog"]));
    assert_eq!(h[0], "id");
    assert_eq!(rows.len(), recs.len());
}

#[test]
fn protocol_commands() {
    let t = json(&["teleport", "--r", "0", "--gain", "1"]);
    assert!((t["result"]["fidelity"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    let q = json(&["qkd", "--r", "5", "--sweep"]);
    assert!((q["direct_crossing_eta_B"].as_f64().unwrap() - 0.5).abs() < 0.01);
    assert_eq!(q["rows"].as_array().unwrap().len(), 100);
    let q = json(&["qkd", "--r", "1", "--eta-b", "0.3"]);
    assert_eq!(q["key_possible_direct"], false);
    assert_eq!(q["key_possible_reverse"], true);
    let w = json(&["werner", "--criterion", "bohm"]);
    assert!((w[0]["threshold"].as_f64().unwrap() - 0.6180).abs() < 1e-4);
    let s = json(&["swap", "--r1", "1", "--r2", "1"]);
    assert!((s["duan_D"].as_f64().unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-12);
    let c = json(&["causality", "--distance", "1", "--dt", "1"]);
    assert_eq!(c["causally_separated"], false);
    let c = json(&["causality", "--distance", "10", "--dt", "1"]);
    assert_eq!(c["causally_separated"], true);
}

#[test]
fn config_file_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# defaults for a quick run\nr = 2\neta_B = 0.5\noutput = json").unwrap();
    let path = f.path().to_str().unwrap();
    let v = json(&["--config", path, "qkd"]);
    assert!(v["delta_I_direct"].as_f64().unwrap().abs() < 1e-9);
    let v = json(&["--config", path, "qkd", "--eta-b", "1"]);
    assert!(v["delta_I_direct"].as_f64().unwrap() > 0.0);
    let csv = ok(&["--config", path, "--output", "csv", "qkd"]);
    assert!(csv.starts_with("r,eta_B,"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "squeeze = 2").unwrap();
    assert_eq!(eprkit(&["--config", bad.path().to_str().unwrap(), "qkd"]).status.code(), Some(2));
    assert_eq!(eprkit(&["--config", "/nonexistent/eprkit.conf", "qkd"]).status.code(), Some(2));
}
