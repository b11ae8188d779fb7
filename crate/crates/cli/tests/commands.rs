use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singmetric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bessel_spectrum() {
    let out = run(&["spectrum", "--gamma", "0", "--n", "0", "--k", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("# singmetric="));
    assert_eq!(text.lines().nth(1).unwrap(), "route,gamma,n,k,eigenvalue,mesh_nodes");
    let values: Vec<f64> = csv_rows(&out).iter().map(|r| r[4].parse().unwrap()).collect();
    for (v, e) in values.iter().zip([5.7832, 30.4713, 74.8870]) {
        assert!((v - e).abs() < 1e-4, "{v} vs {e}");
    }
}

#[test]
fn gamma_outside_range_is_a_validation_error() {
    let out = run(&["spectrum", "--gamma", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N*gamma < 1"));
}

#[test]
fn both_routes_agree() {
    let v = json(&["spectrum", "--gamma", "0.25", "--route", "both"]);
    assert!(v["max_rel_diff"].as_f64().unwrap() < 1e-6);
    let out = run(&["spectrum", "--gamma", "0.25", "--route", "both"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",max_rel_diff"));
}

#[test]
fn rate_hits_targets() {
    for (g, target) in [("0", 1.0), ("0.25", 4.0 / 3.0)] {
        let v = json(&["rate", "--gamma", g]);
        for fit in v.as_array().unwrap() {
            assert_eq!(fit["pass"], Value::Bool(true));
            assert!((fit["target"].as_f64().unwrap() - target).abs() < 1e-9);
            assert!((fit["exponent"].as_f64().unwrap() - target).abs() < 0.05);
        }
    }
}

#[test]
fn rate_sweep_csv_header() {
    let out = run(&["rate", "--gamma", "0.1", "--k", "1", "--eps-count", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "gamma,n,k,eps,lambda_full,lambda_eps,gap,variational_bound,closed_form_bound"
    );
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn too_few_points_is_insufficient_data() {
    assert_eq!(run(&["rate", "--eps-count", "2"]).status.code(), Some(4));
}

#[test]
fn unresolvable_eps_is_a_numerical_error() {
    let out = run(&["rate", "--eps-min", "1e-14", "--eps-max", "1e-13"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hardy_refinement() {
    let v = json(&["hardy", "--gamma", "0.25", "--refine", "7..12"]);
    let c = v["extrapolated"].as_f64().unwrap();
    assert!((c - 1.5).abs() / 1.5 < 0.01);
    assert_eq!(v["monotone_from_below"], Value::Bool(true));
    assert_eq!(run(&["hardy", "--refine", "7-12"]).status.code(), Some(2));
}

#[test]
fn minkowski_exponent() {
    let v = json(&["minkowski", "--gamma", "0.4"]);
    assert!((v["exponent"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-2);
    assert!((v["minkowski_product"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn potential_forms_agree() {
    let out = run(&["potential", "--gamma", "0.25", "--n", "1"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 201);
    let max = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(max < 1e-9, "{max}");
}

#[test]
fn geodesic_small_grid() {
    let out = run(&["geodesic", "--gamma", "0.25", "--mesh-nodes", "64", "--stencil", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "x,y,sigma,d_exact,d_graph");
    assert_eq!(run(&["geodesic", "--stencil", "12"]).status.code(), Some(2));
}

#[test]
fn decay_bounds_hold() {
    let v = json(&["decay", "--gamma", "0.25"]);
    assert_eq!(v["bounds_hold"], Value::Bool(true));
    assert!((v["mass_exponent"].as_f64().unwrap() - 10.0 / 3.0).abs() < 0.1);
}

#[test]
fn bounds_records_seed() {
    let v = json(&["bounds", "--gamma", "0.25", "--seed", "11", "--samples", "20"]);
    assert_eq!(v["norm_chain"]["seed"], 11);
    assert_eq!(v["norm_chain_passed"], Value::Bool(true));
    assert!((v["constants"]["c1"].as_f64().unwrap() - 38.1299522930).abs() < 1e-8);
    assert_eq!(run(&["bounds", "--c", "0.5"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"gamma": 0.4, "format": "json", "k": 1}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = run(&["spectrum", "--config", cfg]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma"], 0.4);
    let out = run(&["spectrum", "--config", cfg, "--gamma", "0.1"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma"], 0.1);
    assert_eq!(v["routes"][0]["eigenvalues"].as_array().unwrap().len(), 1);
}

#[test]
fn bad_config_and_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gama": 0.4}"#).unwrap();
    assert_eq!(run(&["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["spectrum", "--config", missing.to_str().unwrap()]).status.code(), Some(5));
    let out = dir.path().join("no/such/dir/out.csv");
    assert_eq!(run(&["minkowski", "--out", out.to_str().unwrap()]).status.code(), Some(5));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["rate", "--gamma", "0.25", "--k", "1"],
        vec!["bounds", "--gamma", "0.25", "--seed", "3", "--format", "json"],
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for p in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", p.to_str().unwrap()]);
            assert!(run(&full).status.success());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
