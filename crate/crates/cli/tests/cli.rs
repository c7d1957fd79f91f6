use std::process::{Command, Output};

use serde_json::Value;

fn curs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curs"))
        .args(args)
        .env_remove("CURS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

const SPD_SAMPLE: &[&str] =
    &["sample", "--manifold", "spd", "--n", "2", "--alpha", "2", "--sigma", "0.5", "--count", "100", "--seed", "7"];

#[test]
fn sample_schema() {
    let o = curs(SPD_SAMPLE);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs.len(), 100);
    for r in &recs {
        assert!(r["r"].as_f64().unwrap() > 0.0);
        assert_eq!(r["sigma_eigs"].as_array().unwrap().len(), 2);
        assert!(r["iterations"].as_u64().unwrap() >= 1);
        assert_eq!(r["point"]["n"], 2);
        assert_eq!(r["point"]["beta"], 1);
        assert!(r["point"].get("im").is_none());
    }
}

#[test]
fn sample_is_deterministic() {
    let a = curs(SPD_SAMPLE);
    let b = curs(SPD_SAMPLE);
    assert_eq!(a.stdout, b.stdout);
    let other = curs(&["sample", "--n", "2", "--sigma", "0.5", "--count", "100", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let flag = curs(SPD_SAMPLE);
    let env = Command::new(env!("CARGO_BIN_EXE_curs"))
        .args(&SPD_SAMPLE[..SPD_SAMPLE.len() - 2])
        .env("CURS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn unitary_samples_stay_inside_diameter() {
    let o = curs(&["sample", "--manifold", "unitary", "--n", "2", "--uniform", "--count", "1000", "--seed", "3"]);
    assert!(o.status.success());
    let diameter = 2f64.sqrt() * std::f64::consts::PI;
    let recs = records(&o);
    assert_eq!(recs.len(), 1000);
    for r in recs {
        assert!(r["r"].as_f64().unwrap() < diameter);
        assert!(r["point"].get("im").is_some());
    }
}

#[test]
fn threaded_sampling_returns_the_count() {
    let o = curs(&["sample", "--n", "3", "--sigma", "0.4", "--count", "50", "--threads", "3"]);
    assert!(o.status.success());
    assert_eq!(records(&o).len(), 50);
}

#[test]
fn base_file_recentres() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    std::fs::write(&base, r#"{"n":2,"beta":1,"re":[[2.0,0.0],[0.0,3.0]]}"#).unwrap();
    let out = dir.path().join("out.jsonl");
    let o = curs(&[
        "sample", "--n", "2", "--sigma", "0.5", "--count", "5", "--base-file",
        base.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);
    let plain = curs(&["sample", "--n", "2", "--sigma", "0.5", "--count", "5"]);
    let rec: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let rec0 = &records(&plain)[0];
    // Same radius and direction, different point.
    assert_eq!(rec["r"], rec0["r"]);
    assert_ne!(rec["point"], rec0["point"]);

    std::fs::write(&base, r#"{"n":2,"beta":1,"re":[[1.0,0.0],[0.0,-1.0]]}"#).unwrap();
    let bad = curs(&["sample", "--n", "2", "--sigma", "0.5", "--base-file", base.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_combinations_exit_2() {
    for args in [
        &["sample", "--manifold", "unitary", "--n", "2", "--uniform", "--variant", "sharp"][..],
        &["sample", "--manifold", "spd", "--n", "2", "--variant", "cutlocus", "--sigma", "1"],
        &["sample", "--n", "2"],
        &["sample", "--n", "2", "--sigma", "-1"],
        &["sample", "--n", "2", "--sigma", "1", "--alpha", "1"],
        &["sample", "--n", "2", "--beta", "4", "--sigma", "1"],
        &["sample", "--n", "2", "--beta", "3", "--sigma", "1"],
        &["sample", "--n", "2", "--sigma", "1", "--uniform"],
        &["sample", "--bogus"],
    ] {
        assert_eq!(curs(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = curs(&["sample", "--n", "4", "--sigma", "1.5", "--max-rounds", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("plot.svg");
    let o = curs(&[
        "acceptance-sweep", "--n", "4", "--sigma-grid", "0.2:0.8:0.2", "--rounds", "20000",
        "--svg", svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["sigma", "delta", "pi_hat", "stderr", "pi_theory"]);
    assert_eq!(rows.len(), 4);
    let pi: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let se: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    for k in 1..pi.len() {
        assert!(pi[k] <= pi[k - 1] + 3.0 * (se[k] + se[k - 1]));
    }
    // σ = 0.4 theory against the reference value.
    let theory: f64 = rows[1][4].parse().unwrap();
    assert!((theory - 0.3430).abs() < 0.005);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn sweep_at_delta_two() {
    let o = curs(&["acceptance-sweep", "--n", "4", "--sigma-grid", "0.43479:0.43479:0.1", "--rounds", "1000"]);
    let (_, rows) = csv_rows(&stdout(&o));
    let delta: f64 = rows[0][1].parse().unwrap();
    let pi: f64 = rows[0][4].parse().unwrap();
    assert!((delta - 2.0).abs() < 1e-3, "{delta}");
    assert!((pi - 0.27).abs() < 0.02, "{pi}");
}

#[test]
fn sweep_without_theory_leaves_blanks() {
    for args in [
        &["acceptance-sweep", "--n", "3", "--sigma-grid", "0.3:0.3:0.1", "--rounds", "1000"][..],
        &["acceptance-sweep", "--manifold", "unitary", "--n", "2", "--sigma-grid", "1:1:1", "--rounds", "1000"],
        &["acceptance-sweep", "--n", "4", "--sigma-grid", "0.3:0.3:0.1", "--rounds", "1000", "--no-theory"],
    ] {
        let o = curs(args);
        assert!(o.status.success(), "{args:?}");
        let (_, rows) = csv_rows(&stdout(&o));
        assert_eq!(rows[0][1], "");
        assert_eq!(rows[0][4], "");
    }
}

#[test]
fn malformed_grid_exits_2() {
    for grid in ["0.1:0.2", "x:0.2:0.1", "0.3:0.1:0.1", "0.1:0.3:0"] {
        let o = curs(&["acceptance-sweep", "--n", "4", "--sigma-grid", grid]);
        assert_eq!(o.status.code(), Some(2), "{grid}");
    }
}

#[test]
fn tables_layout() {
    let o = curs(&["tables", "--n", "4", "--rounds", "20000", "--seed", "1"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["sigma", "pi_hat_general", "pi_hat_sharp"]);
    let sigmas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(sigmas, ["0.2", "0.4", "0.6", "0.8"]);
    for r in &rows {
        let g: f64 = r[1].parse().unwrap();
        let s: f64 = r[2].parse().unwrap();
        assert!(s >= g, "{r:?}");
    }
    assert_eq!(curs(&["tables", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn validate_reports() {
    let o = curs(&["validate", "--suite", "ode", "--seed", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "ode");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["status"] == "pass" && c["metric"].is_number()));
    assert_eq!(curs(&["validate", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn theory_closed_form() {
    let o = curs(&["theory", "--n", "4", "--sigma", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["delta"].as_f64().unwrap() - 13.3).abs() < 0.1);
    assert_eq!(v["methods"]["z"], "closed-form");
    for key in ["Z", "Z_kappa", "pi", "delta", "methods", "errors"] {
        assert!(v.get(key).is_some(), "{key}");
    }

    let v: Value = serde_json::from_str(&stdout(&curs(&["theory", "--n", "4", "--sigma", "0.05"]))).unwrap();
    assert!(v["pi"].as_f64().unwrap() > 0.97);

    let v: Value = serde_json::from_str(&stdout(&curs(&["theory", "--n", "6", "--sigma", "0.5"]))).unwrap();
    let want = curs::theory::delta_of_sigma(6, 0.5).unwrap();
    assert!((v["delta"].as_f64().unwrap() - want).abs() < 1e-12);
}

#[test]
fn theory_odd_n_needs_mc() {
    assert_eq!(curs(&["theory", "--n", "3", "--sigma", "0.5"]).status.code(), Some(2));
    let o = curs(&["theory", "--n", "3", "--sigma", "0.5", "--mc", "--draws", "500"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["methods"]["z"], "monte-carlo");
    assert!(v["errors"]["z"].as_f64().unwrap() > 0.0);
    let pi = v["pi"].as_f64().unwrap();
    assert!(pi > 0.0 && pi <= 1.0);

    let o = curs(&["theory", "--manifold", "unitary", "--n", "2", "--uniform", "--mc", "--draws", "500"]);
    assert!(o.status.success());
}
