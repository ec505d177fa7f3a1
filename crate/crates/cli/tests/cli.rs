use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fairnfr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairnfr"))
        .args(args)
        .env_remove("FAIRNFR_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fairnfr(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_prints_all_three() {
    let out = ok(&["bounds", "--gain", "0.1", "--cache-size", "5", "--baseline-chr", "0.2"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["f_max"].as_f64().unwrap() - 0.02).abs() < 1e-15);
    assert!((v["f_tv"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert!(v["f_kl_raw"].as_f64().unwrap() > 0.0);
}

#[test]
fn ingest_thresholds_and_keeps_largest_component() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let output = dir.path().join("out.csv");
    fs::write(&input, "K=5\n0,1,0.9\n1,0,0.8\n1,2,0.05\n3,4,0.7\n2,2,1.0\n").unwrap();
    let out = ok(&[
        "ingest",
        path(&input),
        "-o",
        path(&output),
        "--threshold",
        "0.1",
        "--largest-component",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["catalog_size"], 2);
    assert_eq!(v["self_loops_dropped"], 1);
    let text = fs::read_to_string(&output).unwrap();
    assert!(text.starts_with("K=2"));
}

#[test]
fn run_writes_csv_with_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("run.csv");
    ok(&[
        "run", "--synthetic", "30", "--degree", "4", "-n", "2", "-c", "4", "--algorithm", "fair-nfr", "--metric",
        "f-tv", "--budget", "0.05", "-o", path(&output),
    ]);
    let mut rdr = csv::Reader::from_path(&output).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "index");
    assert_eq!(headers.len(), 34);
    let row = rdr.records().next().unwrap().unwrap();
    let col = |name: &str| row[headers.iter().position(|h| h == name).unwrap()].to_string();
    assert_eq!(col("algorithm"), "fair-nfr");
    assert_eq!(col("status"), "ok");
    assert!(col("f_tv").parse::<f64>().unwrap() <= 0.05 + 1e-6);
}

#[test]
fn run_from_config_file_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    fs::write(
        &cfg,
        r#"{"dataset": {"kind": "synthetic", "size": 25, "avg_out_degree": 3},
            "alpha": 0.7, "list_size": 1, "cache_size": 3, "quality": 0.9,
            "direct": {"kind": "uniform"}, "algorithm": {"name": "greedy"}}"#,
    )
    .unwrap();
    let v: Value = serde_json::from_str(&ok(&["run", "--config", path(&cfg)])).unwrap();
    assert!(v["result"]["report"]["gain"].as_f64().unwrap() >= -1e-12);
    assert!(v["error"].is_null());
}

#[test]
fn sweep_then_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    let results = dir.path().join("rows.json");
    fs::write(
        &grid,
        r#"{"datasets": [{"kind": "synthetic", "size": 20, "avg_out_degree": 3}],
            "alphas": [0.5, 0.9], "list_sizes": [1, 2], "cache_sizes": [3], "qualities": [0.8],
            "directs": [{"kind": "zipf", "exponent": 1.0}],
            "algorithms": [{"name": "greedy"}, {"name": "multistep"}]}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fairnfr"))
        .args(["sweep", path(&grid), "-o", path(&results)])
        .env("FAIRNFR_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Value = serde_json::from_str(&fs::read_to_string(&results).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 8);
    let cdf = ok(&["cdf", path(&results), "--metric", "f-tv"]);
    let mut lines = cdf.lines();
    assert_eq!(lines.next(), Some("distance,cdf"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[1], 1.0);
}

#[test]
fn invalid_input_exits_nonzero() {
    let out = fairnfr(&["run", "--synthetic", "10", "--alpha", "1.5"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
    let out = fairnfr(&["run"]);
    assert!(!out.status.success());
}

#[test]
fn run_exports_lp() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("model.lp");
    ok(&[
        "run", "--synthetic", "15", "--degree", "3", "-n", "1", "-c", "3", "--algorithm", "fair-nfr", "--metric",
        "f-kl", "--budget", "0.1", "--export-lp", path(&lp),
    ]);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Maximize\n obj:"));
    assert!(text.contains(" cut_0:"));
    assert!(text.trim_end().ends_with("End"));
    let out = fairnfr(&["run", "--synthetic", "15", "--algorithm", "greedy", "--export-lp", path(&lp)]);
    assert!(!out.status.success());
}
