use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn momentsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentsq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = momentsq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn syzygy_pair() {
    let v = json(&["syzygy", "--p", "5", "--n", "2", "--s", "1", "--tuple", "0,1"]);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["field"], "Q_5");
    assert_eq!(v["cardinality"], 2);
    assert_eq!(v["within_bound"], true);
    assert_eq!(v["bound"], "4");
    assert_eq!(v["epsilon"], "1/25");
    assert_eq!(v["members"], serde_json::json!([[0, 1], [1, 0]]));
    assert_eq!(v["method"], "CongruenceExact");
    assert_eq!(v["strong_diagonal_expected"], true);
}

#[test]
fn syzygy_diagonal_tuple() {
    let v = json(&["syzygy", "--p", "5", "--n", "2", "--s", "1", "--tuple", "2,2"]);
    assert_eq!(v["cardinality"], 1);
    assert_eq!(v["members"], serde_json::json!([[2, 2]]));
}

#[test]
fn syzygy_small_prime_is_flagged() {
    let v = json(&["syzygy", "--p", "2", "--n", "3", "--s", "1", "--tuple", "0,1,1"]);
    assert_eq!(v["strong_diagonal_expected"], false);
    assert_eq!(v["cardinality"], 3);
}

#[test]
fn syzygy_real() {
    let v = json(&["syzygy", "--field", "real", "--n", "2", "--r", "8", "--tuple", "4,7"]);
    assert_eq!(v["field"], "R");
    assert_eq!(v["method"], "RealSampled");
    assert_eq!(v["epsilon"], "1/64");
    assert_eq!(v["grid_step"], "1/64");
    let members = v["members"].as_array().unwrap();
    assert!(members.contains(&serde_json::json!([4, 7])));
    assert!(members.contains(&serde_json::json!([7, 4])));
    assert_eq!(v["within_bound"], true);
}

#[test]
fn syzygy_budget_exit_code() {
    let out = momentsq(&["syzygy", "--p", "5", "--n", "2", "--s", "9", "--tuple", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_one() {
    for args in [
        &["syzygy", "--p", "4", "--n", "2", "--s", "1", "--tuple", "0,1"][..],
        &["syzygy", "--p", "5", "--n", "2", "--s", "1", "--tuple", "0,1,2"],
        &["syzygy", "--p", "5", "--n", "2", "--s", "1", "--tuple", "0,5"],
        &["syzygy", "--p", "5", "--n", "2", "--tuple", "0,1"],
        &["bounds", "--table", "nope", "--n-max", "3"],
        &["vino", "--n", "2"],
        &["frobnicate"],
    ] {
        assert_eq!(momentsq(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(momentsq(&["--help"]).status.code(), Some(0));
    assert_eq!(momentsq(&["--version"]).status.code(), Some(0));
    assert_eq!(momentsq(&["vino", "--help"]).status.code(), Some(0));
}

#[test]
fn vino_count() {
    let v = json(&["vino", "--n", "2", "--N", "10"]);
    assert_eq!(v["count"], "190");
    assert_eq!(v["main_term"], "200");
    assert_eq!(v["residual"], "10");
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn vino_large_counts_are_strings() {
    let v = json(&["vino", "--n", "3", "--N", "1000000", "--method", "permutation-formula"]);
    let count: u128 = v["count"].as_str().unwrap().parse().unwrap();
    assert!(count > 1u128 << 53);
}

#[test]
fn bounds_theorem1_table() {
    let out = momentsq(&["bounds", "--table", "theorem1", "--n-max", "5", "--field", "padic"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for (k, row) in rows.iter().enumerate() {
        let n = (k + 2) as f64;
        let value: f64 = row[3].parse().unwrap();
        assert!((value - n.sqrt()).abs() < 1e-12, "row {k}: {value}");
    }
}

#[test]
fn bounds_json_and_output_file() {
    let path = scratch("refined.json");
    let out = momentsq(&[
        "bounds",
        "--table",
        "refined",
        "--n-max",
        "4",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let exact: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["exact"].as_str().unwrap())
        .collect();
    assert_eq!(exact, ["2", "6", "72"]);
}

#[test]
fn ratio_padic_within_theorem() {
    let v = json(&[
        "ratio",
        "--p",
        "5",
        "--n",
        "2",
        "--s",
        "1",
        "--samples",
        "3",
        "--seed",
        "11",
    ]);
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    assert_eq!(v["samples"][0]["seed"], 11);
    assert_eq!(v["within_theorem1"], true);
    assert_eq!(v["quadrature"], "exact");
}

#[test]
fn ratio_comb() {
    let v = json(&["ratio", "--function", "comb", "--atoms", "10"]);
    let r = v["max_ratio"].as_f64().unwrap();
    assert!((r.powi(4) - 190.0 / 100.0).abs() < 1e-9);
    assert!(v["lower_bound_target"].as_f64().is_some());
}

#[test]
fn verify_all() {
    let out = momentsq(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() >= 20);
}

#[test]
fn output_is_thread_count_independent() {
    for args in [
        &["syzygy", "--p", "5", "--n", "3", "--s", "1", "--tuple", "1,2,3"][..],
        &["vino", "--n", "3", "--N", "60"],
        &["ratio", "--samples", "4", "--seed", "5"],
        &["ratio", "--field", "real", "--r", "4", "--samples", "2"],
        &["verify", "--suite", "syzygy", "--seed", "7"],
    ] {
        let runs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|t| {
                let mut full = vec!["--threads", t];
                full.extend_from_slice(args);
                let out = momentsq(&full);
                assert!(out.status.success(), "{full:?}");
                out.stdout
            })
            .collect();
        assert!(runs.iter().all(|r| r == &runs[0]), "{args:?}");
    }
}

#[test]
fn config_file_fills_missing_flags() {
    let path = scratch("syzygy.toml");
    fs::write(&path, "p = 5\nn = 2\ns = 1\ntuple = [2, 2]\nformat = \"csv\"\n").unwrap();
    let cfg = path.to_str().unwrap();

    let out = momentsq(&["syzygy", "--config", cfg]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "member,cells\n0,2 2\n");

    // flags win over the file
    let v = json(&["syzygy", "--config", cfg, "--tuple", "0,1", "--format", "json"]);
    assert_eq!(v["cardinality"], 2);
}

#[test]
fn config_rejects_unknown_keys() {
    let path = scratch("bad.toml");
    fs::write(&path, "n = 2\nbogus = 1\n").unwrap();
    let out = momentsq(&["vino", "--N", "5", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn timing_is_opt_in() {
    let v = json(&["--timing", "vino", "--n", "2", "--N", "10"]);
    assert!(v["elapsed_ms"].as_f64().is_some());
}
