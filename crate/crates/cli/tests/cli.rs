use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dc_split_cli::args::parse_size;
use dc_split_cli::output::mask_wall_time;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dc_split(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dc-split"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn size_parsing() {
    assert_eq!(parse_size("200x100"), Ok((200, 100)));
    assert_eq!(parse_size("5X3"), Ok((5, 3)));
    assert!(parse_size("200").is_err());
    assert!(parse_size("ax3").is_err());
}

#[test]
fn tune_theta_writes_table_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dc_split(&["tune-theta", "--sizes", "30x10,40x20", "--theta", "0.05,5"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("tune_theta.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "M,N,theta_0.05_iter,theta_0.05_time_s,theta_5_iter,theta_5_time_s");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("30,10,"));
    let trace = read(&dir.path().join("traces/theta_5_40x20.csv"));
    assert!(trace.starts_with("n,err,objective,time_s,step_norm,gap_norm,lyap_c,lyap_a\n"));
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(summary["command"], "tune-theta");
    assert_eq!(summary["runs"].as_array().unwrap().len(), 4);
    assert_eq!(summary["config"]["kappa"], 0.009);
}

#[test]
fn single_value_grid_gives_single_column_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dc_split(&["tune-beta", "--sizes", "30x10", "--beta", "1"], dir.path());
    assert!(out.status.success());
    let table = read(&dir.path().join("tune_beta.csv"));
    assert_eq!(table.lines().next().unwrap(), "M,N,beta_1_iter,beta_1_time_s");
}

#[test]
fn instance_flags_reach_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dc_split(
        &["tune-theta", "--sizes", "30x10", "--theta", "0.5", "--l1-weight", "1", "--spd"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(summary["config"]["l1_weight"], 1.0);
    assert_eq!(summary["config"]["spd"], true);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 8] = [
        &["tune-theta", "--sizes", "30x10", "--beta", "0"],
        &["tune-theta", "--sizes", "30x10", "--l1-weight", "-1"],
        &["tune-theta", "--sizes", "30x10", "--theta", "-1"],
        &["tune-beta", "--sizes", "10x30"],
        &["rls-bench", "--sizes", "30x10", "--methods", "admm"],
        &["rls-bench", "--sizes", "30x10", "--methods", "newton"],
        &["tune-theta", "--sizes", "30by10"],
        &["svm-bench", "--dataset", "x.csv", "--splits", "0.25"],
    ];
    for args in cases {
        let out = dc_split(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    // nothing was written for rejected configurations
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dc_split(&["svm-bench", "--dataset", "/nonexistent/banknote.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/banknote.csv"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,class\n1,0\nzz,1\n").unwrap();
    let out = dc_split(&["svm-bench", "--dataset", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3") && err.contains("'a'"), "{err}");

    let banknote = fixture("banknote_like.csv");
    let out = dc_split(
        &["svm-bench", "--dataset", banknote.to_str().unwrap(), "--label-col", "Class"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let out = Command::new(env!("CARGO_BIN_EXE_dc-split")).arg(flag).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dc-split"))
        .args(["tune-theta", "--sizes", "30x10", "--out"])
        .arg(dir.path())
        .env("DC_SPLIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_dc-split"))
            .args(["rls-bench", "--sizes", "40x20,60x30", "--seed", "3", "--out"])
            .arg(dir.path())
            .env("DC_SPLIT_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        let table = mask_wall_time(&read(&dir.path().join("rls_bench.csv")));
        let trace = mask_wall_time(&read(&dir.path().join("traces/drs-alpha_60x30.csv")));
        (table, trace)
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn svm_bench_tables_satisfy_metric_identities() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture("banknote_like.csv");
    let out = dc_split(&["svm-bench", "--dataset", data.to_str().unwrap(), "--splits", "0.3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("svm_bench.csv")).unwrap();
    let mut rows = 0;
    for rec in reader.deserialize::<std::collections::HashMap<String, String>>() {
        let rec = rec.unwrap();
        let get = |k: &str| rec[k].parse::<f64>().unwrap();
        assert!((get("mae") - 2.0 * (1.0 - get("accuracy"))).abs() <= 1e-10);
        assert!((get("mse") - 2.0 * get("mae")).abs() <= 1e-10);
        assert!((get("rmse") - get("mse").sqrt()).abs() <= 1e-10);
        rows += 1;
    }
    assert_eq!(rows, 5);
    let split = read(&dir.path().join("svm_split_30.csv"));
    assert_eq!(split.lines().next().unwrap(), "metric,admm,drs-theta,drs-alpha,dca,gdcp");
    assert!(dir.path().join("traces/drs-alpha_split30.csv").exists());
}

#[test]
fn undersampling_stage_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture("creditcard_like.csv");
    let out = dc_split(
        &[
            "svm-bench",
            "--dataset",
            data.to_str().unwrap(),
            "--label-col",
            "Class",
            "--undersample",
            "--splits",
            "0.2",
            "--methods",
            "drs-theta,gdcp",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    let provenance: Vec<&str> = summary["provenance"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(provenance.iter().any(|p| p.contains("undersampled majority class to 20 rows")));
    // 40 balanced rows, 20% test
    assert_eq!(summary["runs"][0]["report"]["iterations"], summary["runs"][0]["summary"]["iterations"]);
    let table = read(&dir.path().join("svm_split_20.csv"));
    assert_eq!(table.lines().next().unwrap(), "metric,drs-theta,gdcp");
}

#[test]
fn masking_drops_only_wall_time_columns() {
    let text = "M,N,a_iter,a_time_s\n1,2,3,0.5\n";
    assert_eq!(mask_wall_time(text), "M,N,a_iter\n1,2,3");
}
