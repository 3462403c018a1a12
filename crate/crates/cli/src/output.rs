//! Tables, traces and the JSON summary written under the output directory.
//!
//! ```text
//! <out>/
//!   tune_theta.csv | tune_beta.csv | rls_bench.csv | svm_bench.csv
//!   svm_split_<pct>.csv       (svm-bench only, one per test fraction)
//!   summary.json
//!   traces/<run id>.csv
//! ```
//!
//! Wall-clock columns are the ones whose header ends in `time_s`; everything
//! else is a deterministic function of the configuration and seed.

use std::fs;
use std::path::{Path, PathBuf};

use dc_split::{Method, RunTrace, TraceSummary};
use serde::Serialize;

use crate::experiment::{split_percent, RlsConfig, RlsResult, SvmConfig, SvmResult, TuneConfig, TuneResult};
use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Output {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// In-memory table; written once when complete.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
        w.write_record(&self.header).map_err(csv_err(path))?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err(path))?;
        }
        w.flush().map_err(io_err(path))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn secs(t: f64) -> String {
    format!("{t:.4}")
}

/// Rows `(M, N)`, one iteration/time column pair per grid value.
pub fn tune_table(cfg: &TuneConfig, results: &[TuneResult]) -> Table {
    let name = cfg.sweep.name();
    let mut header = vec!["M".to_string(), "N".to_string()];
    for v in &cfg.grid {
        header.push(format!("{name}_{v}_iter"));
        header.push(format!("{name}_{v}_time_s"));
    }
    let mut table = Table::new(header);
    for &(m, n) in &cfg.sizes {
        let mut row = vec![m.to_string(), n.to_string()];
        for &v in &cfg.grid {
            let r = results.iter().find(|r| (r.m, r.n) == (m, n) && r.value == v);
            match r {
                Some(r) => {
                    row.push(r.trace.summary.iterations.to_string());
                    row.push(secs(r.trace.summary.total_seconds));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        table.rows.push(row);
    }
    table
}

/// Rows `(m, N)`, one iteration/time column pair per method.
pub fn rls_table(cfg: &RlsConfig, results: &[RlsResult]) -> Table {
    let mut header = vec!["M".to_string(), "N".to_string()];
    for m in &cfg.methods {
        header.push(format!("{m}_iter"));
        header.push(format!("{m}_time_s"));
    }
    let mut table = Table::new(header);
    for &(m, n) in &cfg.sizes {
        let mut row = vec![m.to_string(), n.to_string()];
        for method in &cfg.methods {
            let r = results.iter().find(|r| (r.m, r.n) == (m, n) && r.method.name() == method.name());
            match r {
                Some(r) => {
                    row.push(r.trace.summary.iterations.to_string());
                    row.push(secs(r.trace.summary.total_seconds));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        table.rows.push(row);
    }
    table
}

pub const SVM_COLUMNS: [&str; 11] = [
    "split",
    "method",
    "accuracy",
    "precision",
    "precision_degenerate",
    "mae",
    "mse",
    "rmse",
    "iterations",
    "converged",
    "time_s",
];

/// One row per (split, method).
pub fn svm_table(results: &[SvmResult]) -> Table {
    let mut table = Table::new(SVM_COLUMNS.iter().map(|s| s.to_string()).collect());
    for r in results {
        let p = &r.report;
        table.rows.push(vec![
            r.split.to_string(),
            r.method.to_string(),
            p.accuracy.to_string(),
            p.precision.to_string(),
            p.precision_degenerate.to_string(),
            p.mae.to_string(),
            p.mse.to_string(),
            p.rmse.to_string(),
            p.iterations.to_string(),
            r.converged().to_string(),
            secs(p.time_seconds),
        ]);
    }
    table
}

/// Metrics down, methods across, for one test fraction. Wall time is left
/// to the long table.
pub fn svm_split_table(methods: &[Method], split: f64, results: &[SvmResult]) -> Table {
    let mut header = vec!["metric".to_string()];
    header.extend(methods.iter().map(|m| m.to_string()));
    let mut table = Table::new(header);
    let cells: Vec<Option<&SvmResult>> = methods
        .iter()
        .map(|m| results.iter().find(|r| r.split == split && r.method.name() == m.name()))
        .collect();
    let metrics: [(&str, fn(&SvmResult) -> String); 6] = [
        ("accuracy", |r| r.report.accuracy.to_string()),
        ("precision", |r| r.report.precision.to_string()),
        ("mae", |r| r.report.mae.to_string()),
        ("mse", |r| r.report.mse.to_string()),
        ("rmse", |r| r.report.rmse.to_string()),
        ("iterations", |r| r.report.iterations.to_string()),
    ];
    for (name, get) in metrics {
        let mut row = vec![name.to_string()];
        row.extend(cells.iter().map(|c| c.map(get).unwrap_or_default()));
        table.rows.push(row);
    }
    table
}

#[derive(Serialize)]
struct RunEntry<'a> {
    id: String,
    #[serde(flatten)]
    labels: serde_json::Value,
    summary: &'a TraceSummary,
}

#[derive(Serialize)]
struct Summary<'a, C: Serialize> {
    command: &'a str,
    config: &'a C,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<String>,
    runs: Vec<RunEntry<'a>>,
}

/// Creates `<out>/traces` and returns its path.
fn prepare(out: &Path) -> Result<PathBuf, CliError> {
    let traces = out.join("traces");
    fs::create_dir_all(&traces).map_err(io_err(&traces))?;
    Ok(traces)
}

fn write_trace(dir: &Path, id: &str, trace: &RunTrace) -> Result<(), CliError> {
    let path = dir.join(format!("{id}.csv"));
    trace.write_csv(&path).map_err(|e| match e {
        dc_split::Error::Io { source, .. } => CliError::Output { path: path.clone(), source },
        other => CliError::Output {
            path: path.clone(),
            source: std::io::Error::other(other.to_string()),
        },
    })
}

fn write_summary<C: Serialize>(out: &Path, summary: &Summary<'_, C>) -> Result<(), CliError> {
    let path = out.join("summary.json");
    let json = serde_json::to_string_pretty(summary).map_err(|e| CliError::Output {
        path: path.clone(),
        source: e.into(),
    })?;
    fs::write(&path, json + "\n").map_err(io_err(&path))
}

pub fn write_tune(out: &Path, cfg: &TuneConfig, results: &[TuneResult]) -> Result<Vec<PathBuf>, CliError> {
    let traces = prepare(out)?;
    let table_path = out.join(format!("tune_{}.csv", cfg.sweep.name()));
    tune_table(cfg, results).write(&table_path)?;
    let mut runs = Vec::new();
    for r in results {
        let id = r.id(cfg.sweep);
        write_trace(&traces, &id, &r.trace)?;
        runs.push(RunEntry {
            id,
            labels: serde_json::json!({ "M": r.m, "N": r.n, cfg.sweep.name(): r.value }),
            summary: &r.trace.summary,
        });
    }
    let command = match cfg.sweep {
        crate::experiment::Sweep::Theta => "tune-theta",
        crate::experiment::Sweep::Beta => "tune-beta",
    };
    write_summary(out, &Summary { command, config: cfg, provenance: Vec::new(), runs })?;
    Ok(vec![table_path])
}

pub fn write_rls(out: &Path, cfg: &RlsConfig, results: &[RlsResult]) -> Result<Vec<PathBuf>, CliError> {
    let traces = prepare(out)?;
    let table_path = out.join("rls_bench.csv");
    rls_table(cfg, results).write(&table_path)?;
    let mut runs = Vec::new();
    for r in results {
        let id = r.id();
        write_trace(&traces, &id, &r.trace)?;
        runs.push(RunEntry {
            id,
            labels: serde_json::json!({ "M": r.m, "N": r.n, "method": r.method.name() }),
            summary: &r.trace.summary,
        });
    }
    write_summary(out, &Summary { command: "rls-bench", config: cfg, provenance: Vec::new(), runs })?;
    Ok(vec![table_path])
}

pub fn write_svm(
    out: &Path,
    cfg: &SvmConfig,
    provenance: Vec<String>,
    results: &[SvmResult],
) -> Result<Vec<PathBuf>, CliError> {
    let traces = prepare(out)?;
    let mut written = vec![out.join("svm_bench.csv")];
    svm_table(results).write(&written[0])?;
    for &split in &cfg.splits {
        let path = out.join(format!("svm_split_{}.csv", split_percent(split)));
        svm_split_table(&cfg.methods, split, results).write(&path)?;
        written.push(path);
    }
    let mut runs = Vec::new();
    for r in results {
        let id = r.id();
        write_trace(&traces, &id, &r.trace)?;
        runs.push(RunEntry {
            id,
            labels: serde_json::json!({ "split": r.split, "method": r.method.name(), "report": r.report }),
            summary: &r.trace.summary,
        });
    }
    write_summary(out, &Summary { command: "svm-bench", config: cfg, provenance, runs })?;
    Ok(written)
}

/// Drops wall-clock columns so that two runs can be compared byte for byte.
pub fn mask_wall_time(csv_text: &str) -> String {
    let mut lines = csv_text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let keep: Vec<bool> = header.split(',').map(|h| !h.ends_with("time_s")).collect();
    let filter = |line: &str| {
        line.split(',')
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(c, _)| c)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = filter(header);
    for line in lines {
        out.push('\n');
        out.push_str(&filter(line));
    }
    out
}
