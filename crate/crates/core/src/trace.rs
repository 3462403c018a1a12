//! Iterate state and per-iteration run records.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::StopRule;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Current iterates of a splitting method.
///
/// `x` is the governing sequence (the one the stop rule watches), `v` the
/// averaging sequence, and `u`, `y`, `z` the prox input and outputs of the
/// last step. `aux` holds method-private memory: the scaled dual for ADMM and
/// the inner warm start for DCA.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub n: usize,
    pub x: DenseVector,
    pub v: DenseVector,
    pub u: DenseVector,
    pub y: DenseVector,
    pub z: DenseVector,
    pub aux: Option<DenseVector>,
}

impl IterateState {
    pub fn new(x0: DenseVector, v0: DenseVector) -> Self {
        Self {
            n: 0,
            u: x0.clone(),
            y: x0.clone(),
            z: x0.clone(),
            x: x0,
            v: v0,
            aux: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// One row per completed iteration `n`, describing the state after it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    /// Governing stop measure of `xₙ − xₙ₋₁`.
    pub err: f64,
    /// `‖xₙ − xₙ₋₁‖²`, recorded whatever rule governs.
    pub err_squared: f64,
    /// `‖xₙ − xₙ₋₁‖ / max(1, ‖xₙ‖)`, recorded whatever rule governs.
    pub err_relative: f64,
    pub objective: Option<f64>,
    /// Seconds since the run started.
    pub time_s: f64,
    /// `‖z − y‖` of the step that produced this row.
    pub step_norm: f64,
    /// `‖xₙ − vₙ‖`
    pub gap_norm: f64,
    pub lyap_c: Option<f64>,
    pub lyap_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
    pub total_seconds: f64,
    pub stop_rule: StopRule,
    pub final_err: Option<f64>,
    pub final_objective: Option<f64>,
    /// `‖x − prox_{βf}(u)‖` at the returned point.
    pub r1: f64,
    /// `‖x − prox_{βg}(2x − u + β∇h(x))‖` at the returned point.
    pub r2: f64,
    /// Inner solves (DCA subproblems, iterative proxes) that hit their budget.
    pub inner_nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub summary: TraceSummary,
}

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "err",
    "objective",
    "time_s",
    "step_norm",
    "gap_norm",
    "lyap_c",
    "lyap_a",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl RunTrace {
    pub fn write_csv_to<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.err.to_string(),
                opt(r.objective),
                r.time_s.to_string(),
                r.step_norm.to_string(),
                r.gap_norm.to_string(),
                opt(r.lyap_c),
                opt(r.lyap_a),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv_to(file)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }

    pub fn err_series(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.err).collect()
    }
}
