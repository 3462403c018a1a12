//! Iterative methods behind one driver.

mod monitor;
mod steps;

use std::time::Instant;

pub use monitor::{
    backfill_lyapunov, estimate_reference, inertial_equivalent_u, lyapunov_a, lyapunov_c,
    stationarity_residuals,
};
pub use steps::{admm_step, dca_step, drs_alpha_step, drs_theta_step, gdcp_step, StepInfo};

use crate::config::{Method, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::DcProblem;
use crate::trace::{IterateState, RunTrace, TraceRow, TraceSummary};

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final governing iterate.
    pub x: DenseVector,
    /// Approximate stationary point: `prox_{βf}(x)` for the splitting
    /// methods, the x-iterate itself for DCA and ADMM.
    pub solution: DenseVector,
    pub state: IterateState,
    pub trace: RunTrace,
    /// `(xₙ, vₙ)` for `n = 0..=iterations` when `record_path` is set.
    pub path: Option<Vec<(DenseVector, DenseVector)>>,
    pub method: Method,
    pub config: SolverConfig,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        self.trace.summary.converged
    }

    pub fn iterations(&self) -> usize {
        self.trace.summary.iterations
    }
}

/// Advances `state` by one step of `method`.
pub fn step(
    method: Method,
    state: &mut IterateState,
    problem: &dyn DcProblem,
    config: &SolverConfig,
) -> Result<StepInfo> {
    match method {
        Method::DrsTheta => drs_theta_step(state, problem, config),
        Method::DrsAlpha => drs_alpha_step(state, problem, config),
        Method::Gdcp => gdcp_step(state, problem, config),
        Method::Dca { inner_budget, inner_tol } => dca_step(state, problem, config, inner_budget, inner_tol),
        Method::Admm { penalty } => admm_step(state, problem, config, penalty),
    }
}

fn is_splitting(method: Method) -> bool {
    matches!(method, Method::DrsTheta | Method::DrsAlpha | Method::Gdcp)
}

/// Runs `method` from `(x0, v0)` until the stop rule fires or `max_iter`
/// steps are taken. `v0` defaults to `x0`. A stop rule met on the final
/// allowed step counts as converged.
///
/// An oracle failure mid-run returns [`Error::Interrupted`] carrying the rows
/// recorded so far.
pub fn solve(
    problem: &dyn DcProblem,
    method: Method,
    config: &SolverConfig,
    x0: &DenseVector,
    v0: Option<&DenseVector>,
) -> Result<RunResult> {
    config.validate()?;
    method.validate()?;
    let dim = problem.dim();
    x0.ensure_len(dim, "starting point x0")?;
    x0.ensure_finite("starting point x0")?;
    let v0 = v0.unwrap_or(x0);
    v0.ensure_len(dim, "starting point v0")?;
    v0.ensure_finite("starting point v0")?;

    let start = Instant::now();
    let inner_before = problem.inner_nonconvergence();
    let mut state = IterateState::new(x0.clone(), v0.clone());
    let mut path = config.record_path.then(|| vec![(x0.clone(), v0.clone())]);
    let mut rows: Vec<TraceRow> = Vec::new();
    let mut inner_failures = 0;
    let mut converged = false;

    let summary_for = |rows: &[TraceRow], converged, r1, r2, inner| TraceSummary {
        method: method.name().to_string(),
        converged,
        iterations: rows.len(),
        total_seconds: start.elapsed().as_secs_f64(),
        stop_rule: config.stop,
        final_err: rows.last().map(|r| r.err),
        final_objective: rows.last().and_then(|r| r.objective),
        r1,
        r2,
        inner_nonconverged: inner,
    };
    let interrupted = |rows: Vec<TraceRow>, source: Error, inner| {
        let summary = summary_for(&rows, false, f64::NAN, f64::NAN, inner);
        Error::Interrupted {
            iteration: rows.len() + 1,
            source: Box::new(source),
            trace: Box::new(RunTrace { rows, summary }),
        }
    };

    while state.n < config.max_iter {
        let x_old = state.x.clone();
        let info = match step(method, &mut state, problem, config) {
            Ok(info) => info,
            Err(e) => return Err(interrupted(rows, e, inner_failures)),
        };
        if !info.inner_converged {
            inner_failures += 1;
        }
        if !state.x.is_finite() {
            return Err(interrupted(rows, Error::NonFinite("iterate"), inner_failures));
        }
        let d = state.x.dist(&x_old);
        let err = config.stop.measure(&state.x, &x_old);
        let objective = if config.track_objective {
            match problem.objective(&state.y) {
                Ok(p) => Some(p),
                Err(e) => return Err(interrupted(rows, e, inner_failures)),
            }
        } else {
            None
        };
        rows.push(TraceRow {
            n: state.n,
            err,
            err_squared: d * d,
            err_relative: d / state.x.norm().max(1.0),
            objective,
            time_s: start.elapsed().as_secs_f64(),
            step_norm: info.step_norm,
            gap_norm: state.x.dist(&state.v),
            lyap_c: None,
            lyap_a: None,
        });
        if let Some(p) = path.as_mut() {
            p.push((state.x.clone(), state.v.clone()));
        }
        if config.stop.is_met(err) {
            converged = true;
            break;
        }
    }

    let (solution, u_ref) = if is_splitting(method) {
        (problem.prox_f(config.beta, &state.x)?, state.x.clone())
    } else {
        (state.x.clone(), state.u.clone())
    };
    let (r1, r2) = stationarity_residuals(&solution, &u_ref, problem, config.beta)?;
    let inner_total = inner_failures + problem.inner_nonconvergence().saturating_sub(inner_before);
    let summary = summary_for(&rows, converged, r1, r2, inner_total);
    Ok(RunResult {
        x: state.x.clone(),
        solution,
        state,
        trace: RunTrace { rows, summary },
        path,
        method,
        config: config.clone(),
    })
}
