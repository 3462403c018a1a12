//! Stationarity residuals, Lyapunov monitors and the inertial form.

use super::RunResult;
use crate::config::Method;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::DcProblem;

/// `r1 = ‖x − prox_{βf}(u)‖`, `r2 = ‖x − prox_{βg}(2x − u + β∇h(x))‖`.
///
/// Both vanish exactly when `x` is stationary and `u` is a matching point
/// of the fixed-point set.
pub fn stationarity_residuals(
    x: &DenseVector,
    u: &DenseVector,
    problem: &dyn DcProblem,
    beta: f64,
) -> Result<(f64, f64)> {
    let r1 = x.dist(&problem.prox_f(beta, u)?);
    let mut w = DenseVector::lin_comb(2.0, x, -1.0, u);
    w.axpy(beta, &problem.grad_h(x)?);
    let r2 = x.dist(&problem.prox_g(beta, &w)?);
    Ok((r1, r2))
}

/// Reference pair `(x̄, ȳ)` from a converged run: the last `y` and `u`.
pub fn estimate_reference(result: &RunResult) -> Result<(DenseVector, DenseVector)> {
    if !result.converged() {
        return Err(Error::NotConverged("reference estimation: run"));
    }
    Ok((result.state.y.clone(), result.state.u.clone()))
}

/// `cₙ = ‖xₙ−ȳ‖²/(1+θ) + θ‖vₙ−ȳ‖² + θ²/(1+θ)²‖xₙ−vₙ₋₁‖²` along a recorded
/// path, with the last term zero at `n = 0`.
pub fn lyapunov_c(path: &[(DenseVector, DenseVector)], y_bar: &DenseVector, theta: f64) -> Vec<f64> {
    let w = theta * theta / ((1.0 + theta) * (1.0 + theta));
    path.iter()
        .enumerate()
        .map(|(n, (x, v))| {
            let lag = if n == 0 { 0.0 } else { x.dist_sq(&path[n - 1].1) };
            x.dist_sq(y_bar) / (1.0 + theta) + theta * v.dist_sq(y_bar) + w * lag
        })
        .collect()
}

/// `aₙ = ‖xₙ−ȳ‖² + ‖vₙ−ȳ‖²` along a recorded path.
pub fn lyapunov_a(path: &[(DenseVector, DenseVector)], y_bar: &DenseVector) -> Vec<f64> {
    path.iter().map(|(x, v)| x.dist_sq(y_bar) + v.dist_sq(y_bar)).collect()
}

/// Fills `lyap_c` (θ-scheme) or `lyap_a` (α-scheme) in the trace rows from
/// the recorded path. Other methods are left untouched.
pub fn backfill_lyapunov(result: &mut RunResult, y_bar: &DenseVector) -> Result<()> {
    let path = result
        .path
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("Lyapunov back-fill needs record_path".into()))?;
    let values = match result.method {
        Method::DrsTheta => lyapunov_c(path, y_bar, result.config.theta),
        Method::DrsAlpha => lyapunov_a(path, y_bar),
        _ => return Ok(()),
    };
    for row in &mut result.trace.rows {
        let value = values[row.n];
        match result.method {
            Method::DrsTheta => row.lyap_c = Some(value),
            _ => row.lyap_a = Some(value),
        }
    }
    Ok(())
}

/// Inertial form of the α-scheme's averaging: with `vₙ₊₁ = (1−α)vₙ + αxₙ`
/// and `θ = (1−2α)/α`, returns `vₙ₊₁ + θ(vₙ₊₁ − vₙ)`, which equals
/// `(1−α)xₙ + αvₙ`.
pub fn inertial_equivalent_u(x: &DenseVector, v: &DenseVector, alpha: f64) -> DenseVector {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let theta = (1.0 - 2.0 * alpha) / alpha;
    let v_next = DenseVector::lin_comb(1.0 - alpha, v, alpha, x);
    // v_next - v is formed as alpha (x - v) so the 1/alpha factor in theta
    // does not amplify cancellation
    let mut out = v_next;
    out.axpy(theta * alpha, &(x - v));
    out
}
