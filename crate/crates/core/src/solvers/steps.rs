use crate::config::SolverConfig;
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::problem::DcProblem;
use crate::trace::IterateState;

/// Per-step diagnostics beyond the new state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// `‖z − y‖` for the splitting methods; the dual residual for ADMM.
    pub step_norm: f64,
    /// False when an inner solve hit its budget.
    pub inner_converged: bool,
}

/// `y = prox_{βf}(u)`, `z = prox_{βg}(2y − u + β∇h(y))`.
fn reflect(problem: &dyn DcProblem, beta: f64, u: &DenseVector) -> Result<(DenseVector, DenseVector)> {
    let y = problem.prox_f(beta, u)?;
    let grad = problem.grad_h(&y)?;
    let mut w = DenseVector::lin_comb(2.0, &y, -1.0, u);
    w.axpy(beta, &grad);
    let z = problem.prox_g(beta, &w)?;
    Ok((y, z))
}

/// `u + κ(z − y)`
fn relax(u: &DenseVector, kappa: f64, y: &DenseVector, z: &DenseVector) -> DenseVector {
    let mut x = u.clone();
    x.axpy(kappa, &(z - y));
    x
}

fn finish(state: &mut IterateState, u: DenseVector, y: DenseVector, z: DenseVector) -> StepInfo {
    let step_norm = z.dist(&y);
    state.u = u;
    state.y = y;
    state.z = z;
    state.n += 1;
    StepInfo {
        step_norm,
        inner_converged: true,
    }
}

/// One step of the θ-averaged scheme:
/// `u = (x + θv)/(1+θ)`, `x⁺ = u + κ(z − y)`, `v⁺ = (x⁺ + θv)/(1+θ)`.
pub fn drs_theta_step(
    state: &mut IterateState,
    problem: &dyn DcProblem,
    config: &SolverConfig,
) -> Result<StepInfo> {
    let kappa = config.kappa.value(state.n + 1);
    let a = 1.0 / (1.0 + config.theta);
    let b = config.theta / (1.0 + config.theta);
    let u = DenseVector::lin_comb(a, &state.x, b, &state.v);
    let (y, z) = reflect(problem, config.beta, &u)?;
    let x_new = relax(&u, kappa, &y, &z);
    state.v = DenseVector::lin_comb(a, &x_new, b, &state.v);
    state.x = x_new;
    Ok(finish(state, u, y, z))
}

/// One step of the α-averaged scheme:
/// `u = (1−α)x + αv`, `x⁺ = u + κ(z − y)`, `v⁺ = (1−α)v + αx`.
pub fn drs_alpha_step(
    state: &mut IterateState,
    problem: &dyn DcProblem,
    config: &SolverConfig,
) -> Result<StepInfo> {
    let n = state.n + 1;
    let kappa = config.kappa.value(n);
    let alpha = config.alpha.value(n);
    let u = DenseVector::lin_comb(1.0 - alpha, &state.x, alpha, &state.v);
    let (y, z) = reflect(problem, config.beta, &u)?;
    let x_new = relax(&u, kappa, &y, &z);
    state.v = DenseVector::lin_comb(1.0 - alpha, &state.v, alpha, &state.x);
    state.x = x_new;
    Ok(finish(state, u, y, z))
}

/// One step of the unified Douglas–Rachford baseline; `v` tracks `x`.
pub fn gdcp_step(state: &mut IterateState, problem: &dyn DcProblem, config: &SolverConfig) -> Result<StepInfo> {
    let kappa = config.kappa.value(state.n + 1);
    let u = state.x.clone();
    let (y, z) = reflect(problem, config.beta, &u)?;
    state.x = relax(&u, kappa, &y, &z);
    state.v = state.x.clone();
    Ok(finish(state, u, y, z))
}

/// One DCA step: minimize `f + g − ⟨∇h(xₙ), ·⟩` by Douglas–Rachford on the
/// pair `(f − ⟨∇h(xₙ), ·⟩, g)` with step `β`.
///
/// The inner loop runs until `‖z − y‖` (the change of the inner governing
/// variable) drops below `inner_tol` or `inner_budget` passes are spent; the
/// new iterate is the last `y`. The prox input `u` of the final inner pass is
/// kept in `aux` to warm-start the next subproblem.
pub fn dca_step(
    state: &mut IterateState,
    problem: &dyn DcProblem,
    config: &SolverConfig,
    inner_budget: usize,
    inner_tol: f64,
) -> Result<StepInfo> {
    let beta = config.beta;
    let shift = problem.grad_h(&state.x)?.scaled(beta);
    // inner variable w; the prox of f − ⟨s, ·⟩ at w is prox_{βf}(w + βs)
    let mut w = match state.aux.take() {
        Some(u_prev) => &u_prev - &shift,
        None => state.x.clone(),
    };
    let mut u = &w + &shift;
    let mut y = problem.prox_f(beta, &u)?;
    let mut z = problem.prox_g(beta, &DenseVector::lin_comb(2.0, &y, -1.0, &w))?;
    let mut converged = false;
    for _ in 1..inner_budget {
        if z.dist(&y) < inner_tol {
            converged = true;
            break;
        }
        w += &(&z - &y);
        u = &w + &shift;
        y = problem.prox_f(beta, &u)?;
        z = problem.prox_g(beta, &DenseVector::lin_comb(2.0, &y, -1.0, &w))?;
    }
    converged |= z.dist(&y) < inner_tol;
    state.aux = Some(u.clone());
    state.x = y.clone();
    state.v = state.x.clone();
    let mut info = finish(state, u, y, z);
    info.inner_converged = converged;
    Ok(info)
}

/// One round of scaled two-block ADMM on `f(x) + g(z) − ⟨∇h(x), z⟩`, `x = z`:
///
/// ```text
/// x⁺ = prox_{f/ρ}(z − w)
/// z⁺ = prox_{g/ρ}(x⁺ + w + ∇h(x⁺)/ρ)
/// w⁺ = w + x⁺ − z⁺
/// ```
///
/// State mapping: `x` and `y` hold the x-block, `v` and `z` the z-block,
/// `aux` the scaled dual `w`. `u = x − βρw` is the matching prox input for the
/// stationarity residuals at step `β`. The reported step norm is the dual
/// residual `ρ‖z⁺ − z‖`; `‖x − v‖` is the primal residual.
pub fn admm_step(
    state: &mut IterateState,
    problem: &dyn DcProblem,
    config: &SolverConfig,
    penalty: f64,
) -> Result<StepInfo> {
    let inv = 1.0 / penalty;
    let w = state.aux.take().unwrap_or_else(|| DenseVector::zeros(state.dim()));
    let x_new = problem.prox_f(inv, &(&state.z - &w))?;
    let mut arg = &x_new + &w;
    arg.axpy(inv, &problem.grad_h(&x_new)?);
    let z_new = problem.prox_g(inv, &arg)?;
    let dual_residual = penalty * z_new.dist(&state.z);
    let mut w_new = w;
    w_new += &(&x_new - &z_new);

    state.u = DenseVector::lin_comb(1.0, &x_new, -config.beta * penalty, &w_new);
    state.aux = Some(w_new);
    state.x = x_new.clone();
    state.y = x_new;
    state.v = z_new.clone();
    state.z = z_new;
    state.n += 1;
    Ok(StepInfo {
        step_norm: dual_residual,
        inner_converged: true,
    })
}
