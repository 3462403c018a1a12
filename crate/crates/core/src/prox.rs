//! Proximal operators and smooth-part gradients.
//!
//! `prox_{βφ}(x) = argmin_u φ(u) + ‖u − x‖² / (2β)`. Every prox takes the
//! step `β` explicitly. The `*Prox` structs cache the matrix factorization
//! for each distinct `β` they have seen, so repeated calls inside a solver
//! loop cost one triangular solve.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, pseudo_inverse, DenseMatrix, DenseVector, LuFactor};

/// Componentwise `sign(xᵢ) · max(|xᵢ| − λ, 0)`, the prox of `λ‖·‖₁`.
pub fn soft_threshold(x: &DenseVector, lambda: f64) -> DenseVector {
    debug_assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return x.clone();
    }
    x.map(|v| soft_threshold_scalar(v, lambda))
}

#[inline]
pub fn soft_threshold_scalar(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Prox of `l1‖·‖₁ + (ridge/2)‖·‖²` with step `β`.
pub fn prox_elastic_net(x: &DenseVector, beta: f64, l1: f64, ridge: f64) -> DenseVector {
    let mut out = soft_threshold(x, beta * l1);
    if ridge != 0.0 {
        out.scale(1.0 / (1.0 + beta * ridge));
    }
    out
}

/// Small per-β cache of derived solver objects.
#[derive(Debug)]
struct StepCache<T> {
    entries: Mutex<HashMap<u64, Arc<T>>>,
}

impl<T> Default for StepCache<T> {
    fn default() -> Self {
        Self {
            entries: Mutex::new(HashMap::new()),
        }
    }
}

impl<T> StepCache<T> {
    fn get_or_try_insert(&self, beta: f64, build: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
        let key = beta.to_bits();
        if let Some(hit) = self.entries.lock().expect("prox cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(build()?);
        let mut map = self.entries.lock().expect("prox cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(built)))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("prox step beta must be > 0, got {beta}")))
    }
}

// ---------------------------------------------------------------------------
// Quadratic

/// `f(x) = ½ xᵀQx + cᵀx + d` with `Q` of shape M×N.
///
/// For square `Q` the prox is the closed form `(Q + I/β)⁻¹(x/β − c)`. For
/// M ≠ N the prox goes through the left pseudo-inverse of the padded matrix
/// `B = Q + I_pad/β` (`I_pad` has ones on the main diagonal), applied to
/// `x/β − c` zero-padded to length M. That path reproduces the rectangular
/// workaround used in the tuning experiments; it coincides with the square
/// formula when M = N but is not the prox of a single convex function
/// otherwise. The objective for M ≠ N uses the Gram form `½‖Qx‖²`.
#[derive(Debug, Clone)]
pub struct QuadraticFn {
    pub q: DenseMatrix,
    pub c: DenseVector,
    pub d: f64,
}

impl QuadraticFn {
    pub fn new(q: DenseMatrix, c: DenseVector, d: f64) -> Result<Self> {
        c.ensure_len(q.cols(), "quadratic linear term")?;
        Ok(Self { q, c, d })
    }

    pub fn dim(&self) -> usize {
        self.q.cols()
    }

    pub fn value(&self, x: &DenseVector) -> Result<f64> {
        let qx = self.q.mul_vec(x)?;
        let quad = if self.q.is_square() {
            0.5 * x.dot(&qx)
        } else {
            0.5 * qx.norm_sq()
        };
        Ok(quad + self.c.dot(x) + self.d)
    }
}

#[derive(Debug)]
enum QuadraticSolver {
    Square(LuFactor),
    Padded(DenseMatrix),
}

impl QuadraticSolver {
    fn build(f: &QuadraticFn, beta: f64) -> Result<Self> {
        let mut b = f.q.clone();
        b.add_diagonal(1.0 / beta);
        if f.q.is_square() {
            Ok(Self::Square(LuFactor::new(&b)?))
        } else {
            Ok(Self::Padded(pseudo_inverse(&b)?))
        }
    }

    fn apply(&self, f: &QuadraticFn, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(f.dim(), "quadratic prox")?;
        let rhs = DenseVector::lin_comb(1.0 / beta, x, -1.0, &f.c);
        match self {
            Self::Square(lu) => lu.solve(&rhs),
            Self::Padded(p) => {
                let m = p.cols();
                let padded = DenseVector::from_fn(m, |i| if i < rhs.len() { rhs[i] } else { 0.0 });
                p.mul_vec(&padded)
            }
        }
    }
}

/// Uncached quadratic prox.
pub fn prox_quadratic(f: &QuadraticFn, beta: f64, x: &DenseVector) -> Result<DenseVector> {
    check_beta(beta)?;
    QuadraticSolver::build(f, beta)?.apply(f, beta, x)
}

/// Quadratic prox with the factorization cached per β.
#[derive(Debug)]
pub struct QuadraticProx {
    f: QuadraticFn,
    cache: StepCache<QuadraticSolver>,
}

impl QuadraticProx {
    pub fn new(f: QuadraticFn) -> Self {
        Self {
            f,
            cache: StepCache::default(),
        }
    }

    pub fn function(&self) -> &QuadraticFn {
        &self.f
    }

    pub fn prox(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        check_beta(beta)?;
        let solver = self.cache.get_or_try_insert(beta, || QuadraticSolver::build(&self.f, beta))?;
        solver.apply(&self.f, beta, x)
    }
}

// ---------------------------------------------------------------------------
// Least squares

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearMethod {
    #[default]
    Lu,
    /// Conjugate gradient on the normal-equation system, relative tolerance 1e−12.
    Cg,
}

const CG_TOL: f64 = 1e-12;

fn ls_system(a: &DenseMatrix, beta: f64) -> DenseMatrix {
    let mut m = a.gram();
    m.scale(beta);
    m.add_diagonal(1.0);
    m
}

fn ls_rhs(atb: &DenseVector, beta: f64, u: &DenseVector) -> DenseVector {
    DenseVector::lin_comb(beta, atb, 1.0, u)
}

fn ls_cg(a: &DenseMatrix, beta: f64, rhs: &DenseVector) -> Result<DenseVector> {
    let apply = |v: &DenseVector| {
        let av = a.mul_vec(v).expect("dimension checked");
        let mut out = a.tr_mul_vec(&av).expect("dimension checked");
        out.scale(beta);
        out += v;
        out
    };
    let outcome = conjugate_gradient(apply, rhs, CG_TOL, 10 * rhs.len().max(10));
    if outcome.converged {
        Ok(outcome.x)
    } else {
        Err(Error::NotConverged("conjugate gradient"))
    }
}

/// Prox of `½‖A·−b‖²`: solves `(βAᵀA + I) y = βAᵀb + u`.
pub fn prox_least_squares(
    a: &DenseMatrix,
    b: &DenseVector,
    beta: f64,
    u: &DenseVector,
    method: LinearMethod,
) -> Result<DenseVector> {
    check_beta(beta)?;
    b.ensure_len(a.rows(), "least-squares data")?;
    u.ensure_len(a.cols(), "least-squares prox")?;
    let rhs = ls_rhs(&a.tr_mul_vec(b)?, beta, u);
    match method {
        LinearMethod::Lu => LuFactor::new(&ls_system(a, beta))?.solve(&rhs),
        LinearMethod::Cg => ls_cg(a, beta, &rhs),
    }
}

/// Least-squares prox with `Aᵀb` precomputed and the LU factor cached per β.
#[derive(Debug)]
pub struct LeastSquaresProx {
    a: DenseMatrix,
    b: DenseVector,
    atb: DenseVector,
    method: LinearMethod,
    cache: StepCache<LuFactor>,
}

impl LeastSquaresProx {
    pub fn new(a: DenseMatrix, b: DenseVector, method: LinearMethod) -> Result<Self> {
        b.ensure_len(a.rows(), "least-squares data")?;
        let atb = a.tr_mul_vec(&b)?;
        Ok(Self {
            a,
            b,
            atb,
            method,
            cache: StepCache::default(),
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn data(&self) -> &DenseVector {
        &self.b
    }

    /// `½‖Ax − b‖²`
    pub fn value(&self, x: &DenseVector) -> Result<f64> {
        Ok(0.5 * (&self.a.mul_vec(x)? - &self.b).norm_sq())
    }

    pub fn prox(&self, beta: f64, u: &DenseVector) -> Result<DenseVector> {
        check_beta(beta)?;
        u.ensure_len(self.a.cols(), "least-squares prox")?;
        let rhs = ls_rhs(&self.atb, beta, u);
        match self.method {
            LinearMethod::Lu => {
                let lu = self
                    .cache
                    .get_or_try_insert(beta, || LuFactor::new(&ls_system(&self.a, beta)))?;
                lu.solve(&rhs)
            }
            LinearMethod::Cg => ls_cg(&self.a, beta, &rhs),
        }
    }
}

// ---------------------------------------------------------------------------
// Huber

/// Componentwise Huber function: `½t²` for `|t| ≤ δ`, `δ(|t| − ½δ)` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct HuberFn {
    pub delta: f64,
}

impl HuberFn {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self { delta })
        } else {
            Err(Error::InvalidConfig(format!("Huber delta must be > 0, got {delta}")))
        }
    }

    pub fn scalar(&self, t: f64) -> f64 {
        if t.abs() <= self.delta {
            0.5 * t * t
        } else {
            self.delta * (t.abs() - 0.5 * self.delta)
        }
    }

    pub fn value(&self, x: &DenseVector) -> f64 {
        x.iter().map(|&t| self.scalar(t)).sum()
    }
}

/// Gradient of the componentwise Huber function; 1-Lipschitz.
pub fn grad_huber(x: &DenseVector, f: &HuberFn) -> DenseVector {
    x.map(|t| t.clamp(-f.delta, f.delta))
}

// ---------------------------------------------------------------------------
// Logarithmic regularizer remainder

/// `h(w) = Σ μ(|wᵢ|/ε − log(|wᵢ| + ε) + log ε)`, the smooth convex part
/// subtracted from `(μ/ε)‖w‖₁` to leave the log penalty.
#[derive(Debug, Clone, Copy)]
pub struct LogRegularizer {
    pub mu: f64,
    pub epsilon: f64,
}

impl LogRegularizer {
    pub fn new(mu: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) || !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "log regularizer needs mu >= 0 and epsilon > 0, got mu={mu}, epsilon={epsilon}"
            )));
        }
        Ok(Self { mu, epsilon })
    }

    /// Lipschitz constant `μ/ε²` of the gradient.
    pub fn lipschitz(&self) -> f64 {
        self.mu / (self.epsilon * self.epsilon)
    }

    pub fn scalar(&self, t: f64) -> f64 {
        let a = t.abs();
        self.mu * (a / self.epsilon - (a + self.epsilon).ln() + self.epsilon.ln())
    }

    pub fn value(&self, w: &DenseVector) -> f64 {
        w.iter().map(|&t| self.scalar(t)).sum()
    }
}

/// `μ·sign(wᵢ)·(1/ε − 1/(|wᵢ| + ε))`, zero at the origin.
pub fn grad_log_regularizer(w: &DenseVector, f: &LogRegularizer) -> DenseVector {
    let inv_eps = 1.0 / f.epsilon;
    w.map(|t| {
        if t == 0.0 {
            0.0
        } else {
            f.mu * t.signum() * (inv_eps - 1.0 / (t.abs() + f.epsilon))
        }
    })
}

/// Gradient of `½‖w‖²`.
pub fn grad_half_sq_norm(w: &DenseVector) -> DenseVector {
    w.clone()
}

// ---------------------------------------------------------------------------
// Hinge loss plus quadratic

/// `f(w, b) = q‖w‖² + C Σᵢ max(0, 1 − yᵢ(wᵀxᵢ + b))`.
#[derive(Debug, Clone)]
pub struct HingeQuadraticFn {
    pub samples: DenseMatrix,
    pub labels: Vec<f64>,
    pub c: f64,
    pub quad_coeff: f64,
}

/// Successive-change tolerance of the dual coordinate solver.
pub const HINGE_INNER_TOL: f64 = 1e-8;
/// Pass cap of the dual coordinate solver.
pub const HINGE_INNER_PASSES: usize = 200;

impl HingeQuadraticFn {
    pub fn new(samples: DenseMatrix, labels: Vec<f64>, c: f64, quad_coeff: f64) -> Result<Self> {
        if labels.len() != samples.rows() {
            return Err(Error::dims("hinge labels", samples.rows(), labels.len()));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidConfig("hinge labels must be +1 or -1".into()));
        }
        if !(c >= 0.0 && quad_coeff >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "hinge weights must be non-negative, got C={c}, q={quad_coeff}"
            )));
        }
        Ok(Self {
            samples,
            labels,
            c,
            quad_coeff,
        })
    }

    pub fn features(&self) -> usize {
        self.samples.cols()
    }

    pub fn hinge_sum(&self, w: &DenseVector, b: f64) -> f64 {
        (0..self.samples.rows())
            .map(|i| {
                let s: f64 = self.samples.row(i).iter().zip(w.iter()).map(|(x, w)| x * w).sum();
                (1.0 - self.labels[i] * (s + b)).max(0.0)
            })
            .sum()
    }

    pub fn value(&self, w: &DenseVector, b: f64) -> f64 {
        self.quad_coeff * w.norm_sq() + self.c * self.hinge_sum(w, b)
    }
}

/// Result of [`prox_hinge_quadratic`].
#[derive(Debug, Clone)]
pub struct HingeProx {
    pub w: DenseVector,
    pub b: f64,
    pub passes: usize,
    pub converged: bool,
    /// Dual objective after each pass; non-decreasing.
    pub dual_values: Vec<f64>,
}

/// Prox of [`HingeQuadraticFn`] over the stacked variable `(w, b)`.
///
/// Solved through the dual: one multiplier per sample in the box `[0, C]`,
/// maximized by exact cyclic coordinate ascent. The primal point is
/// `w = (u_w + β Σ αᵢyᵢxᵢ)/(1 + 2qβ)`, `b = u_b + β Σ αᵢyᵢ`.
pub fn prox_hinge_quadratic(
    f: &HingeQuadraticFn,
    beta: f64,
    u_w: &DenseVector,
    u_b: f64,
) -> Result<HingeProx> {
    check_beta(beta)?;
    u_w.ensure_len(f.features(), "hinge prox")?;
    let n = f.samples.rows();
    let shrink = 1.0 / (1.0 + 2.0 * f.quad_coeff * beta);
    let mut w = u_w.scaled(shrink);
    let mut b = u_b;
    let mut alpha = vec![0.0; n];
    let curvature: Vec<f64> = (0..n)
        .map(|i| {
            let xx: f64 = f.samples.row(i).iter().map(|v| v * v).sum();
            beta * (xx * shrink + 1.0)
        })
        .collect();

    let mut dual_values = Vec::new();
    let mut passes = 0;
    let mut converged = f.c == 0.0 || n == 0;
    while !converged && passes < HINGE_INNER_PASSES {
        passes += 1;
        let mut change_sq = 0.0;
        for i in 0..n {
            let xi = f.samples.row(i);
            let yi = f.labels[i];
            let margin: f64 = xi.iter().zip(w.iter()).map(|(x, w)| x * w).sum::<f64>() + b;
            let grad = 1.0 - yi * margin;
            let next = (alpha[i] + grad / curvature[i]).clamp(0.0, f.c);
            let delta = next - alpha[i];
            if delta == 0.0 {
                continue;
            }
            alpha[i] = next;
            let dw = delta * yi * beta * shrink;
            for (wj, x) in w.iter_mut().zip(xi) {
                *wj += dw * x;
            }
            let db = delta * yi * beta;
            b += db;
            change_sq += dw * dw * xi.iter().map(|x| x * x).sum::<f64>() + db * db;
        }
        dual_values.push(hinge_dual_value(f, beta, u_w, u_b, &w, b, &alpha));
        if change_sq.sqrt() < HINGE_INNER_TOL {
            converged = true;
        }
    }
    Ok(HingeProx {
        w,
        b,
        passes,
        converged,
        dual_values,
    })
}

/// Lagrangian evaluated at its minimizer `(w(α), b(α))`.
fn hinge_dual_value(
    f: &HingeQuadraticFn,
    beta: f64,
    u_w: &DenseVector,
    u_b: f64,
    w: &DenseVector,
    b: f64,
    alpha: &[f64],
) -> f64 {
    let mut lagr = f.quad_coeff * w.norm_sq() + (w.dist_sq(u_w) + (b - u_b).powi(2)) / (2.0 * beta);
    for (i, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let s: f64 = f.samples.row(i).iter().zip(w.iter()).map(|(x, w)| x * w).sum();
        lagr += a * (1.0 - f.labels[i] * (s + b));
    }
    lagr
}
