//! The DC problem oracle bundle.

use std::fmt;

use serde::Serialize;

use crate::config::KappaSchedule;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Oracles for `p(x) = f(x) + g(x) − h(x)`.
///
/// Implementations must preserve dimension in every oracle. `strong_convexity`
/// is a common modulus `ρ` of `f` and `g`, `lipschitz` the constant `L` of
/// `∇h`; either may be unknown.
pub trait DcProblem: Send + Sync {
    fn dim(&self) -> usize;

    fn prox_f(&self, beta: f64, x: &DenseVector) -> Result<DenseVector>;

    fn prox_g(&self, beta: f64, x: &DenseVector) -> Result<DenseVector>;

    fn grad_h(&self, x: &DenseVector) -> Result<DenseVector>;

    /// `f(x) + g(x) − h(x)`
    fn objective(&self, x: &DenseVector) -> Result<f64>;

    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// Running count of inner prox solves that hit their budget. Solvers
    /// report the increase over a run.
    fn inner_nonconvergence(&self) -> usize {
        0
    }
}

type ProxFn = Box<dyn Fn(f64, &DenseVector) -> DenseVector + Send + Sync>;
type MapFn = Box<dyn Fn(&DenseVector) -> DenseVector + Send + Sync>;
type ValueFn = Box<dyn Fn(&DenseVector) -> f64 + Send + Sync>;

/// A [`DcProblem`] assembled from closures. Handy for small hand-made
/// instances and tests.
pub struct FnProblem {
    dim: usize,
    prox_f: ProxFn,
    prox_g: ProxFn,
    grad_h: MapFn,
    objective: ValueFn,
    rho: Option<f64>,
    lipschitz: Option<f64>,
}

impl FnProblem {
    pub fn new(
        dim: usize,
        prox_f: impl Fn(f64, &DenseVector) -> DenseVector + Send + Sync + 'static,
        prox_g: impl Fn(f64, &DenseVector) -> DenseVector + Send + Sync + 'static,
        grad_h: impl Fn(&DenseVector) -> DenseVector + Send + Sync + 'static,
        objective: impl Fn(&DenseVector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            prox_f: Box::new(prox_f),
            prox_g: Box::new(prox_g),
            grad_h: Box::new(grad_h),
            objective: Box::new(objective),
            rho: None,
            lipschitz: None,
        }
    }

    pub fn with_constants(mut self, rho: Option<f64>, lipschitz: Option<f64>) -> Self {
        self.rho = rho;
        self.lipschitz = lipschitz;
        self
    }
}

impl fmt::Debug for FnProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProblem")
            .field("dim", &self.dim)
            .field("rho", &self.rho)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl DcProblem for FnProblem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn prox_f(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim, "prox_f")?;
        Ok((self.prox_f)(beta, x))
    }

    fn prox_g(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim, "prox_g")?;
        Ok((self.prox_g)(beta, x))
    }

    fn grad_h(&self, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim, "grad_h")?;
        Ok((self.grad_h)(x))
    }

    fn objective(&self, x: &DenseVector) -> Result<f64> {
        x.ensure_len(self.dim, "objective")?;
        Ok((self.objective)(x))
    }

    fn strong_convexity(&self) -> Option<f64> {
        self.rho
    }

    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Satisfied,
    Violated,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
    /// `2ρ > L`
    pub strong_convexity: Condition,
    /// `κₙ` bounded inside `(0, 2)`
    pub kappa: Condition,
}

impl AssumptionReport {
    pub fn all_satisfied(&self) -> bool {
        self.strong_convexity == Condition::Satisfied && self.kappa == Condition::Satisfied
    }
}

/// Checks the convergence hypotheses. Purely informational: the benchmark
/// problems use an L1 term for `g`, which is not strongly convex.
pub fn check_assumption(problem: &dyn DcProblem, kappa: Option<&KappaSchedule>) -> AssumptionReport {
    let strong_convexity = match (problem.strong_convexity(), problem.lipschitz()) {
        (Some(rho), Some(l)) if 2.0 * rho > l => Condition::Satisfied,
        (Some(_), Some(_)) => Condition::Violated,
        _ => Condition::Unknown,
    };
    let kappa = match kappa {
        None => Condition::Unknown,
        Some(k) if k.is_admissible() => Condition::Satisfied,
        Some(_) => Condition::Violated,
    };
    AssumptionReport {
        strong_convexity,
        kappa,
    }
}

/// `p(x)`, rejecting wrong dimensions and non-finite values.
pub fn evaluate_objective(problem: &dyn DcProblem, x: &DenseVector) -> Result<f64> {
    x.ensure_len(problem.dim(), "objective")?;
    let p = problem.objective(x)?;
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::NonFinite("objective"))
    }
}
