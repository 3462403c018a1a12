use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, gaussian_vector, DenseMatrix, DenseVector, RngSeed};
use crate::problem::DcProblem;
use crate::prox::{grad_log_regularizer, soft_threshold, LeastSquaresProx, LinearMethod, LogRegularizer};

/// Least squares with a logarithmic regularizer,
/// `½‖Aw − b‖² + Σ μ log(1 + |wᵢ|/ε)`, split as `f = ½‖Aw − b‖²`,
/// `g = (μ/ε)‖w‖₁` and `h` the smooth convex remainder.
///
/// `A` is m×N standard Gaussian with unit-norm columns and `b` is standard
/// Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlsLogSpec {
    pub m: usize,
    pub n: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub seed: RngSeed,
}

pub const DEFAULT_MU: f64 = 0.001;
pub const DEFAULT_EPSILON: f64 = 0.5;

impl RlsLogSpec {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            mu: DEFAULT_MU,
            epsilon: DEFAULT_EPSILON,
            seed: RngSeed(0),
        }
    }

    pub fn with_seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug)]
pub struct RlsLog {
    ls: LeastSquaresProx,
    reg: LogRegularizer,
}

/// Seeded instance; see [`RlsLogSpec`].
pub fn build_rls_log(spec: &RlsLogSpec) -> Result<RlsLog> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::InvalidConfig(format!("sizes must be >= 1, got ({}, {})", spec.m, spec.n)));
    }
    let a = gaussian_matrix(spec.m, spec.n, spec.seed.derive(1), true);
    let b = gaussian_vector(spec.m, &mut spec.seed.derive(2).rng());
    RlsLog::from_parts(a, b, spec.mu, spec.epsilon, LinearMethod::Lu)
}

impl RlsLog {
    pub fn from_parts(a: DenseMatrix, b: DenseVector, mu: f64, epsilon: f64, method: LinearMethod) -> Result<Self> {
        Ok(Self {
            ls: LeastSquaresProx::new(a, b, method)?,
            reg: LogRegularizer::new(mu, epsilon)?,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        self.ls.matrix()
    }

    pub fn data(&self) -> &DenseVector {
        self.ls.data()
    }

    pub fn regularizer(&self) -> LogRegularizer {
        self.reg
    }

    /// Weight `μ/ε` of the L1 part.
    pub fn l1_weight(&self) -> f64 {
        self.reg.mu / self.reg.epsilon
    }
}

impl DcProblem for RlsLog {
    fn dim(&self) -> usize {
        self.ls.matrix().cols()
    }

    fn prox_f(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        self.ls.prox(beta, x)
    }

    fn prox_g(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "prox_g")?;
        Ok(soft_threshold(x, beta * self.l1_weight()))
    }

    fn grad_h(&self, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "grad_h")?;
        Ok(grad_log_regularizer(x, &self.reg))
    }

    fn objective(&self, x: &DenseVector) -> Result<f64> {
        Ok(self.ls.value(x)? + self.l1_weight() * x.norm_l1() - self.reg.value(x))
    }

    /// `g` is not strongly convex.
    fn strong_convexity(&self) -> Option<f64> {
        Some(0.0)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.reg.lipschitz())
    }
}
