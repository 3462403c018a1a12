use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, gaussian_vector, symmetric_eigenvalues, DenseMatrix, DenseVector, RngSeed};
use crate::problem::DcProblem;
use crate::prox::{grad_huber, prox_elastic_net, HuberFn, QuadraticFn, QuadraticProx};

/// Quadratic plus L1 minus Huber instance.
///
/// `Q` is an M×N standard Gaussian matrix, or with `spd` set the N×N matrix
/// `GᵀG + 0.1·I` built from an M×N Gaussian `G`. `c` is standard Gaussian and
/// `d = 0`. The optional `ridge` adds `(ridge/2)‖x‖²` to `g`, which makes `g`
/// strongly convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadL1HuberSpec {
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub l1_weight: f64,
    pub ridge: f64,
    pub spd: bool,
    pub seed: RngSeed,
}

pub const DEFAULT_HUBER_DELTA: f64 = 0.001;
pub const DEFAULT_L1_WEIGHT: f64 = 0.1;
const SPD_SHIFT: f64 = 0.1;

impl QuadL1HuberSpec {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            delta: DEFAULT_HUBER_DELTA,
            l1_weight: DEFAULT_L1_WEIGHT,
            ridge: 0.0,
            spd: false,
            seed: RngSeed(0),
        }
    }

    pub fn with_seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidConfig(format!("sizes must be >= 1, got ({}, {})", self.m, self.n)));
        }
        if !self.spd && self.m < self.n {
            return Err(Error::InvalidConfig(format!(
                "rectangular Q needs M >= N, got ({}, {})",
                self.m, self.n
            )));
        }
        if !(self.l1_weight >= 0.0 && self.ridge >= 0.0) {
            return Err(Error::InvalidConfig("l1_weight and ridge must be >= 0".into()));
        }
        HuberFn::new(self.delta).map(|_| ())
    }
}

#[derive(Debug)]
pub struct QuadL1Huber {
    prox: QuadraticProx,
    huber: HuberFn,
    l1_weight: f64,
    ridge: f64,
    rho: Option<f64>,
}

/// Seeded instance; see [`QuadL1HuberSpec`].
pub fn build_quad_l1_huber(spec: &QuadL1HuberSpec) -> Result<QuadL1Huber> {
    spec.validate()?;
    let g = gaussian_matrix(spec.m, spec.n, spec.seed.derive(1), false);
    let q = if spec.spd {
        let mut q = g.gram();
        q.add_diagonal(SPD_SHIFT);
        q
    } else {
        g
    };
    let c = gaussian_vector(spec.n, &mut spec.seed.derive(2).rng());
    QuadL1Huber::from_parts(q, c, 0.0, spec.delta, spec.l1_weight, spec.ridge)
}

impl QuadL1Huber {
    pub fn from_parts(q: DenseMatrix, c: DenseVector, d: f64, delta: f64, l1_weight: f64, ridge: f64) -> Result<Self> {
        let rho = if q.is_square() {
            let sym = DenseMatrix::from_fn(q.rows(), q.cols(), |i, j| 0.5 * (q.get(i, j) + q.get(j, i)));
            let lambda_min = symmetric_eigenvalues(&sym)?[0];
            Some(lambda_min.min(ridge).max(0.0))
        } else {
            None
        };
        Ok(Self {
            prox: QuadraticProx::new(QuadraticFn::new(q, c, d)?),
            huber: HuberFn::new(delta)?,
            l1_weight,
            ridge,
            rho,
        })
    }

    pub fn quadratic(&self) -> &QuadraticFn {
        self.prox.function()
    }

    pub fn huber(&self) -> HuberFn {
        self.huber
    }

    pub fn l1_weight(&self) -> f64 {
        self.l1_weight
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

impl DcProblem for QuadL1Huber {
    fn dim(&self) -> usize {
        self.quadratic().dim()
    }

    fn prox_f(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        self.prox.prox(beta, x)
    }

    fn prox_g(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "prox_g")?;
        Ok(prox_elastic_net(x, beta, self.l1_weight, self.ridge))
    }

    fn grad_h(&self, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "grad_h")?;
        Ok(grad_huber(x, &self.huber))
    }

    fn objective(&self, x: &DenseVector) -> Result<f64> {
        let f = self.quadratic().value(x)?;
        let g = self.l1_weight * x.norm_l1() + 0.5 * self.ridge * x.norm_sq();
        Ok(f + g - self.huber.value(x))
    }

    fn strong_convexity(&self) -> Option<f64> {
        self.rho
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}
