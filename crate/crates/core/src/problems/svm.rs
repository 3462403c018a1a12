use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::problem::DcProblem;
use crate::prox::{prox_hinge_quadratic, soft_threshold, HingeQuadraticFn};

/// L1-regularized linear SVM written as a DC program over `(w, b)`:
/// `f(w, b) = q‖w‖² + C Σ max(0, 1 − yᵢ(wᵀxᵢ + b))`, `g(w) = λ‖w‖₁`,
/// `h(w) = ½‖w‖²`. The bias is left out of `g` and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmSpec {
    pub c: f64,
    pub lambda: f64,
    /// Coefficient `q` of `‖w‖²` in `f`.
    pub quad_coeff: f64,
}

impl Default for SvmSpec {
    fn default() -> Self {
        Self {
            c: 1.0,
            lambda: 0.001,
            quad_coeff: 1.0,
        }
    }
}

#[derive(Debug)]
pub struct SvmProblem {
    hinge: HingeQuadraticFn,
    lambda: f64,
    inner_failures: AtomicUsize,
}

/// Builds the SVM problem on a training set with ±1 labels.
pub fn build_svm(spec: &SvmSpec, train: &Dataset) -> Result<SvmProblem> {
    if !(spec.lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {}", spec.lambda)));
    }
    Ok(SvmProblem {
        hinge: HingeQuadraticFn::new(train.x.clone(), train.y.clone(), spec.c, spec.quad_coeff)?,
        lambda: spec.lambda,
        inner_failures: AtomicUsize::new(0),
    })
}

/// Splits a stacked `(w, b)` vector.
pub fn split_params(x: &DenseVector) -> (DenseVector, f64) {
    let (w, b) = x.split_at(x.len() - 1);
    (DenseVector::from(w), b[0])
}

fn stack(w: DenseVector, b: f64) -> DenseVector {
    let mut v = w.into_vec();
    v.push(b);
    DenseVector::new(v)
}

/// `sign(wᵀxᵢ + b)` per row, with `sign(0) = +1`.
pub fn predict_svm(w: &DenseVector, b: f64, x: &DenseMatrix) -> Result<Vec<f64>> {
    let scores = x.mul_vec(w)?;
    Ok(scores.iter().map(|s| if s + b >= 0.0 { 1.0 } else { -1.0 }).collect())
}

impl SvmProblem {
    pub fn features(&self) -> usize {
        self.hinge.features()
    }

    pub fn hinge(&self) -> &HingeQuadraticFn {
        &self.hinge
    }
}

impl DcProblem for SvmProblem {
    fn dim(&self) -> usize {
        self.features() + 1
    }

    fn prox_f(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "prox_f")?;
        let (w, b) = split_params(x);
        let p = prox_hinge_quadratic(&self.hinge, beta, &w, b)?;
        if !p.converged {
            self.inner_failures.fetch_add(1, Ordering::Relaxed);
        }
        Ok(stack(p.w, p.b))
    }

    fn prox_g(&self, beta: f64, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "prox_g")?;
        let (w, b) = split_params(x);
        Ok(stack(soft_threshold(&w, beta * self.lambda), b))
    }

    fn grad_h(&self, x: &DenseVector) -> Result<DenseVector> {
        x.ensure_len(self.dim(), "grad_h")?;
        let (w, _) = split_params(x);
        Ok(stack(w, 0.0))
    }

    fn objective(&self, x: &DenseVector) -> Result<f64> {
        x.ensure_len(self.dim(), "objective")?;
        let (w, b) = split_params(x);
        Ok(self.hinge.value(&w, b) + self.lambda * w.norm_l1() - 0.5 * w.norm_sq())
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(0.0)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }

    fn inner_nonconvergence(&self) -> usize {
        self.inner_failures.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_examples() {
        let x = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![-3.0, 5.0]]).unwrap();
        assert_eq!(predict_svm(&DenseVector::zeros(2), 1.0, &x).unwrap(), vec![1.0, 1.0]);
        assert_eq!(predict_svm(&DenseVector::zeros(2), -1.0, &x).unwrap(), vec![-1.0, -1.0]);
        assert_eq!(predict_svm(&DenseVector::from([1.0, 0.0]), 0.0, &x).unwrap(), vec![1.0, -1.0]);
        assert_eq!(predict_svm(&DenseVector::zeros(2), 0.0, &x).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn bias_is_not_shrunk() {
        let data = Dataset::new(DenseMatrix::identity(2), vec![1.0, -1.0]).unwrap();
        let p = build_svm(&SvmSpec::default(), &data).unwrap();
        let x = DenseVector::from([0.5, -0.5, 0.7]);
        assert_eq!(p.prox_g(10.0, &x).unwrap()[2], 0.7);
        assert_eq!(p.grad_h(&x).unwrap().as_slice(), &[0.5, -0.5, 0.0]);
    }
}
