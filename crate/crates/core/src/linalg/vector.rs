use std::ops::{Add, AddAssign, Deref, DerefMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real vector.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn try_new(entries: Vec<f64>) -> Result<Self> {
        let v = Self(entries);
        v.ensure_finite("vector construction")?;
        Ok(v)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    pub fn ensure_len(&self, expected: usize, context: &'static str) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::dims(context, expected, self.len()))
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s = a.mul_add(*xi, *s);
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.0.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(self.0.iter().map(|v| v * a).collect())
    }

    /// `a * x + b * y`
    pub fn lin_comb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        debug_assert_eq!(x.len(), y.len());
        Self(x.0.iter().zip(&y.0).map(|(p, q)| a * p + b * q).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for DenseVector {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Deref for DenseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Add for &DenseVector {
    type Output = DenseVector;
    fn add(self, rhs: &DenseVector) -> DenseVector {
        debug_assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect()
    }
}

impl Sub for &DenseVector {
    type Output = DenseVector;
    fn sub(self, rhs: &DenseVector) -> DenseVector {
        debug_assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect()
    }
}

impl Mul<f64> for &DenseVector {
    type Output = DenseVector;
    fn mul(self, rhs: f64) -> DenseVector {
        self.scaled(rhs)
    }
}

impl Neg for &DenseVector {
    type Output = DenseVector;
    fn neg(self) -> DenseVector {
        self.scaled(-1.0)
    }
}

impl AddAssign<&DenseVector> for DenseVector {
    fn add_assign(&mut self, rhs: &DenseVector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&DenseVector> for DenseVector {
    fn sub_assign(&mut self, rhs: &DenseVector) {
        self.axpy(-1.0, rhs);
    }
}
