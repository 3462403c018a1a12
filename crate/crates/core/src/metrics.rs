//! Classification metrics on ±1 labels and step-size error measures.

use serde::Serialize;

use crate::config::StopRule;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;

fn check(y_true: &[f64], y_pred: &[f64], what: &'static str) -> Result<()> {
    if y_true.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::dims(what, y_true.len(), y_pred.len()));
    }
    Ok(())
}

/// Fraction of matching labels.
pub fn accuracy(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check(y_true, y_pred, "accuracy")?;
    let hits = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Precision of the +1 class together with a flag set when there are no
/// positive predictions. In that case the value is 1.0 by convention.
pub fn precision_with_flag(y_true: &[f64], y_pred: &[f64]) -> Result<(f64, bool)> {
    check(y_true, y_pred, "precision")?;
    let (mut tp, mut fp) = (0usize, 0usize);
    for (t, p) in y_true.iter().zip(y_pred) {
        if *p > 0.0 {
            if *t > 0.0 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    if tp + fp == 0 {
        Ok((1.0, true))
    } else {
        Ok((tp as f64 / (tp + fp) as f64, false))
    }
}

/// `TP / (TP + FP)`; 1.0 when nothing is predicted positive.
pub fn precision(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    precision_with_flag(y_true, y_pred).map(|(p, _)| p)
}

pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check(y_true, y_pred, "mae")?;
    Ok(y_true.iter().zip(y_pred).map(|(t, p)| (t - p).abs()).sum::<f64>() / y_true.len() as f64)
}

pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check(y_true, y_pred, "mse")?;
    Ok(y_true.iter().zip(y_pred).map(|(t, p)| (t - p).powi(2)).sum::<f64>() / y_true.len() as f64)
}

pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    mse(y_true, y_pred).map(f64::sqrt)
}

/// The stop rule's step measure between successive iterates.
pub fn err_measure(rule: &StopRule, x_new: &DenseVector, x_old: &DenseVector) -> Result<f64> {
    x_old.ensure_len(x_new.len(), "err_measure")?;
    Ok(rule.measure(x_new, x_old))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub precision: f64,
    /// Set when precision fell back to 1.0 for lack of positive predictions.
    pub precision_degenerate: bool,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub time_seconds: f64,
    pub iterations: usize,
}

impl ClassificationReport {
    pub fn new(y_true: &[f64], y_pred: &[f64], time_seconds: f64, iterations: usize) -> Result<Self> {
        let (precision, precision_degenerate) = precision_with_flag(y_true, y_pred)?;
        let mse = mse(y_true, y_pred)?;
        Ok(Self {
            accuracy: accuracy(y_true, y_pred)?,
            precision,
            precision_degenerate,
            mae: mae(y_true, y_pred)?,
            mse,
            rmse: mse.sqrt(),
            time_seconds,
            iterations,
        })
    }

    /// Largest violation of `mae = 2(1 − acc)`, `mse = 2·mae`, `rmse² = mse`,
    /// which hold exactly for ±1 labels.
    pub fn identity_defect(&self) -> f64 {
        [
            (self.mae - 2.0 * (1.0 - self.accuracy)).abs(),
            (self.mse - 2.0 * self.mae).abs(),
            (self.rmse - self.mse.sqrt()).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
