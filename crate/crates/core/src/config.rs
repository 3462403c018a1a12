//! Solver configuration: methods, parameter schedules and stopping rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, RngSeed};

/// Relaxation sequence `κₙ`, evaluated from `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KappaSchedule {
    Constant { value: f64 },
    /// `κₙ = n / (n + offset)`
    Ramp { offset: f64 },
}

impl KappaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        let s = Self::Constant { value };
        s.validate()?;
        Ok(s)
    }

    pub fn ramp(offset: f64) -> Result<Self> {
        let s = Self::Ramp { offset };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("kappa schedule {self:?} leaves (0, 2)")))
        }
    }

    /// Every value lies in `(0, 2)` and stays bounded away from both ends.
    pub fn is_admissible(&self) -> bool {
        match *self {
            Self::Constant { value } => value > 0.0 && value < 2.0,
            Self::Ramp { offset } => offset >= 0.0 && offset.is_finite(),
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match *self {
            Self::Constant { value } => value,
            Self::Ramp { offset } => n as f64 / (n as f64 + offset),
        }
    }
}

impl Default for KappaSchedule {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

/// Averaging sequence `αₙ ∈ [0, 1)`, evaluated from `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlphaSchedule {
    Constant { value: f64 },
    /// `αₙ = 1 / (scale · (n + 1))`
    Harmonic { scale: f64 },
}

impl AlphaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        let s = Self::Constant { value };
        s.validate()?;
        Ok(s)
    }

    pub fn harmonic(scale: f64) -> Result<Self> {
        let s = Self::Harmonic { scale };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Constant { value } => (0.0..1.0).contains(&value),
            // largest value is 1/(2·scale) at n = 1
            Self::Harmonic { scale } => scale > 0.5 && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("alpha schedule {self:?} leaves [0, 1)")))
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match *self {
            Self::Constant { value } => value,
            Self::Harmonic { scale } => 1.0 / (scale * (n as f64 + 1.0)),
        }
    }
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        Self::Constant { value: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopKind {
    /// `‖x⁺ − x‖²`
    Squared,
    /// `‖x⁺ − x‖ / max(1, ‖x⁺‖)`
    Relative,
    /// `‖x⁺ − x‖`
    Absolute,
}

/// Stop once the selected step measure drops strictly below `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub kind: StopKind,
    pub tol: f64,
}

impl StopRule {
    pub fn squared(tol: f64) -> Self {
        Self {
            kind: StopKind::Squared,
            tol,
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            kind: StopKind::Relative,
            tol,
        }
    }

    pub fn absolute(tol: f64) -> Self {
        Self {
            kind: StopKind::Absolute,
            tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("stopping tolerance must be > 0, got {}", self.tol)))
        }
    }

    pub fn measure(&self, x_new: &DenseVector, x_old: &DenseVector) -> f64 {
        let d = x_new.dist(x_old);
        match self.kind {
            StopKind::Squared => d * d,
            StopKind::Relative => d / x_new.norm().max(1.0),
            StopKind::Absolute => d,
        }
    }

    pub fn is_met(&self, err: f64) -> bool {
        err < self.tol
    }
}

impl Default for StopRule {
    fn default() -> Self {
        Self::relative(1e-5)
    }
}

pub const DEFAULT_DCA_INNER_BUDGET: usize = 500;
pub const DEFAULT_DCA_INNER_TOL: f64 = 1e-8;
pub const DEFAULT_ADMM_PENALTY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Averaged Douglas–Rachford with fixed weight `θ`.
    DrsTheta,
    /// Averaged Douglas–Rachford with the `αₙ` sequence.
    DrsAlpha,
    /// Unified Douglas–Rachford baseline.
    Gdcp,
    /// DCA; each convex subproblem is solved by an inner Douglas–Rachford loop.
    Dca { inner_budget: usize, inner_tol: f64 },
    /// Two-block ADMM with `h` linearized at the current x-block.
    Admm { penalty: f64 },
}

impl Method {
    pub const ALL: [&'static str; 5] = ["drs-theta", "drs-alpha", "gdcp", "dca", "admm"];

    pub fn dca() -> Self {
        Self::Dca {
            inner_budget: DEFAULT_DCA_INNER_BUDGET,
            inner_tol: DEFAULT_DCA_INNER_TOL,
        }
    }

    pub fn admm() -> Self {
        Self::Admm {
            penalty: DEFAULT_ADMM_PENALTY,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::DrsTheta => "drs-theta",
            Self::DrsAlpha => "drs-alpha",
            Self::Gdcp => "gdcp",
            Self::Dca { .. } => "dca",
            Self::Admm { .. } => "admm",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Dca { inner_budget, inner_tol } if inner_budget == 0 || !(inner_tol > 0.0) => Err(
                Error::InvalidConfig("DCA needs a positive inner budget and tolerance".into()),
            ),
            Self::Admm { penalty } if !(penalty > 0.0 && penalty.is_finite()) => {
                Err(Error::InvalidConfig(format!("ADMM penalty must be > 0, got {penalty}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "drs-theta" | "theta" | "alg1" => Ok(Self::DrsTheta),
            "drs-alpha" | "alpha" | "alg2" => Ok(Self::DrsAlpha),
            "gdcp" => Ok(Self::Gdcp),
            "dca" => Ok(Self::dca()),
            "admm" => Ok(Self::admm()),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}', expected one of {}",
                Method::ALL.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub beta: f64,
    /// Averaging weight of the θ-scheme.
    pub theta: f64,
    /// Averaging sequence of the α-scheme.
    pub alpha: AlphaSchedule,
    pub kappa: KappaSchedule,
    pub max_iter: usize,
    pub stop: StopRule,
    pub seed: RngSeed,
    /// Evaluate `p` at every iterate for the trace.
    pub track_objective: bool,
    /// Keep every `(xₙ, vₙ)` for post-hoc Lyapunov monitoring.
    pub record_path: bool,
    /// Accepted for parity with published settings; the baseline has no α
    /// parameter and ignores it.
    pub gdcp_alpha: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            theta: 0.0,
            alpha: AlphaSchedule::default(),
            kappa: KappaSchedule::default(),
            max_iter: 1000,
            stop: StopRule::default(),
            seed: RngSeed(0),
            track_objective: false,
            record_path: false,
            gdcp_alpha: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidConfig(format!("theta must be >= 0, got {}", self.theta)));
        }
        self.alpha.validate()?;
        self.kappa.validate()?;
        self.stop.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_bounds() {
        assert!(KappaSchedule::constant(0.0).is_err());
        assert!(KappaSchedule::constant(2.0).is_err());
        assert!(KappaSchedule::constant(1.99).is_ok());
        let r = KappaSchedule::ramp(10.0).unwrap();
        assert!((r.value(1) - 1.0 / 11.0).abs() < 1e-15);
        assert!(r.value(1) > 0.0);
        assert!(KappaSchedule::ramp(-1.0).is_err());
    }

    #[test]
    fn alpha_bounds() {
        assert!(AlphaSchedule::constant(1.0).is_err());
        assert!(AlphaSchedule::constant(-0.1).is_err());
        let h = AlphaSchedule::harmonic(10.0).unwrap();
        assert!((h.value(1) - 0.05).abs() < 1e-15);
        assert!((AlphaSchedule::harmonic(1.0).unwrap().value(3) - 0.25).abs() < 1e-15);
        assert!(AlphaSchedule::harmonic(0.5).is_err());
    }

    #[test]
    fn stop_rule_measures() {
        let a = DenseVector::from([3.0, 4.0]);
        for rule in [StopRule::squared(1.0), StopRule::relative(1.0), StopRule::absolute(1.0)] {
            assert_eq!(rule.measure(&a, &a), 0.0);
        }
        let new = DenseVector::from([6.0, 8.0]);
        let old = DenseVector::from([6.0, 8.5]);
        assert!((StopRule::relative(1.0).measure(&new, &old) - 0.05).abs() < 1e-15);
        let sq = StopRule::squared(1.0).measure(&new, &old);
        let ab = StopRule::absolute(1.0).measure(&new, &old);
        assert!((sq - ab * ab).abs() < 1e-15);
        assert!(!StopRule::squared(1e-5).is_met(1e-5));
        assert!(StopRule::squared(0.0).validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for name in Method::ALL {
            assert_eq!(name.parse::<Method>().unwrap().name(), name);
        }
        assert!("newton".parse::<Method>().is_err());
        assert!(Method::Admm { penalty: 0.0 }.validate().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            beta: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            theta: -1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
