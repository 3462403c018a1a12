//! Builders for the benchmark models.

mod quad;
mod rls;
mod svm;

pub use quad::{build_quad_l1_huber, QuadL1Huber, QuadL1HuberSpec, DEFAULT_HUBER_DELTA, DEFAULT_L1_WEIGHT};
pub use rls::{build_rls_log, RlsLog, RlsLogSpec, DEFAULT_EPSILON, DEFAULT_MU};
pub use svm::{build_svm, predict_svm, split_params, SvmProblem, SvmSpec};
