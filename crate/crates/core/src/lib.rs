//! Douglas–Rachford splitting for difference-of-convex programs
//! `min p(x) = f(x) + g(x) − h(x)`, with `f`, `g` convex and proximable and
//! `h` convex with Lipschitz gradient.
//!
//! The crate provides two averaged Douglas–Rachford schemes ([`Method::DrsTheta`],
//! [`Method::DrsAlpha`]), the plain unified Douglas–Rachford baseline
//! ([`Method::Gdcp`]), DCA and a DC-adapted ADMM, together with the proximal
//! operators, problem builders, data preprocessing and metrics needed by the
//! benchmark experiments.
//!
//! ```
//! use dc_split::problems::{build_quad_l1_huber, QuadL1HuberSpec};
//! use dc_split::{solve, KappaSchedule, Method, SolverConfig, StopRule};
//!
//! let problem = build_quad_l1_huber(&QuadL1HuberSpec::new(20, 10)).unwrap();
//! let config = SolverConfig {
//!     theta: 0.5,
//!     kappa: KappaSchedule::constant(0.5).unwrap(),
//!     stop: StopRule::squared(1e-10),
//!     ..SolverConfig::default()
//! };
//! let x0 = vec![0.0; 10].into();
//! let run = solve(&problem, Method::DrsTheta, &config, &x0, None).unwrap();
//! assert!(run.trace.summary.iterations > 0);
//! ```

pub mod config;
pub mod data;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod solvers;
pub mod trace;

pub use config::{AlphaSchedule, KappaSchedule, Method, SolverConfig, StopKind, StopRule};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, RngSeed};
pub use problem::{check_assumption, evaluate_objective, AssumptionReport, Condition, DcProblem, FnProblem};
pub use solvers::{solve, RunResult};
pub use trace::{IterateState, RunTrace, TraceRow, TraceSummary};
