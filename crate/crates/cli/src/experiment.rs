//! Experiment configurations and the runs behind each subcommand.

use std::path::PathBuf;

use dc_split::data::{load_csv, standardize, train_test_split, undersample_majority, Dataset, SplitSpec};
use dc_split::linalg::{gaussian_vector, DenseVector, RngSeed};
use dc_split::metrics::ClassificationReport;
use dc_split::problems::{
    build_quad_l1_huber, build_rls_log, build_svm, predict_svm, split_params, QuadL1HuberSpec, RlsLogSpec, SvmSpec,
    DEFAULT_EPSILON, DEFAULT_HUBER_DELTA, DEFAULT_L1_WEIGHT, DEFAULT_MU,
};
use dc_split::{
    solve, AlphaSchedule, DcProblem, Error, KappaSchedule, Method, RunTrace, SolverConfig, StopRule,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

pub const TUNE_SIZES: [(usize, usize); 6] = [(100, 25), (200, 100), (300, 150), (400, 250), (600, 300), (600, 400)];
pub const THETA_GRID: [f64; 5] = [0.0005, 0.05, 0.5, 1.0, 5.0];
pub const BETA_GRID: [f64; 5] = [0.0001, 0.001, 0.1, 1.0, 10.0];
pub const RLS_SIZES: [(usize, usize); 6] = [(100, 50), (200, 128), (521, 304), (700, 500), (1000, 700), (1500, 1000)];
pub const SVM_SPLITS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

/// Start points for synthetic instances come from streams 3 and 4 of the
/// run seed; streams 1 and 2 build the instance itself.
pub fn start_points(n: usize, seed: RngSeed) -> (DenseVector, DenseVector) {
    (
        gaussian_vector(n, &mut seed.derive(3).rng()),
        gaussian_vector(n, &mut seed.derive(4).rng()),
    )
}

/// A run that blew up still yields its partial trace; anything else is fatal.
fn keep_partial(result: dc_split::Result<dc_split::RunResult>, label: &str) -> Result<(RunTrace, DenseVector), CliError> {
    match result {
        Ok(r) => Ok((r.trace, r.solution)),
        Err(Error::Interrupted { iteration, source, trace }) => {
            eprintln!("warning: {label} stopped at iteration {iteration}: {source}");
            Ok((*trace, DenseVector::zeros(0)))
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs `jobs` on the shared pool, keeping input order.
fn run_all<J: Sync, R: Send>(
    pool: &rayon::ThreadPool,
    jobs: &[J],
    f: impl Fn(&J) -> Result<R, CliError> + Sync + Send,
) -> Result<Vec<R>, CliError> {
    pool.install(|| jobs.par_iter().map(f).collect())
}

/// Worker pool capped by `DC_SPLIT_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("DC_SPLIT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("DC_SPLIT_THREADS must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

fn check_sizes(sizes: &[(usize, usize)]) -> Result<(), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Config("size list is empty".into()));
    }
    match sizes.iter().find(|(m, n)| *m == 0 || *n == 0) {
        Some((m, n)) => Err(CliError::Config(format!("sizes must be positive, got {m}x{n}"))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// tune-theta / tune-beta

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Theta,
    Beta,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theta => "theta",
            Self::Beta => "beta",
        }
    }
}

/// Parameter sweep of the θ-scheme on quadratic + L1 − Huber instances.
#[derive(Debug, Clone, Serialize)]
pub struct TuneConfig {
    pub sweep: Sweep,
    pub sizes: Vec<(usize, usize)>,
    pub grid: Vec<f64>,
    /// β while sweeping θ.
    pub beta: f64,
    /// θ while sweeping β.
    pub theta: f64,
    pub kappa: f64,
    pub delta: f64,
    pub l1_weight: f64,
    /// Build Q = GᵀG + 0.1 I instead of the raw Gaussian M×N matrix.
    pub spd: bool,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl TuneConfig {
    pub fn new(sweep: Sweep) -> Self {
        Self {
            sweep,
            sizes: TUNE_SIZES.to_vec(),
            grid: match sweep {
                Sweep::Theta => THETA_GRID.to_vec(),
                Sweep::Beta => BETA_GRID.to_vec(),
            },
            beta: 1.0,
            theta: 0.0005,
            kappa: 0.009,
            delta: DEFAULT_HUBER_DELTA,
            l1_weight: DEFAULT_L1_WEIGHT,
            spd: false,
            max_iter: 1000,
            tol: 1e-5,
            seed: 0,
        }
    }

    pub fn solver_config(&self, value: f64) -> Result<SolverConfig, CliError> {
        let (beta, theta) = match self.sweep {
            Sweep::Theta => (self.beta, value),
            Sweep::Beta => (value, self.theta),
        };
        let cfg = SolverConfig {
            beta,
            theta,
            kappa: KappaSchedule::constant(self.kappa)?,
            max_iter: self.max_iter,
            stop: StopRule::squared(self.tol),
            seed: RngSeed(self.seed),
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn instance_spec(&self, (m, n): (usize, usize)) -> QuadL1HuberSpec {
        QuadL1HuberSpec {
            delta: self.delta,
            l1_weight: self.l1_weight,
            spd: self.spd,
            ..QuadL1HuberSpec::new(m, n).with_seed(RngSeed(self.seed))
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_sizes(&self.sizes)?;
        if self.grid.is_empty() {
            return Err(CliError::Config(format!("{} grid is empty", self.sweep.name())));
        }
        for &size in &self.sizes {
            self.instance_spec(size).validate()?;
        }
        for &v in &self.grid {
            self.solver_config(v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub m: usize,
    pub n: usize,
    pub value: f64,
    pub trace: RunTrace,
}

impl TuneResult {
    pub fn id(&self, sweep: Sweep) -> String {
        format!("{}_{}_{}x{}", sweep.name(), self.value, self.m, self.n)
    }
}

pub fn run_tune(cfg: &TuneConfig, pool: &rayon::ThreadPool) -> Result<Vec<TuneResult>, CliError> {
    cfg.validate()?;
    let jobs: Vec<((usize, usize), f64)> =
        cfg.sizes.iter().flat_map(|&s| cfg.grid.iter().map(move |&v| (s, v))).collect();
    run_all(pool, &jobs, |&((m, n), value)| {
        let problem = build_quad_l1_huber(&cfg.instance_spec((m, n)))?;
        let (x0, v0) = start_points(n, RngSeed(cfg.seed));
        let label = format!("{} = {value} at {m}x{n}", cfg.sweep.name());
        let result = solve(&problem, Method::DrsTheta, &cfg.solver_config(value)?, &x0, Some(&v0));
        let (trace, _) = keep_partial(result, &label)?;
        Ok(TuneResult { m, n, value, trace })
    })
}

// ---------------------------------------------------------------------------
// rls-bench

#[derive(Debug, Clone, Serialize)]
pub struct RlsConfig {
    pub sizes: Vec<(usize, usize)>,
    #[serde(serialize_with = "method_names")]
    pub methods: Vec<Method>,
    pub beta: f64,
    pub theta: f64,
    /// `κₙ = n/(n + offset)`
    pub kappa_offset: f64,
    /// `αₙ = 1/(scale·(n + 1))`
    pub alpha_scale: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

fn method_names<S: serde::Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(methods.iter().map(Method::name))
}

impl Default for RlsConfig {
    fn default() -> Self {
        Self {
            sizes: RLS_SIZES.to_vec(),
            methods: vec![Method::DrsTheta, Method::DrsAlpha, Method::dca(), Method::Gdcp],
            beta: 0.04,
            theta: 0.9,
            kappa_offset: 10.0,
            alpha_scale: 1.0,
            mu: DEFAULT_MU,
            epsilon: DEFAULT_EPSILON,
            max_iter: 1000,
            tol: 1e-5,
            seed: 0,
        }
    }
}

impl RlsConfig {
    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            beta: self.beta,
            theta: self.theta,
            alpha: AlphaSchedule::harmonic(self.alpha_scale)?,
            kappa: KappaSchedule::ramp(self.kappa_offset)?,
            max_iter: self.max_iter,
            stop: StopRule::relative(self.tol),
            seed: RngSeed(self.seed),
            gdcp_alpha: Some(0.09),
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn instance_spec(&self, (m, n): (usize, usize)) -> RlsLogSpec {
        RlsLogSpec {
            mu: self.mu,
            epsilon: self.epsilon,
            ..RlsLogSpec::new(m, n).with_seed(RngSeed(self.seed))
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_sizes(&self.sizes)?;
        if self.methods.is_empty() {
            return Err(CliError::Config("method list is empty".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| matches!(m, Method::Admm { .. })) {
            return Err(CliError::Config(format!("rls-bench does not run {m}")));
        }
        for m in &self.methods {
            m.validate()?;
        }
        if !(self.mu >= 0.0 && self.epsilon > 0.0) {
            return Err(CliError::Config("rls-bench needs mu >= 0 and epsilon > 0".into()));
        }
        self.solver_config().map(|_| ())
    }
}

#[derive(Debug, Clone)]
pub struct RlsResult {
    pub m: usize,
    pub n: usize,
    pub method: Method,
    pub trace: RunTrace,
}

impl RlsResult {
    pub fn id(&self) -> String {
        format!("{}_{}x{}", self.method, self.m, self.n)
    }
}

pub fn run_rls(cfg: &RlsConfig, pool: &rayon::ThreadPool) -> Result<Vec<RlsResult>, CliError> {
    cfg.validate()?;
    let solver = cfg.solver_config()?;
    let jobs: Vec<((usize, usize), Method)> =
        cfg.sizes.iter().flat_map(|&s| cfg.methods.iter().map(move |&m| (s, m))).collect();
    run_all(pool, &jobs, |&((m, n), method)| {
        let problem = build_rls_log(&cfg.instance_spec((m, n)))?;
        let (x0, v0) = start_points(n, RngSeed(cfg.seed));
        let result = solve(&problem, method, &solver, &x0, Some(&v0));
        let (trace, _) = keep_partial(result, &format!("{method} at {m}x{n}"))?;
        Ok(RlsResult { m, n, method, trace })
    })
}

// ---------------------------------------------------------------------------
// svm-bench

#[derive(Debug, Clone, Serialize)]
pub struct SvmConfig {
    pub dataset: PathBuf,
    pub label_column: String,
    pub positive: String,
    pub undersample: bool,
    pub splits: Vec<f64>,
    #[serde(serialize_with = "method_names")]
    pub methods: Vec<Method>,
    pub spec: SvmSpec,
    pub beta: f64,
    pub theta: f64,
    pub kappa: f64,
    /// `αₙ = 1/(scale·(n + 1))`
    pub alpha_scale: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl SvmConfig {
    pub fn new(dataset: PathBuf) -> Self {
        Self {
            dataset,
            label_column: "class".into(),
            positive: "1".into(),
            undersample: false,
            splits: SVM_SPLITS.to_vec(),
            methods: vec![Method::admm(), Method::DrsTheta, Method::DrsAlpha, Method::dca(), Method::Gdcp],
            spec: SvmSpec::default(),
            beta: 0.001,
            theta: 0.01,
            kappa: 0.3,
            alpha_scale: 10.0,
            max_iter: 2000,
            tol: 1e-4,
            seed: 0,
        }
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            beta: self.beta,
            theta: self.theta,
            alpha: AlphaSchedule::harmonic(self.alpha_scale)?,
            kappa: KappaSchedule::constant(self.kappa)?,
            max_iter: self.max_iter,
            stop: StopRule::absolute(self.tol),
            seed: RngSeed(self.seed),
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.splits.is_empty() {
            return Err(CliError::Config("split list is empty".into()));
        }
        if let Some(s) = self.splits.iter().find(|s| !SVM_SPLITS.contains(s)) {
            return Err(CliError::Config(format!("test fraction {s} is not one of 0.1, 0.2, 0.3, 0.4")));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("method list is empty".into()));
        }
        for m in &self.methods {
            m.validate()?;
        }
        if !(self.spec.c >= 0.0 && self.spec.lambda >= 0.0) {
            return Err(CliError::Config("C and lambda must be >= 0".into()));
        }
        self.solver_config().map(|_| ())
    }

    /// Loads the dataset and applies the optional undersampling stage.
    pub fn load(&self) -> Result<Dataset, CliError> {
        let data = load_csv(&self.dataset, &self.label_column, &self.positive)?;
        if self.undersample {
            Ok(undersample_majority(&data, RngSeed(self.seed).derive(6))?)
        } else {
            Ok(data)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SvmResult {
    pub split: f64,
    pub method: Method,
    pub report: ClassificationReport,
    pub trace: RunTrace,
}

impl SvmResult {
    pub fn id(&self) -> String {
        format!("{}_split{}", self.method, split_percent(self.split))
    }

    pub fn converged(&self) -> bool {
        self.trace.summary.converged
    }
}

pub fn split_percent(split: f64) -> u32 {
    (split * 100.0).round() as u32
}

/// Train/test split, standardization with training statistics and one run
/// per method from the zero start, evaluated on the test part.
pub fn run_svm(cfg: &SvmConfig, data: &Dataset, pool: &rayon::ThreadPool) -> Result<Vec<SvmResult>, CliError> {
    cfg.validate()?;
    let solver = cfg.solver_config()?;
    let mut prepared = Vec::new();
    for &split in &cfg.splits {
        let (train, test) = train_test_split(data, &SplitSpec::new(split, RngSeed(cfg.seed).derive(5)))?;
        let (train, test) = standardize(&train, &test)?;
        if train.class_counts().0 == 0 || train.class_counts().1 == 0 {
            return Err(Error::SingleClass.into());
        }
        prepared.push((split, train, test));
    }
    let jobs: Vec<(usize, Method)> =
        (0..prepared.len()).flat_map(|k| cfg.methods.iter().map(move |&m| (k, m))).collect();
    run_all(pool, &jobs, |&(k, method)| {
        let (split, train, test) = &prepared[k];
        let problem = build_svm(&cfg.spec, train)?;
        let x0 = DenseVector::zeros(problem.dim());
        let result = solve(&problem, method, &solver, &x0, None);
        let (trace, solution) = keep_partial(result, &format!("{method} at split {split}"))?;
        let (w, b) = if solution.is_empty() {
            (DenseVector::zeros(problem.dim() - 1), 0.0)
        } else {
            split_params(&solution)
        };
        let pred = predict_svm(&w, b, &test.x)?;
        let s = &trace.summary;
        let report = ClassificationReport::new(&test.y, &pred, s.total_seconds, s.iterations)?;
        Ok(SvmResult {
            split: *split,
            method,
            report,
            trace,
        })
    })
}
