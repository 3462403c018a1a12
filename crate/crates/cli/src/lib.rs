//! Benchmark harness behind the `dc-split` binary.
//!
//! Each subcommand validates its whole configuration, runs the independent
//! (instance, method) jobs on a worker pool and writes tables, traces and a
//! JSON summary; see [`output`] for the layout.

pub mod args;
pub mod experiment;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use args::{Cli, Command, RlsArgs, SvmArgs, TuneArgs};
use experiment::{RlsConfig, Sweep, SvmConfig, TuneConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dc_split::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for configuration (and other non-data) failures, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) if e.is_data_error() => 2,
            _ => 1,
        }
    }
}

fn single(values: &[f64], default: f64, flag: &str) -> Result<f64, CliError> {
    match values {
        [] => Ok(default),
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!("--{flag} takes a single value here"))),
    }
}

pub fn tune_config(sweep: Sweep, a: &TuneArgs) -> Result<TuneConfig, CliError> {
    let mut cfg = TuneConfig::new(sweep);
    cfg.seed = a.common.seed;
    cfg.l1_weight = a.l1_weight.unwrap_or(cfg.l1_weight);
    cfg.spd = a.spd;
    if !a.sizes.is_empty() {
        cfg.sizes = a.sizes.clone();
    }
    match sweep {
        Sweep::Theta => {
            if !a.theta.is_empty() {
                cfg.grid = a.theta.clone();
            }
            cfg.beta = single(&a.beta, cfg.beta, "beta")?;
        }
        Sweep::Beta => {
            if !a.beta.is_empty() {
                cfg.grid = a.beta.clone();
            }
            cfg.theta = single(&a.theta, cfg.theta, "theta")?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn rls_config(a: &RlsArgs) -> Result<RlsConfig, CliError> {
    let mut cfg = RlsConfig {
        seed: a.common.seed,
        ..RlsConfig::default()
    };
    if !a.sizes.is_empty() {
        cfg.sizes = a.sizes.clone();
    }
    if !a.methods.is_empty() {
        cfg.methods = a.methods.clone();
    }
    cfg.beta = a.beta.unwrap_or(cfg.beta);
    cfg.theta = a.theta.unwrap_or(cfg.theta);
    cfg.validate()?;
    Ok(cfg)
}

pub fn svm_config(a: &SvmArgs) -> Result<SvmConfig, CliError> {
    let mut cfg = SvmConfig::new(a.dataset.clone());
    cfg.seed = a.common.seed;
    cfg.label_column = a.label_col.clone();
    cfg.positive = a.positive.clone();
    cfg.undersample = a.undersample;
    if !a.splits.is_empty() {
        cfg.splits = a.splits.clone();
    }
    if !a.methods.is_empty() {
        cfg.methods = a.methods.clone();
    }
    cfg.beta = a.beta.unwrap_or(cfg.beta);
    cfg.theta = a.theta.unwrap_or(cfg.theta);
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one parsed command and returns the table files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    // everything is validated before the pool starts any work
    match &cli.command {
        Command::TuneTheta(a) | Command::TuneBeta(a) => {
            let sweep = if matches!(cli.command, Command::TuneTheta(_)) {
                Sweep::Theta
            } else {
                Sweep::Beta
            };
            let cfg = tune_config(sweep, a)?;
            let results = experiment::run_tune(&cfg, &experiment::thread_pool()?)?;
            output::write_tune(&a.common.out, &cfg, &results)
        }
        Command::RlsBench(a) => {
            let cfg = rls_config(a)?;
            let results = experiment::run_rls(&cfg, &experiment::thread_pool()?)?;
            output::write_rls(&a.common.out, &cfg, &results)
        }
        Command::SvmBench(a) => {
            let cfg = svm_config(a)?;
            let pool = experiment::thread_pool()?;
            let data = cfg.load()?;
            let results = experiment::run_svm(&cfg, &data, &pool)?;
            output::write_svm(&a.common.out, &cfg, data.provenance.clone(), &results)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
