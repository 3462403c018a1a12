use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dc_split::Method;

/// `MxN`, e.g. `200x100`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got '{s}'"))?;
    let dim = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad dimension '{t}' in '{s}'"));
    Ok((dim(m)?, dim(n)?))
}

#[derive(Debug, Parser)]
#[command(name = "dc-split", version, about = "Douglas-Rachford splitting benchmarks for DC programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep θ on quadratic + L1 - Huber instances.
    TuneTheta(TuneArgs),
    /// Sweep β on quadratic + L1 - Huber instances.
    TuneBeta(TuneArgs),
    /// Compare methods on regularized least squares with the log penalty.
    RlsBench(RlsArgs),
    /// Train L1-regularized linear SVMs on a labelled CSV dataset.
    SvmBench(SvmArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    /// Instance sizes as MxN.
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub sizes: Vec<(usize, usize)>,
    /// β values; the grid for tune-beta, a single fixed value for tune-theta.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// θ values; the grid for tune-theta, a single fixed value for tune-beta.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
    /// Weight of the ℓ₁ term.
    #[arg(long)]
    pub l1_weight: Option<f64>,
    /// Use the symmetric positive definite Q = GᵀG + 0.1 I (N×N).
    #[arg(long)]
    pub spd: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RlsArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub sizes: Vec<(usize, usize)>,
    /// Subset of drs-theta, drs-alpha, dca, gdcp.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SvmArgs {
    /// Headed CSV file.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "class")]
    pub label_col: String,
    /// Label value mapped to +1; every other value becomes -1.
    #[arg(long, default_value = "1")]
    pub positive: String,
    /// Balance classes by subsampling the majority class first.
    #[arg(long)]
    pub undersample: bool,
    /// Test fractions, each one of 0.1, 0.2, 0.3, 0.4.
    #[arg(long, value_delimiter = ',')]
    pub splits: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}
