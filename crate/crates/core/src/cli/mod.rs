use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mtkcs::checks::DEFAULT_SEED;
use mtkcs::radial::{DEFAULT_GRADING, DEFAULT_NODE_COUNT};

pub mod commands;

#[derive(Debug, Parser)]
#[command(name = "mtkcs", version, about = "Sharp exponential inequalities and Kirchhoff-Choquard ground states")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Primary output file (stdout when absent).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every sharp constant for one parameter set.
    Constants(ConstantsArgs),
    /// Sweep the exponential functional along the Moser pair sequence.
    Blowup(BlowupArgs),
    /// Run a seeded randomized suite.
    Check(CheckArgs),
    /// Compute a ground state and its certificates.
    Solve(SolveArgs),
    /// Energy along the ray through the initial bump pair.
    RayProfile(RayArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_NODE_COUNT)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_GRADING)]
    pub grading: f64,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Riesz exponent; adds the HLS constant.
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BlowupArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Relative excess over the threshold.
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true, conflicts_with = "theta_factor")]
    pub epsilon: f64,
    /// Coefficient as a multiple of the threshold (overrides --epsilon).
    #[arg(long)]
    pub theta_factor: Option<f64>,
    /// Comma-separated concentration parameters.
    #[arg(long, value_delimiter = ',', default_values_t = [4u64, 8, 16, 32, 64, 128, 256])]
    pub ks: Vec<u64>,
    /// Support radius of the Moser functions (the ball radius when absent).
    #[arg(long)]
    pub rho: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// One of holder, young, scaling, hls, lions.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub d1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Power of the nonlinearity (chosen from the Kirchhoff model when absent).
    #[arg(long)]
    pub a: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Directory for cached Riesz matrices.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub nehari_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Number of random test pairs in the residual certificate.
    #[arg(long, default_value_t = 50)]
    pub tests: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Where to write the JSON run report (stderr when absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RayArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 4.0)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 41)]
    pub xi_count: usize,
}
