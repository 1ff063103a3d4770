//! Library surface of the `logpool` command-line tool: argument types,
//! subcommand implementations, input parsing and report rendering.

use std::path::PathBuf;

use clap::Args;

pub mod commands;
pub mod input;
pub mod report;

#[derive(Debug)]
pub enum CliError {
    /// Bad input file or flags: exit code 2.
    Input(String),
    /// Numerical or chain-diagnostic failure: exit code 3.
    Numeric(String),
}

#[derive(Args)]
pub struct PoolArgs {
    /// Pool file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated weights, or "equal".
    #[arg(long, default_value = "equal")]
    pub weights: String,
    /// Write an N-row density CSV (theta,prior,posterior).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Path of the density CSV written with --grid.
    #[arg(long, default_value = "density.csv")]
    pub csv: PathBuf,
    /// Significant digits in all printed numbers.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Recompute every reported scalar and fail on mismatch.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Objective: "entropy" or "kl".
    #[arg(long)]
    pub method: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local-search restarts from random simplex points.
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct HierArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Total MCMC iterations including burn-in.
    #[arg(long, default_value_t = 200_000)]
    pub iterations: usize,
    #[arg(long = "burn-in", default_value_t = 20_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    /// Step multiplier on the prior-scaled proposal.
    #[arg(long = "proposal-scale", default_value_t = 0.3)]
    pub proposal_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dump thinned weight draws to this CSV.
    #[arg(long)]
    pub draws: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200_000)]
    pub iterations: usize,
    #[arg(long = "burn-in", default_value_t = 20_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    /// Rows in each density CSV.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Directory for the CSV bundle.
    #[arg(long = "out-dir", default_value = "logpool_report")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}
