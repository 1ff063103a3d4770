//! `logpool`: combine expert Beta opinions by logarithmic pooling.
//!
//! Subcommands: `pool` (explicit or equal weights), `optimize` (maximum
//! entropy or minimum KL weights), `hier` (Dirichlet prior on the weights
//! with MCMC) and `report` (all methods side by side plus plot-ready CSVs).
//!
//! Exit codes: 0 success, 2 malformed input, 3 numerical or diagnostic
//! failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use logpool::{commands, CliError, HierArgs, OptimizeArgs, PoolArgs, ReportArgs};

#[derive(Parser)]
#[command(
    name = "logpool",
    version,
    about = "Logarithmic pooling of expert Beta opinions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pool the experts with explicit or equal weights.
    Pool(PoolArgs),
    /// Choose weights by maximum entropy or minimum KL divergence.
    Optimize(OptimizeArgs),
    /// Hierarchical Dirichlet prior on the weights, sampled by MCMC.
    Hier(HierArgs),
    /// Run every method and emit tables plus density CSVs.
    Report(ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pool(args) => commands::cmd_pool(args),
        Command::Optimize(args) => commands::cmd_optimize(args),
        Command::Hier(args) => commands::cmd_hier(args),
        Command::Report(args) => commands::cmd_report(args),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
