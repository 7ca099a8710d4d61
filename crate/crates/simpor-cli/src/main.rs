//! `simpor`: balance class-imbalanced tabular datasets from the command line.
//!
//! Subcommands cover dataset generation (`moon`), balancing (`balance`),
//! repeated-trial evaluation (`eval`), multi-method and multi-dataset
//! comparison (`benchmark`), principal-component projection with a class
//! overlap readout (`project`) and parameter sweeps (`sweep`). Every command
//! is deterministic for a fixed seed and worker-count independent.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use simpor::Error;

mod commands;
mod fileconfig;
mod options;

#[derive(Parser)]
#[command(
    name = "simpor",
    version,
    about = "Balance class-imbalanced tabular datasets",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for parallel sections. Defaults to $SIMPOR_WORKERS,
    /// then to all cores. Results do not depend on this value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an imbalanced two-moons dataset CSV.
    Moon(commands::moon::MoonArgs),
    /// Balance a CSV by synthesizing minority rows.
    Balance(commands::balance::BalanceArgs),
    /// Evaluate one balancing method over repeated train/test trials.
    Eval(commands::eval::EvalArgs),
    /// Compare balancing methods across one or more datasets.
    Benchmark(commands::benchmark::BenchmarkArgs),
    /// Project a dataset onto principal components and measure class overlap.
    Project(commands::project::ProjectArgs),
    /// Evaluate a grid of alpha or informative-portion values.
    Sweep(commands::sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> simpor::Result<()> {
    init_workers(cli.workers)?;
    match cli.command {
        Command::Moon(args) => commands::moon::run(args),
        Command::Balance(args) => commands::balance::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Benchmark(args) => commands::benchmark::run(args),
        Command::Project(args) => commands::project::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
    }
}

/// Size the global worker pool: `--workers` wins, then $SIMPOR_WORKERS,
/// otherwise rayon's default (all cores).
fn init_workers(flag: Option<usize>) -> simpor::Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("SIMPOR_WORKERS") {
            Ok(raw) => Some(raw.parse().map_err(|_| {
                Error::config(format!("SIMPOR_WORKERS must be a positive integer, got '{raw}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::config("workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

/// 0 ok, 2 bad config or usage, 3 data problem, 4 numerical failure.
/// clap's own usage errors also exit with 2.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Csv(_) => 3,
        Error::Numerical(_) => 4,
    }
}
