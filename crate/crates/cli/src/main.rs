//! `pbcdcl`: solve OPB instances, run benchmark suites and aggregate their results.

mod bench;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "pbcdcl", version, about = "Pseudo-Boolean CDCL solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one OPB instance and print competition output.
    Solve(solve::SolveArgs),
    /// Run every configuration on every instance of a directory.
    Bench(bench::BenchArgs),
    /// Combine result CSVs into Virtual Best Solver and cactus data.
    Vbs(bench::VbsArgs),
    /// Exhaustive reference answer for small instances.
    #[command(hide = true)]
    Oracle { instance: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve::run(&args),
        Command::Bench(args) => bench::run_suite(&args).map(|_| 0),
        Command::Vbs(args) => bench::run_vbs(&args).map(|_| 0),
        Command::Oracle { instance } => solve::run_oracle(&instance),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
