//! `snsqp` command-line front end.

mod bench;
mod check;
mod generate;
mod run;
mod solve;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "snsqp", version, about = "Semismooth Newton solver for sparse QCQPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write a JSON report.
    Solve(solve::SolveArgs),
    /// Write a generated instance file.
    Generate(generate::GenerateArgs),
    /// Run a benchmark sweep described by a JSON spec.
    Bench(bench::BenchArgs),
    /// Check P-stationarity of a point.
    Check(check::CheckArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Generate(a) => generate::run(a).map(|()| 0),
        Command::Bench(a) => bench::run(a).map(|()| 0),
        Command::Check(a) => check::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Writes to standard output. A closed pipe (`snsqp solve x.json | head`) is not an error.
pub(crate) fn emit(text: &str) -> snsqp::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}
