use std::path::PathBuf;

use clap::Args;
use snsqp::{read_instance, Error, Result, SolveStatus, SolverConfig};

use crate::run::{solve_instance, InitKind};

#[derive(Args)]
pub struct SolveArgs {
    /// Instance JSON file.
    input: PathBuf,
    /// Defaults to the instance's recommended value, else 1.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 0.45)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = InitKind::Auto)]
    init: InitKind,
    /// Start point for `--init file`.
    #[arg(long)]
    init_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep negative multipliers instead of resetting them to zero after each step.
    #[arg(long)]
    no_clamp: bool,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn run(a: SolveArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let config = SolverConfig {
        tau: a.tau.or(inst.recommended_tau()).unwrap_or(1.0),
        eps: a.eps,
        max_iter: a.max_iter,
        rho: a.rho,
        sigma: a.sigma,
        seed: a.seed,
        clamp_multipliers: !a.no_clamp,
        ..SolverConfig::default()
    };
    let out = solve_instance(&inst, a.init, a.init_file.as_ref(), &config)?;
    let mut json = serde_json::to_value(&out.report).map_err(|e| Error::Parse(e.to_string()))?;
    json["metrics"] = serde_json::to_value(&out.metrics).map_err(|e| Error::Parse(e.to_string()))?;
    let text = serde_json::to_string_pretty(&json).map_err(|e| Error::Parse(e.to_string()))?;
    match &a.output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => crate::emit(&(text + "\n"))?,
    }
    log::info!(
        "{:?} after {} iterations, residual {:e}",
        out.report.status,
        out.report.iterations,
        out.report.final_residual()
    );
    Ok(match out.report.status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIterations | SolveStatus::Stalled => 2,
    })
}
