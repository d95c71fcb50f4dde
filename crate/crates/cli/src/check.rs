use std::path::PathBuf;

use clap::Args;
use snsqp::{point_from_str, read_instance, verify_p_stationarity, Result};

#[derive(Args)]
pub struct CheckArgs {
    /// Instance JSON file.
    input: PathBuf,
    /// Point file: an array of `n` reals, a point object, or a solve report.
    point: PathBuf,
    /// Defaults to the instance's recommended value, else 1.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

pub fn run(a: CheckArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let y = point_from_str(&std::fs::read_to_string(&a.point)?, &inst.problem)?;
    let tau = a.tau.or(inst.recommended_tau()).unwrap_or(1.0);
    let report = verify_p_stationarity(&inst.problem, &y, tau, a.tol);
    crate::emit(&format!(
        "{}: {} (worst {:e}, tau {tau}, tol {:e})\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.which,
        report.worst_violation,
        a.tol
    ))?;
    Ok(if report.pass { 0 } else { 1 })
}
