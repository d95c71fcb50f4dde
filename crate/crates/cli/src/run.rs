//! Shared solve plumbing for `solve` and `bench`.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::Deserialize;
use snsqp::generators::{cca_initial_point, metrics, Metrics};
use snsqp::{make_initial_point, snsqp_solve, Error, InitStrategy, Instance, Point, Report, Result, SolverConfig};

/// Value of the sparse start's nonzero entries.
const SPARSE_START: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `cca` for canonical-correlation instances, `sparse` otherwise.
    #[default]
    Auto,
    Zeros,
    /// `s` random entries set to 0.1.
    Sparse,
    /// Relaxation without the sparsity constraint, truncated to `s` entries.
    Relax,
    /// Dense relaxation with unit-variance blocks (canonical-correlation instances).
    Cca,
    /// Primal vector from `--init-file`.
    File,
}

pub fn initial_point(inst: &Instance, kind: InitKind, file: Option<&PathBuf>, config: &SolverConfig) -> Result<Point> {
    let p = &inst.problem;
    let strategy = match kind {
        InitKind::Auto if inst.cca_split().is_some() => return initial_point(inst, InitKind::Cca, file, config),
        InitKind::Auto | InitKind::Sparse => InitStrategy::SparseUniform { value: SPARSE_START },
        InitKind::Zeros => InitStrategy::Zeros,
        InitKind::Relax => InitStrategy::TruncatedRelaxation,
        InitKind::Cca => {
            let split = inst
                .cca_split()
                .ok_or_else(|| Error::InvalidStrategy("cca start needs \"cca_split\" in the instance meta".into()))?;
            return cca_initial_point(p, split, config);
        }
        InitKind::File => {
            let path = file.ok_or_else(|| Error::InvalidStrategy("--init file needs --init-file".into()))?;
            let y = snsqp::point_from_str(&std::fs::read_to_string(path)?, p)?;
            InitStrategy::Given(y.x)
        }
    };
    make_initial_point(p, &strategy, config)
}

pub struct Outcome {
    pub report: Report,
    pub metrics: Metrics,
}

pub fn solve_instance(
    inst: &Instance,
    kind: InitKind,
    file: Option<&PathBuf>,
    config: &SolverConfig,
) -> Result<Outcome> {
    config.validate()?;
    let y0 = initial_point(inst, kind, file, config)?;
    let report = snsqp_solve(&inst.problem, &y0, config)?;
    let metrics =
        metrics(&report.final_point.x, inst.x_star.as_deref(), &inst.problem, report.wall_time_s, inst.cca_split())?;
    Ok(Outcome { report, metrics })
}
