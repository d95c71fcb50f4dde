use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use snsqp::generators::{
    gen_recovery_qcqp, gen_recovery_simplex, gen_scca_synthetic, gen_sps_synthetic, BoxKind, InstanceBundle,
};
use snsqp::{instance_to_string, Error, Instance, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RecoverySimplex,
    RecoveryQcqp,
    SccaSynth,
    SpsSynth,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::RecoverySimplex => "recovery-simplex",
            Family::RecoveryQcqp => "recovery-qcqp",
            Family::SccaSynth => "scca-synth",
            Family::SpsSynth => "sps-synth",
        }
    }
}

/// Dimensions of one generated instance. Unused fields are ignored by a family.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub d: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub m: usize,
    pub s: usize,
    #[serde(default)]
    pub n_x: usize,
    #[serde(default)]
    pub n_y: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    50
}

pub struct FamilyOptions {
    pub box_kind: BoxKind,
    pub snr_db: f64,
}

pub fn generate(family: Family, dims: &Dims, opts: &FamilyOptions, seed: u64) -> Result<InstanceBundle> {
    match family {
        Family::RecoverySimplex => gen_recovery_simplex(dims.n, dims.d, dims.s, opts.snr_db, seed),
        Family::RecoveryQcqp => gen_recovery_qcqp(dims.n, dims.d, dims.k, dims.m, dims.s, opts.box_kind, seed),
        Family::SccaSynth => gen_scca_synthetic(dims.n_x, dims.n_y, dims.samples, dims.s, seed),
        Family::SpsSynth => gen_sps_synthetic(dims.n, dims.s, seed),
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Rows of the measurement matrix (recovery families).
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Quadratic constraints (recovery-qcqp).
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Linear inequalities (recovery-qcqp).
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long)]
    s: usize,
    /// Box of recovery-qcqp: free, box22 or nonneg.
    #[arg(long = "box", default_value = "free")]
    box_kind: String,
    /// Target SNR of recovery-simplex in dB; noiseless when absent.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    n_x: usize,
    #[arg(long, default_value_t = 0)]
    n_y: usize,
    /// Samples of scca-synth.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: PathBuf,
}

pub fn run(a: GenerateArgs) -> Result<()> {
    let dims = Dims { n: a.n, d: a.d, k: a.k, m: a.m, s: a.s, n_x: a.n_x, n_y: a.n_y, samples: a.samples };
    let opts = FamilyOptions { box_kind: a.box_kind.parse()?, snr_db: a.snr_db.unwrap_or(f64::INFINITY) };
    let bundle = generate(a.family, &dims, &opts, a.seed)?;
    let text = instance_to_string(&Instance::from(bundle))?;
    std::fs::write(&a.output, text).map_err(Error::from)
}
