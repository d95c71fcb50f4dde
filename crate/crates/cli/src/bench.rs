//! Benchmark sweeps: one CSV row per grid cell with medians over seeds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;
use snsqp::generators::BoxKind;
use snsqp::{Error, Instance, Result, SolverConfig};

use crate::generate::{generate, Dims, Family, FamilyOptions};
use crate::run::{solve_instance, InitKind};

pub const CSV_HEADER: [&str; 11] = [
    "family",
    "n",
    "d",
    "k",
    "m",
    "s",
    "seed_count",
    "relerr_median",
    "fval_median",
    "time_median_s",
    "converged_frac",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub family: Family,
    pub grid: Vec<Dims>,
    pub seeds: u64,
    /// First seed of every cell.
    #[serde(default)]
    pub seed_offset: u64,
    #[serde(default = "default_box", rename = "box")]
    pub box_kind: String,
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub init: InitKind,
    /// Overrides the generator's recommended `τ`.
    #[serde(default)]
    pub tau: Option<f64>,
    /// Remaining solver settings; `tau` and `seed` are set per run.
    #[serde(default)]
    pub config: SolverConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_box() -> String {
    "free".into()
}

impl BenchSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: BenchSpec = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse(format!("bench spec at `{}`: {}", e.path(), e.inner())))?;
        if spec.grid.is_empty() {
            return Err(Error::Parse("bench spec: grid is empty".into()));
        }
        if spec.seeds == 0 {
            return Err(Error::Parse("bench spec: seeds must be at least 1".into()));
        }
        Ok(spec)
    }
}

/// Aggregated results of one grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub s: usize,
    pub seed_count: usize,
    pub relerr_median: Option<f64>,
    pub fval_median: f64,
    pub time_median_s: f64,
    pub converged_frac: f64,
}

impl CellRow {
    fn fields(&self) -> [String; 11] {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        [
            self.family.clone(),
            self.n.to_string(),
            self.d.to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.s.to_string(),
            self.seed_count.to_string(),
            opt(self.relerr_median),
            format!("{:e}", self.fval_median),
            format!("{:e}", self.time_median_s),
            self.converged_frac.to_string(),
        ]
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { 0.5 * (values[mid - 1] + values[mid]) })
}

struct RunResult {
    relerr: Option<f64>,
    fval: f64,
    time_s: f64,
    converged: bool,
}

fn run_one(spec: &BenchSpec, dims: &Dims, opts: &FamilyOptions, seed: u64) -> Result<RunResult> {
    let bundle = generate(spec.family, dims, opts, seed)?;
    let tau = spec.tau.unwrap_or(bundle.recommended_tau);
    let inst = Instance::from(bundle);
    let config = SolverConfig { tau, seed, ..spec.config.clone() };
    let out = solve_instance(&inst, spec.init, None, &config)?;
    Ok(RunResult {
        relerr: out.metrics.relerr,
        fval: out.metrics.fval,
        time_s: out.report.wall_time_s,
        converged: out.report.converged(),
    })
}

/// Runs every (cell, seed) pair on the rayon pool and aggregates per cell.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<CellRow>> {
    let opts =
        FamilyOptions { box_kind: spec.box_kind.parse::<BoxKind>()?, snr_db: spec.snr_db.unwrap_or(f64::INFINITY) };
    let seeds: Vec<u64> = (spec.seed_offset..spec.seed_offset + spec.seeds).collect();
    let jobs: Vec<(usize, u64)> = (0..spec.grid.len()).flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let results: Vec<(usize, RunResult)> = jobs
        .par_iter()
        .map(|&(c, seed)| run_one(spec, &spec.grid[c], &opts, seed).map(|r| (c, r)))
        .collect::<Result<_>>()?;

    let rows = spec
        .grid
        .iter()
        .enumerate()
        .map(|(c, dims)| {
            let runs: Vec<&RunResult> = results.iter().filter(|(i, _)| *i == c).map(|(_, r)| r).collect();
            let mut relerr: Vec<f64> = runs.iter().filter_map(|r| r.relerr).collect();
            let mut fval: Vec<f64> = runs.iter().map(|r| r.fval).collect();
            let mut time: Vec<f64> = runs.iter().map(|r| r.time_s).collect();
            let converged = runs.iter().filter(|r| r.converged).count();
            let n = if spec.family == Family::SccaSynth { dims.n_x + dims.n_y } else { dims.n };
            let d = if spec.family == Family::SccaSynth { dims.samples } else { dims.d };
            CellRow {
                family: spec.family.label().into(),
                n,
                d,
                k: dims.k,
                m: dims.m,
                s: dims.s,
                seed_count: runs.len(),
                relerr_median: median(&mut relerr),
                fval_median: median(&mut fval).unwrap_or(f64::NAN),
                time_median_s: median(&mut time).unwrap_or(f64::NAN),
                converged_frac: converged as f64 / runs.len() as f64,
            }
        })
        .collect();
    Ok(rows)
}

pub fn write_csv(path: &Path, rows: &[CellRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
    w.write_record(CSV_HEADER).map_err(|e| Error::Parse(e.to_string()))?;
    for row in rows {
        w.write_record(row.fields()).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn markdown(rows: &[CellRow]) -> String {
    let mut out = format!("| {} |\n|{}\n", CSV_HEADER.join(" | "), "---|".repeat(CSV_HEADER.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.fields().join(" | "));
    }
    out
}

#[derive(Args)]
pub struct BenchArgs {
    /// Bench spec JSON.
    spec: PathBuf,
    /// CSV path; overrides the spec's `output`. A markdown table is written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    jobs: Option<usize>,
}

pub fn run(a: BenchArgs) -> Result<()> {
    let spec = BenchSpec::parse(&std::fs::read_to_string(&a.spec)?)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = a.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let rows = pool.install(|| run_bench(&spec))?;
    let table = markdown(&rows);
    if let Some(path) = a.output.or_else(|| spec.output.clone()) {
        write_csv(&path, &rows)?;
        std::fs::write(path.with_extension("md"), &table)?;
    }
    crate::emit(&table)
}
