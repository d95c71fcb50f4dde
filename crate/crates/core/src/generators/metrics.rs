//! Reported quality measures.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::problem::{eval_objective, l0_norm, SqcqpProblem};

/// Non-finite values are written as the strings `"inf"`, `"-inf"` and `"nan"`.
fn ser_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ser_opt_real<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_real(v, s),
        None => s.serialize_none(),
    }
}

/// Canonical-correlation quality of `w = (wˣ, wʸ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CcaMetrics {
    /// `⟨wˣ, Σˣʸwʸ⟩ / √(⟨wˣ, Σˣˣwˣ⟩⟨wʸ, Σʸʸwʸ⟩)`, or 0 when either variance vanishes.
    pub correlation: f64,
    /// Fraction of zero entries in `wˣ`.
    pub rho_x: f64,
    pub rho_y: f64,
    /// `|⟨wˣ, Σˣˣwˣ⟩ − 1|`.
    pub voc_x: f64,
    pub voc_y: f64,
    pub nnz_x: usize,
    pub nnz_y: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(serialize_with = "ser_opt_real")]
    pub relerr: Option<f64>,
    /// In dB; `+∞` when `x = x*`.
    #[serde(serialize_with = "ser_opt_real")]
    pub rsnr: Option<f64>,
    #[serde(serialize_with = "ser_real")]
    pub fval: f64,
    pub nnz: usize,
    /// Largest violation over the quadratic, linear, equality and box constraints.
    #[serde(serialize_with = "ser_real")]
    pub max_violation: f64,
    pub solve_time_s: f64,
    pub cca: Option<CcaMetrics>,
}

/// `‖x − x*‖ / ‖x*‖`.
pub fn relerr(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_len(x, x_star)?;
    let den = norm2(x_star);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("x* is zero".into()));
    }
    Ok(diff_norm(x, x_star) / den)
}

/// `10·log₁₀(‖x*‖² / ‖x − x*‖²)`; `+∞` when the two coincide.
pub fn rsnr(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_len(x, x_star)?;
    let err = diff_norm(x, x_star);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let sig = norm2(x_star);
    Ok(20.0 * (sig / err).log10())
}

fn diff_norm(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("x has {} entries, x* has {}", x.len(), y.len())));
    }
    Ok(())
}

/// Metrics of `x` on a canonical-correlation instance whose first `split` variables
/// form `wˣ`. The covariances are read back from the stored quadratic forms.
pub fn cca_metrics(p: &SqcqpProblem<f64>, x: &[f64], split: usize) -> Result<CcaMetrics> {
    p.check_x(x)?;
    if p.k() != 1 || split == 0 || split >= p.n() {
        return Err(Error::UnsupportedCase(format!(
            "not a canonical-correlation instance (k = {}, split = {split}, n = {})",
            p.k(),
            p.n()
        )));
    }
    let (wx, wy) = x.split_at(split);
    let q0 = p.objective().q_mat();
    let q1 = p.quad_constraints()[0].q_mat();
    // The stored forms are −2Σˣʸ off the diagonal blocks and 2Σ on them.
    let mut cross = 0.0;
    for (i, &a) in wx.iter().enumerate().filter(|(_, a)| **a != 0.0) {
        for (j, &b) in wy.iter().enumerate().filter(|(_, b)| **b != 0.0) {
            cross += a * q0[(i, split + j)] * b;
        }
    }
    cross *= -0.5;
    let block_var = |w: &[f64], off: usize| {
        let nz: Vec<(usize, f64)> = w.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect();
        let mut acc = 0.0;
        for &(i, a) in &nz {
            for &(j, b) in &nz {
                acc += a * q1[(off + i, off + j)] * b;
            }
        }
        0.5 * acc
    };
    let (vx, vy) = (block_var(wx, 0), block_var(wy, split));
    let den = (vx * vy).sqrt();
    let correlation = if den > 0.0 { cross / den } else { 0.0 };
    let (nnz_x, nnz_y) = (l0_norm(wx), l0_norm(wy));
    Ok(CcaMetrics {
        correlation,
        rho_x: (wx.len() - nnz_x) as f64 / wx.len() as f64,
        rho_y: (wy.len() - nnz_y) as f64 / wy.len() as f64,
        voc_x: (vx - 1.0).abs(),
        voc_y: (vy - 1.0).abs(),
        nnz_x,
        nnz_y,
    })
}

/// All metrics of `x`. Relerr and RSNR are present only with a ground truth, the
/// correlation block only when `cca_split` is given.
pub fn metrics(
    x: &[f64],
    x_star: Option<&[f64]>,
    p: &SqcqpProblem<f64>,
    solve_time_s: f64,
    cca_split: Option<usize>,
) -> Result<Metrics> {
    let fval = eval_objective(p, x)?;
    let (relerr, rsnr) = match x_star {
        Some(xs) => (Some(relerr(x, xs)?), Some(rsnr(x, xs)?)),
        None => (None, None),
    };
    let cca = cca_split.map(|split| cca_metrics(p, x, split)).transpose()?;
    Ok(Metrics { relerr, rsnr, fval, nnz: l0_norm(x), max_violation: p.max_violation(x), solve_time_s, cca })
}

/// Relerr against a missing ground truth.
pub fn require_ground_truth(x_star: Option<&[f64]>) -> Result<&[f64]> {
    x_star.ok_or(Error::MissingGroundTruth)
}
