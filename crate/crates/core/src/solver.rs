//! The semismooth Newton iteration: support selection, reduced Newton step with a
//! regularized fallback, Armijo backtracking on `Ψ = ½‖F‖²`, and stopping rules.

use std::time::Instant;

use log::{debug, trace};
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::jacobian::{apply_w_with, assemble_g_unchecked, JacobianBlocks, Layout};
use crate::linalg::{dot, norm2, LuFactor, Matrix};
use crate::problem::{l0_norm, nonzeros, PrimalDualPoint, SqcqpProblem};
use crate::projection::{scores_from_gradient, top_s_indices, SupportSet};
use crate::scalar::Scalar;
use crate::stationary::{assemble_f_unchecked, check_support, ResidualVector};

/// Consecutive rejected line searches before giving up.
const MAX_CONSECUTIVE_REJECTIONS: usize = 5;
/// Window (in iterations) over which `‖F‖` must improve.
const STALL_WINDOW: usize = 20;
const STALL_REL_IMPROVEMENT: f64 = 1e-16;

/// Newton direction split as `(d_T̄ = −x_T̄, d_J = −ν_T̄, d_K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonDirection<T> {
    pub support: SupportSet,
    /// `−x_T̄`, over `T̄` in ascending order.
    pub d_xcomp: Vec<T>,
    /// `−ν_T̄`.
    pub d_nucomp: Vec<T>,
    /// Reduced block `(x_T, μ, λ, ν_T, ζ)`.
    pub d_k: Vec<T>,
    pub used_fallback: bool,
    /// Regularization used by the fallback solve, zero for a direct solve.
    pub kappa: T,
}

impl<T: Scalar> NewtonDirection<T> {
    /// Direction in the `(x_T; x_T̄; ν_T; ν_T̄; μ; λ; ζ)` layout of [`crate::jacobian::apply_w`].
    pub fn flattened(&self, p: &SqcqpProblem<T>) -> Vec<T> {
        let lay = Layout::of(p);
        let dk = &self.d_k;
        [
            &dk[..lay.s],
            &self.d_xcomp[..],
            &dk[lay.nu()..lay.nu() + lay.s],
            &self.d_nucomp[..],
            &dk[lay.mu()..lay.lambda()],
            &dk[lay.lambda()..lay.nu()],
            &dk[lay.zeta()..],
        ]
        .concat()
    }
}

/// Solves `G d = rhs` directly, falling back to `(GᵀG + κI) d = Gᵀ rhs` when the
/// factorization has a pivot below `1e-14·max|G|` or the residual check fails.
/// Returns the solution and whether the fallback was used.
pub fn solve_reduced<T: Scalar>(g: &Matrix<T>, rhs: &[T], kappa: T) -> Result<(Vec<T>, bool)> {
    if !g.is_square() || g.rows() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "reduced system is {}x{} with rhs of length {}",
            g.rows(),
            g.cols(),
            rhs.len()
        )));
    }
    if rhs.is_empty() {
        return Ok((Vec::new(), false));
    }
    let floor = T::lit(1e-14) * g.max_abs();
    let res_tol = T::tol_floor(1e-8, 64.0) * (T::one() + norm2(rhs));
    if let Ok(lu) = LuFactor::new(g, floor) {
        let d = lu.solve(rhs);
        let r: Vec<T> = g.mul_vec(&d).iter().zip(rhs).map(|(&a, &b)| a - b).collect();
        let res = norm2(&r);
        if res <= res_tol {
            return Ok((d, false));
        }
        trace!("direct reduced solve rejected: residual {res:e} > {res_tol:e}");
    }
    Ok((solve_regularized(g, rhs, kappa)?, true))
}

/// `(GᵀG + κI) d = Gᵀ rhs`.
fn solve_regularized<T: Scalar>(g: &Matrix<T>, rhs: &[T], kappa: T) -> Result<Vec<T>> {
    let mut normal = Matrix::zeros(g.cols(), g.cols());
    for r in 0..g.rows() {
        let row = g.row(r);
        for i in 0..g.cols() {
            if row[i] != T::zero() {
                crate::linalg::axpy(row[i], row, normal.row_mut(i));
            }
        }
    }
    for i in 0..g.cols() {
        normal[(i, i)] += kappa;
    }
    let gt_rhs = g.tr_mul_vec(rhs);
    let lu = LuFactor::new(&normal, T::zero())?;
    let d = lu.solve(&gt_rhs);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::FactorizationFailure("regularized solve produced non-finite values".into()));
    }
    Ok(d)
}

/// `κ_ℓ = kappa0 / max(ℓ, 1)`.
pub fn fallback_kappa<T: Scalar>(config: &SolverConfig, iter_index: usize) -> T {
    T::lit(config.kappa0 / iter_index.max(1) as f64)
}

/// Newton direction at `(Y, T)`.
pub fn newton_direction<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
    iter_index: usize,
    config: &SolverConfig,
) -> Result<NewtonDirection<T>> {
    y.check_dims(p)?;
    check_support(p, t)?;
    let tc = t.complement(p.n());
    let f = assemble_f_unchecked(p, y, t, &tc);
    let blocks = assemble_g_unchecked(p, y, t);
    direction_from_blocks(p, y, &blocks, &f, &tc, iter_index, config, false)
}

fn direction_from_blocks<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    blocks: &JacobianBlocks<T>,
    f: &ResidualVector<T>,
    tc: &[usize],
    iter_index: usize,
    config: &SolverConfig,
    regularized: bool,
) -> Result<NewtonDirection<T>> {
    let x_comp: Vec<(usize, T)> = tc.iter().map(|&i| (i, y.x[i])).filter(|&(_, v)| v != T::zero()).collect();
    let dx = blocks.apply_d_global(p, &y.mu, &x_comp);
    let rhs: Vec<T> = dx.iter().zip(f.k_block()).map(|(&a, b)| a - b).collect();
    let kappa = fallback_kappa::<T>(config, iter_index);
    let (d_k, used_fallback) = if regularized {
        (solve_regularized(&blocks.g, &rhs, kappa)?, true)
    } else {
        solve_reduced(&blocks.g, &rhs, kappa)?
    };
    Ok(NewtonDirection {
        support: blocks.support.clone(),
        d_xcomp: tc.iter().map(|&i| -y.x[i]).collect(),
        d_nucomp: tc.iter().map(|&i| -y.nu[i]).collect(),
        d_k,
        used_fallback,
        kappa: if used_fallback { kappa } else { T::zero() },
    })
}

/// `y + d(α)`: the reduced block is scaled by `α`, the complement blocks are
/// applied in full, which sets `x_T̄` and `ν_T̄` to exactly zero.
pub fn apply_step<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    dir: &NewtonDirection<T>,
    alpha: T,
) -> PrimalDualPoint<T> {
    let lay = Layout::of(p);
    let mut out = y.clone();
    let tc = dir.support.complement(p.n());
    for &i in &tc {
        out.x[i] = T::zero();
        out.nu[i] = T::zero();
    }
    let dk = &dir.d_k;
    for (a, &i) in dir.support.indices().iter().enumerate() {
        out.x[i] += alpha * dk[a];
        out.nu[i] += alpha * dk[lay.nu() + a];
    }
    for l in 0..lay.k {
        out.mu[l] += alpha * dk[lay.mu() + l];
    }
    for r in 0..lay.m {
        out.lambda[r] += alpha * dk[lay.lambda() + r];
    }
    for e in 0..lay.m_eq {
        out.zeta[e] += alpha * dk[lay.zeta() + e];
    }
    out
}

/// Result of [`line_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct LineSearchOutcome<T> {
    pub alpha: T,
    /// Backtracking exponent, `alpha = ρᵗ`.
    pub t: usize,
    pub accepted: bool,
    /// `⟨F, W d⟩ = 0`, so the Armijo test carries no decrease requirement.
    pub degenerate: bool,
    /// `⟨F(Y;T), W d⟩`.
    pub directional: T,
    /// `Ψ` at the returned step.
    pub merit: T,
}

/// Armijo backtracking: first `t` with
/// `Ψ(y + d(ρᵗ); T) <= Ψ(y; T) + σ ρᵗ ⟨F(Y;T), W d⟩`.
pub fn line_search<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
    dir: &NewtonDirection<T>,
    config: &SolverConfig,
) -> Result<LineSearchOutcome<T>> {
    y.check_dims(p)?;
    check_support(p, t)?;
    if dir.support != *t || dir.d_k.len() != p.q_dim() {
        return Err(Error::DimensionMismatch("direction was computed for a different support".into()));
    }
    let tc = t.complement(p.n());
    let f = assemble_f_unchecked(p, y, t, &tc);
    let blocks = assemble_g_unchecked(p, y, t);
    Ok(line_search_with(p, y, &blocks, &f, &tc, dir, config))
}

fn line_search_with<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    blocks: &JacobianBlocks<T>,
    f: &ResidualVector<T>,
    tc: &[usize],
    dir: &NewtonDirection<T>,
    config: &SolverConfig,
) -> LineSearchOutcome<T> {
    let wd = apply_w_with(p, y, blocks, &dir.flattened(p));
    let directional = dot(&f.to_vec(), &wd);
    let psi0 = T::lit(0.5) * f.norm_sq();
    let rho = T::lit(config.rho);
    let sigma = T::lit(config.sigma);
    let degenerate = directional == T::zero();
    let mut alpha = T::one();
    let mut last_merit = T::nan();
    for t in 0..=config.max_backtracks {
        let trial = apply_step(p, y, dir, alpha);
        let merit = T::lit(0.5) * assemble_f_unchecked(p, &trial, &dir.support, tc).norm_sq();
        if merit <= psi0 + sigma * alpha * directional {
            return LineSearchOutcome { alpha, t, accepted: true, degenerate, directional, merit };
        }
        last_merit = merit;
        if t < config.max_backtracks {
            alpha *= rho;
        }
    }
    LineSearchOutcome { alpha, t: config.max_backtracks, accepted: false, degenerate, directional, merit: last_merit }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Stalled,
}

/// Everything recorded by [`snsqp_solve`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub status: SolveStatus,
    /// Number of Newton steps taken.
    pub iterations: usize,
    pub final_point: PrimalDualPoint<T>,
    /// Support the final residual was measured against.
    pub final_support: SupportSet,
    /// `‖F(Y^ℓ; T_ℓ)‖` for `ℓ = 0..=iterations`.
    pub residual_history: Vec<T>,
    pub fallback_count: usize,
    /// Backtracking exponent of each step.
    pub backtrack_counts: Vec<usize>,
    /// Whether each step passed the Armijo test.
    pub accepted_history: Vec<bool>,
    pub support_history: Vec<SupportSet>,
    /// `‖x^ℓ‖₀` for `ℓ = 1..=iterations`.
    pub nnz_history: Vec<usize>,
    pub wall_time_s: f64,
    pub config: SolverConfig,
}

impl<T: Scalar> SolveReport<T> {
    pub fn final_residual(&self) -> T {
        self.residual_history.last().copied().unwrap_or(T::nan())
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Runs the semismooth Newton method from `y0`.
pub fn snsqp_solve<T: Scalar>(
    p: &SqcqpProblem<T>,
    y0: &PrimalDualPoint<T>,
    config: &SolverConfig,
) -> Result<SolveReport<T>> {
    config.validate()?;
    y0.check_dims(p)?;
    let start = Instant::now();
    let tau = T::lit(config.tau);
    let eps = T::lit(config.eps);
    let n = p.n();

    let mut y = y0.clone();
    let mut residual_history = Vec::new();
    let mut support_history = Vec::new();
    let mut backtrack_counts = Vec::new();
    let mut accepted_history = Vec::new();
    let mut nnz_history = Vec::new();
    let mut fallback_count = 0;
    let mut rejections = 0;
    let mut iterations = 0;

    let (status, support) = loop {
        let g = p.lagrangian_gradient_sparse(&y, &nonzeros(&y.x));
        let u = scores_from_gradient(&y.x, &y.nu, &g, tau);
        let t = SupportSet::new(top_s_indices(&u, p.s()), n)?;
        let tc = t.complement(n);
        let f = assemble_f_unchecked(p, &y, &t, &tc);
        let res = f.norm();
        residual_history.push(res);
        support_history.push(t.clone());
        debug!("iter {iterations}: ‖F‖ = {res:e}, T = {:?}", t.indices());

        if res <= eps {
            break (SolveStatus::Converged, t);
        }
        if !res.is_finite() || rejections >= MAX_CONSECUTIVE_REJECTIONS || stalled(&residual_history) {
            break (SolveStatus::Stalled, t);
        }
        if iterations >= config.max_iter {
            break (SolveStatus::MaxIterations, t);
        }

        let blocks = assemble_g_unchecked(p, &y, &t);
        let dir = direction_from_blocks(p, &y, &blocks, &f, &tc, iterations, config, false)?;
        if dir.used_fallback {
            fallback_count += 1;
        }
        let ls = line_search_with(p, &y, &blocks, &f, &tc, &dir, config);
        rejections = if ls.accepted { 0 } else { rejections + 1 };
        debug!(
            "  step α = {:e} after {} backtracks{}{}",
            ls.alpha.to_f64_lossy(),
            ls.t,
            if dir.used_fallback { ", regularized" } else { "" },
            if ls.accepted { "" } else { ", Armijo test failed" }
        );
        y = apply_step(p, &y, &dir, ls.alpha);
        if config.clamp_multipliers {
            y.mu.iter_mut().chain(y.lambda.iter_mut()).for_each(|v| *v = v.max(T::zero()));
        }
        iterations += 1;
        backtrack_counts.push(ls.t);
        accepted_history.push(ls.accepted);
        nnz_history.push(l0_norm(&y.x));
    };

    Ok(SolveReport {
        status,
        iterations,
        final_point: y,
        final_support: support,
        residual_history,
        fallback_count,
        backtrack_counts,
        accepted_history,
        support_history,
        nnz_history,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: config.clone(),
    })
}

/// No relative improvement of the best residual over the last [`STALL_WINDOW`] iterations.
fn stalled<T: Scalar>(history: &[T]) -> bool {
    if history.len() <= STALL_WINDOW {
        return false;
    }
    let split = history.len() - STALL_WINDOW;
    let best_before = history[..split].iter().copied().fold(T::infinity(), T::min);
    let best_recent = history[split..].iter().copied().fold(T::infinity(), T::min);
    best_recent >= (T::one() - T::lit(STALL_REL_IMPROVEMENT)) * best_before
}
