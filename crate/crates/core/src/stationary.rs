//! Stationary equations `F(Y;T)`, the merit function and the P-stationarity check.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{dot, norm_inf};
use crate::ncp::fb_phi;
use crate::problem::{nonzeros, PrimalDualPoint, SqcqpProblem};
use crate::projection::SupportSet;
use crate::scalar::Scalar;

/// Entries with `|x_i|` above this count as part of `supp(x)` in the stationarity check.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// `F(Y;T)` split into its blocks, in the fixed row order
/// `grad_t, x_comp, proj, nu_comp, phi, psi, eq`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualVector<T> {
    /// `(∇ₓL + ν)_T`
    pub grad_t: Vec<T>,
    /// `x_T̄`
    pub x_comp: Vec<T>,
    /// `x_T − Π_{X_T}(x_T + ν_T)`
    pub proj: Vec<T>,
    /// `ν_T̄`
    pub nu_comp: Vec<T>,
    pub phi: Vec<T>,
    pub psi: Vec<T>,
    /// `A_eq x − b_eq`
    pub eq: Vec<T>,
    pub support: SupportSet,
}

impl<T: Scalar> ResidualVector<T> {
    fn blocks(&self) -> [&Vec<T>; 7] {
        [&self.grad_t, &self.x_comp, &self.proj, &self.nu_comp, &self.phi, &self.psi, &self.eq]
    }

    pub fn len(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flattened in block order.
    pub fn to_vec(&self) -> Vec<T> {
        self.blocks().iter().flat_map(|b| b.iter().copied()).collect()
    }

    /// Rows matching the reduced matrix: `grad_t, proj, phi, psi, eq`.
    pub fn k_block(&self) -> Vec<T> {
        [&self.grad_t, &self.proj, &self.phi, &self.psi, &self.eq].iter().flat_map(|b| b.iter().copied()).collect()
    }

    pub fn norm_sq(&self) -> T {
        self.blocks().iter().map(|b| dot(b, b)).fold(T::zero(), |a, b| a + b)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.blocks().iter().map(|b| norm_inf(b)).fold(T::zero(), T::max)
    }
}

pub(crate) fn check_support<T: Scalar>(p: &SqcqpProblem<T>, t: &SupportSet) -> Result<()> {
    if t.len() != p.s() || t.indices().last().is_some_and(|&i| i >= p.n()) {
        return Err(crate::error::Error::DimensionMismatch(format!(
            "support of size {} is not a valid s = {} subset of [{}]",
            t.len(),
            p.s(),
            p.n()
        )));
    }
    Ok(())
}

/// Assembles `F(Y;T)`.
pub fn assemble_f<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, t: &SupportSet) -> Result<ResidualVector<T>> {
    y.check_dims(p)?;
    check_support(p, t)?;
    Ok(assemble_f_unchecked(p, y, t, &t.complement(p.n())))
}

pub(crate) fn assemble_f_unchecked<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
    tc: &[usize],
) -> ResidualVector<T> {
    let nz = nonzeros(&y.x);
    let idx = t.indices();
    let g = p.lagrangian_gradient_rows(y, &nz, idx);
    let grad_t = g.iter().zip(idx).map(|(&gi, &i)| gi + y.nu[i]).collect();
    let proj = idx.iter().map(|&i| y.x[i] - p.bounds().clamp(i, y.x[i] + y.nu[i])).collect();
    let phi = p.quad_values_sparse(&nz).iter().zip(&y.mu).map(|(&f, &m)| fb_phi(-f, m)).collect();
    let psi = p.linear_slacks_sparse(&nz).iter().zip(&y.lambda).map(|(&sl, &l)| fb_phi(sl, l)).collect();
    ResidualVector {
        grad_t,
        x_comp: tc.iter().map(|&i| y.x[i]).collect(),
        proj,
        nu_comp: tc.iter().map(|&i| y.nu[i]).collect(),
        phi,
        psi,
        eq: p.eq_residual_sparse(&nz),
        support: t.clone(),
    }
}

/// `Ψ(Y;T) = ½‖F(Y;T)‖²`.
pub fn merit<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, t: &SupportSet) -> Result<T> {
    Ok(T::lit(0.5) * assemble_f(p, y, t)?.norm_sq())
}

/// Outcome of [`verify_p_stationarity`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub pass: bool,
    /// Largest measured quantity among the checks (`τ‖g_Γ̄‖∞ − x_(s)` for the
    /// strict-inequality branch, the excess count for a sparsity violation).
    pub worst_violation: f64,
    /// Label of the failing check with the largest excess, or of the largest
    /// quantity when everything passes.
    pub which: String,
}

/// Checks the pointwise characterization of P-stationarity at `Y` for constant `τ`.
pub fn verify_p_stationarity<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    tau: T,
    tol: T,
) -> StationarityReport {
    if y.check_dims(p).is_err() {
        return StationarityReport { pass: false, worst_violation: f64::INFINITY, which: "dimension mismatch".into() };
    }
    let thr = T::lit(SUPPORT_THRESHOLD);
    let n = p.n();
    let gamma: Vec<usize> = (0..n).filter(|&i| y.x[i].abs() > thr).collect();
    if gamma.len() > p.s() {
        return StationarityReport {
            pass: false,
            worst_violation: (gamma.len() - p.s()) as f64,
            which: "sparsity violated".into(),
        };
    }
    let gamma_c: Vec<usize> = {
        let mut in_gamma = vec![false; n];
        gamma.iter().for_each(|&i| in_gamma[i] = true);
        (0..n).filter(|&i| !in_gamma[i]).collect()
    };
    let nz = nonzeros(&y.x);
    let g = p.lagrangian_gradient_sparse(y, &nz);

    // (label, measured quantity, threshold it must stay below (strictly for the tau branch))
    let mut checks: Vec<(&str, T, T, bool)> = Vec::new();
    let max_over = |idx: &[usize], f: &dyn Fn(usize) -> T| idx.iter().map(|&i| f(i).abs()).fold(T::zero(), T::max);

    checks.push(("gradient-on-support", max_over(&gamma, &|i| g[i] + y.nu[i]), tol, false));
    let g_off = max_over(&gamma_c, &|i| g[i]);
    if gamma.len() == p.s() {
        let x_s = gamma.iter().map(|&i| y.x[i].abs()).fold(T::infinity(), T::min);
        checks.push(("tau-strict-inequality", tau * g_off - x_s, tol, true));
    } else {
        checks.push(("gradient-off-support", g_off, tol, false));
    }
    checks.push(("box-projection", max_over(&gamma, &|i| y.x[i] - p.bounds().clamp(i, y.x[i] + y.nu[i])), tol, false));
    checks.push(("nu-off-support", max_over(&gamma_c, &|i| y.nu[i]), tol, false));
    let phi: Vec<T> = p.quad_values_sparse(&nz).iter().zip(&y.mu).map(|(&f, &m)| fb_phi(-f, m)).collect();
    checks.push(("phi", norm_inf(&phi), tol, false));
    let psi: Vec<T> = p.linear_slacks_sparse(&nz).iter().zip(&y.lambda).map(|(&sl, &l)| fb_phi(sl, l)).collect();
    checks.push(("psi", norm_inf(&psi), tol, false));
    checks.push(("equality", norm_inf(&p.eq_residual_sparse(&nz)), tol, false));

    let mut pass = true;
    let mut worst_excess = T::neg_infinity();
    let mut which = "none";
    let mut worst = T::neg_infinity();
    let mut largest_label = "none";
    for &(label, value, limit, strict) in &checks {
        let failed = if strict { !(value < limit) } else { !(value <= limit) };
        let excess = if value.is_nan() { T::infinity() } else { value - limit };
        if failed {
            pass = false;
            if excess > worst_excess || which == "none" {
                worst_excess = excess;
                which = label;
            }
        }
        if value > worst || value.is_nan() {
            worst = if value.is_nan() { T::infinity() } else { value };
            largest_label = label;
        }
    }
    StationarityReport {
        pass,
        worst_violation: worst.to_f64_lossy(),
        which: if pass { largest_label.to_string() } else { which.to_string() },
    }
}
