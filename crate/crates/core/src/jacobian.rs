//! Generalized Jacobian of `F(Y;T)`: index classes, the reduced matrix `G`,
//! the coupling `D` and a matrix-free product with the full `W`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::ncp::fb_coefficients;
use crate::problem::{nonzeros, PrimalDualPoint, SqcqpProblem};
use crate::projection::{box_derivative, SupportSet};
use crate::scalar::Scalar;
use crate::stationary::check_support;

/// Default slack used by [`classify_indices`].
pub const CLASSIFY_TOL: f64 = 1e-10;

/// Partition of constraint and support indices by sign pattern.
/// `eta`: inactive, `beta`: strictly active, `theta`: everything else.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexClassification {
    pub eta1: Vec<usize>,
    pub theta1: Vec<usize>,
    pub beta1: Vec<usize>,
    pub eta2: Vec<usize>,
    pub theta2: Vec<usize>,
    pub beta2: Vec<usize>,
    pub eta3: Vec<usize>,
    pub theta3: Vec<usize>,
    pub beta3: Vec<usize>,
}

/// Classifies the quadratic constraints (`1`), linear inequalities (`2`) and
/// support coordinates (`3`). Diagnostic only; the Jacobian never branches on it.
pub fn classify_indices<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
    tol: T,
) -> IndexClassification {
    let nz = nonzeros(&y.x);
    let mut c = IndexClassification::default();
    let split = |slack: T, mult: T, i: usize, eta: &mut Vec<usize>, theta: &mut Vec<usize>, beta: &mut Vec<usize>| {
        if mult.abs() <= tol && slack > tol {
            eta.push(i);
        } else if mult > tol && slack.abs() <= tol {
            beta.push(i);
        } else {
            theta.push(i);
        }
    };
    for (i, (&f, &mu)) in p.quad_values_sparse(&nz).iter().zip(&y.mu).enumerate() {
        split(-f, mu, i, &mut c.eta1, &mut c.theta1, &mut c.beta1);
    }
    for (i, (&sl, &lam)) in p.linear_slacks_sparse(&nz).iter().zip(&y.lambda).enumerate() {
        split(sl, lam, i, &mut c.eta2, &mut c.theta2, &mut c.beta2);
    }
    let bounds = p.bounds();
    for &i in t.indices() {
        let (lo, hi, xi, nu) = (bounds.lower()[i], bounds.upper()[i], y.x[i], y.nu[i]);
        let interior = xi > lo + tol && xi < hi - tol;
        let on_bound = (xi - lo).abs() <= tol || (xi - hi).abs() <= tol;
        if nu.abs() <= tol && interior {
            c.eta3.push(i);
        } else if nu.abs() > tol && on_bound {
            c.beta3.push(i);
        } else {
            c.theta3.push(i);
        }
    }
    c
}

/// Pieces of the reduced Newton system at `(Y, T)`.
#[derive(Clone, Debug)]
pub struct JacobianBlocks<T> {
    pub support: SupportSet,
    /// `(Q₀ + Σ μᵢQᵢ)_{TT}`
    pub h_tt: Matrix<T>,
    /// `s × k`, column `l` is `(Q_l x + q_l)_T`.
    pub b_t: Matrix<T>,
    /// Box-projection derivative on `T`.
    pub c: Vec<T>,
    pub u1: Vec<T>,
    pub v1: Vec<T>,
    pub u2: Vec<T>,
    pub v2: Vec<T>,
    /// `A_{:,T}`, `m × s`.
    pub a_t: Matrix<T>,
    /// `A_eq_{:,T}`, `m_eq × s`.
    pub e_t: Matrix<T>,
    /// Reduced matrix, columns `(x_T, μ, λ, ν_T, ζ)`, rows `(grad, proj, phi, psi, eq)`.
    pub g: Matrix<T>,
    /// Full constraint gradients `∇f_l(x)`, kept for the off-support couplings.
    pub(crate) constraint_grads: Vec<Vec<T>>,
}

/// Offsets of the column (and row) blocks of `G`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Layout {
    pub s: usize,
    pub k: usize,
    pub m: usize,
    pub m_eq: usize,
}

impl Layout {
    pub fn of<T: Scalar>(p: &SqcqpProblem<T>) -> Self {
        Self { s: p.s(), k: p.k(), m: p.m(), m_eq: p.m_eq() }
    }
    pub fn q(&self) -> usize {
        2 * self.s + self.k + self.m + self.m_eq
    }
    pub fn mu(&self) -> usize {
        self.s
    }
    pub fn lambda(&self) -> usize {
        self.s + self.k
    }
    pub fn nu(&self) -> usize {
        self.s + self.k + self.m
    }
    pub fn zeta(&self) -> usize {
        2 * self.s + self.k + self.m
    }
    /// Row offsets of the phi, psi and eq blocks (grad at 0, proj at `s`).
    pub fn phi_row(&self) -> usize {
        2 * self.s
    }
    pub fn psi_row(&self) -> usize {
        2 * self.s + self.k
    }
    pub fn eq_row(&self) -> usize {
        2 * self.s + self.k + self.m
    }
}

/// Builds `H_TT, B_T, C, U, V, A_T, E_T` and the reduced matrix `G`.
pub fn assemble_g<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, t: &SupportSet) -> Result<JacobianBlocks<T>> {
    y.check_dims(p)?;
    check_support(p, t)?;
    Ok(assemble_g_unchecked(p, y, t))
}

/// `C` entry for `i ∈ T`. Off kinks this is [`box_derivative`] of `x_i + ν_i`. At a
/// kink with `ν_i = 0`, `x_i` sits on a bound with no box multiplier yet, which is
/// the state of an index that just entered `T`. There the interior element 1 lets
/// `x_i` leave the bound; the kink value 0 would pin it and push the gradient into
/// `ν_i` with the wrong sign, after which the index drops out and re-enters.
fn projection_slope<T: Scalar>(x: T, nu: T, lower: T, upper: T) -> T {
    if nu == T::zero() && (x == lower || x == upper) {
        T::one()
    } else {
        box_derivative(x + nu, lower, upper)
    }
}

pub(crate) fn assemble_g_unchecked<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
) -> JacobianBlocks<T> {
    let lay = Layout::of(p);
    let (s, k, m, m_eq) = (lay.s, lay.k, lay.m, lay.m_eq);
    let idx = t.indices();
    let nz = nonzeros(&y.x);

    let h_tt = Matrix::from_fn(s, s, |a, b| p.hessian_entry(&y.mu, idx[a], idx[b]));
    let constraint_grads: Vec<Vec<T>> = p.quad_constraints().iter().map(|f| f.gradient_sparse(&nz)).collect();
    let b_t = Matrix::from_fn(s, k, |a, l| constraint_grads[l][idx[a]]);
    let bounds = p.bounds();
    let c: Vec<T> =
        idx.iter().map(|&i| projection_slope(y.x[i], y.nu[i], bounds.lower()[i], bounds.upper()[i])).collect();
    let (mut u1, mut v1) = (Vec::with_capacity(k), Vec::with_capacity(k));
    for (&f, &mu) in p.quad_values_sparse(&nz).iter().zip(&y.mu) {
        let cf = fb_coefficients(-f, mu);
        u1.push(cf.u);
        v1.push(cf.v);
    }
    let (mut u2, mut v2) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for (&sl, &lam) in p.linear_slacks_sparse(&nz).iter().zip(&y.lambda) {
        let cf = fb_coefficients(sl, lam);
        u2.push(cf.u);
        v2.push(cf.v);
    }
    let a_t = Matrix::from_fn(m, s, |r, a| p.a()[(r, idx[a])]);
    let e_t = Matrix::from_fn(m_eq, s, |r, a| p.a_eq()[(r, idx[a])]);

    let mut g = Matrix::zeros(lay.q(), lay.q());
    for a in 0..s {
        // grad row
        for b in 0..s {
            g[(a, b)] = h_tt[(a, b)];
        }
        for l in 0..k {
            g[(a, lay.mu() + l)] = b_t[(a, l)];
        }
        for r in 0..m {
            g[(a, lay.lambda() + r)] = a_t[(r, a)];
        }
        g[(a, lay.nu() + a)] = T::one();
        for e in 0..m_eq {
            g[(a, lay.zeta() + e)] = e_t[(e, a)];
        }
        // proj row
        g[(s + a, a)] = T::one() - c[a];
        g[(s + a, lay.nu() + a)] = -c[a];
    }
    for l in 0..k {
        let row = lay.phi_row() + l;
        for a in 0..s {
            g[(row, a)] = u1[l] * b_t[(a, l)];
        }
        g[(row, lay.mu() + l)] = v1[l];
    }
    for r in 0..m {
        let row = lay.psi_row() + r;
        for a in 0..s {
            g[(row, a)] = u2[r] * a_t[(r, a)];
        }
        g[(row, lay.lambda() + r)] = v2[r];
    }
    for e in 0..m_eq {
        let row = lay.eq_row() + e;
        for a in 0..s {
            g[(row, a)] = e_t[(e, a)];
        }
    }
    JacobianBlocks { support: t.clone(), h_tt, b_t, c, u1, v1, u2, v2, a_t, e_t, g, constraint_grads }
}

impl<T: Scalar> JacobianBlocks<T> {
    /// `D z` where `z` lives on `T̄` and is given by its nonzeros as
    /// `(global index, value)`; rows in `G` order. Costs `O(q · nnz(z))`.
    pub(crate) fn apply_d_global(&self, p: &SqcqpProblem<T>, mu: &[T], z: &[(usize, T)]) -> Vec<T> {
        let lay = Layout::of(p);
        let mut out = vec![T::zero(); lay.q()];
        if z.is_empty() {
            return out;
        }
        for (a, &i) in self.support.indices().iter().enumerate() {
            out[a] = z.iter().fold(T::zero(), |acc, &(j, zj)| acc + p.hessian_entry(mu, i, j) * zj);
        }
        for l in 0..lay.k {
            let gl = &self.constraint_grads[l];
            let v = z.iter().fold(T::zero(), |acc, &(j, zj)| acc + gl[j] * zj);
            out[lay.phi_row() + l] = self.u1[l] * v;
        }
        for r in 0..lay.m {
            let row = p.a().row(r);
            let v = z.iter().fold(T::zero(), |acc, &(j, zj)| acc + row[j] * zj);
            out[lay.psi_row() + r] = self.u2[r] * v;
        }
        for e in 0..lay.m_eq {
            let row = p.a_eq().row(e);
            out[lay.eq_row() + e] = z.iter().fold(T::zero(), |acc, &(j, zj)| acc + row[j] * zj);
        }
        out
    }
}

/// `D x_comp` with `x_comp` an `(n−s)`-vector over `T̄` (ascending order), given by
/// its nonzeros as `(position in T̄, value)`.
pub fn apply_d_sparse<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    t: &SupportSet,
    x_comp: &[(usize, T)],
) -> Result<Vec<T>> {
    let blocks = assemble_g(p, y, t)?;
    let tc = t.complement(p.n());
    let mut z = Vec::with_capacity(x_comp.len());
    for &(pos, v) in x_comp {
        let &j = tc.get(pos).ok_or_else(|| {
            Error::DimensionMismatch(format!("position {pos} outside the complement of size {}", tc.len()))
        })?;
        z.push((j, v));
    }
    Ok(blocks.apply_d_global(p, &y.mu, &z))
}

/// `W d` for `d = (d^x_T; d^x_T̄; d^ν_T; d^ν_T̄; d^μ; d^λ; d^ζ)`, output in `F` order.
pub fn apply_w<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, t: &SupportSet, d: &[T]) -> Result<Vec<T>> {
    y.check_dims(p)?;
    check_support(p, t)?;
    if d.len() != p.p_dim() {
        return Err(Error::DimensionMismatch(format!("direction has {} entries, expected p = {}", d.len(), p.p_dim())));
    }
    let blocks = assemble_g_unchecked(p, y, t);
    Ok(apply_w_with(p, y, &blocks, d))
}

pub(crate) fn apply_w_with<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    blocks: &JacobianBlocks<T>,
    d: &[T],
) -> Vec<T> {
    let n = p.n();
    let lay = Layout::of(p);
    let (s, k, m) = (lay.s, lay.k, lay.m);
    let t = &blocks.support;
    let idx = t.indices();
    let tc = t.complement(n);
    let (dx_t, rest) = d.split_at(s);
    let (dx_c, rest) = rest.split_at(n - s);
    let (dnu_t, rest) = rest.split_at(s);
    let (dnu_c, rest) = rest.split_at(n - s);
    let (dmu, rest) = rest.split_at(k);
    let (dlam, dzeta) = rest.split_at(m);

    // Full-length primal direction, kept sparse.
    let mut dx_nz: Vec<(usize, T)> = idx.iter().zip(dx_t).map(|(&i, &v)| (i, v)).collect();
    dx_nz.extend(tc.iter().zip(dx_c).filter(|(_, &v)| v != T::zero()).map(|(&i, &v)| (i, v)));

    let mut out = Vec::with_capacity(p.p_dim());
    for (a, &i) in idx.iter().enumerate() {
        let mut v = dx_nz.iter().fold(T::zero(), |acc, &(j, dj)| acc + p.hessian_entry(&y.mu, i, j) * dj);
        v += dnu_t[a];
        v += (0..k).fold(T::zero(), |acc, l| acc + blocks.b_t[(a, l)] * dmu[l]);
        v += (0..m).fold(T::zero(), |acc, r| acc + blocks.a_t[(r, a)] * dlam[r]);
        v += dzeta.iter().enumerate().fold(T::zero(), |acc, (e, &dz)| acc + blocks.e_t[(e, a)] * dz);
        out.push(v);
    }
    out.extend_from_slice(dx_c);
    for a in 0..s {
        out.push((T::one() - blocks.c[a]) * dx_t[a] - blocks.c[a] * dnu_t[a]);
    }
    out.extend_from_slice(dnu_c);
    let sparse_dot = |row: &[T]| dx_nz.iter().fold(T::zero(), |acc, &(j, dj)| acc + row[j] * dj);
    for l in 0..k {
        out.push(blocks.u1[l] * sparse_dot(&blocks.constraint_grads[l]) + blocks.v1[l] * dmu[l]);
    }
    for r in 0..m {
        out.push(blocks.u2[r] * sparse_dot(p.a().row(r)) + blocks.v2[r] * dlam[r]);
    }
    for e in 0..lay.m_eq {
        out.push(sparse_dot(p.a_eq().row(e)));
    }
    out
}

/// Flattens `(x_T; x_T̄; ν_T; ν_T̄; μ; λ; ζ)` of a point, the layout expected by [`apply_w`].
pub fn flatten_point<T: Scalar>(y: &PrimalDualPoint<T>, t: &SupportSet) -> Vec<T> {
    let tc = t.complement(y.x.len());
    let pick = |v: &[T], ids: &[usize]| ids.iter().map(|&i| v[i]).collect::<Vec<T>>();
    [
        pick(&y.x, t.indices()),
        pick(&y.x, &tc),
        pick(&y.nu, t.indices()),
        pick(&y.nu, &tc),
        y.mu.clone(),
        y.lambda.clone(),
        y.zeta.clone(),
    ]
    .concat()
}

/// Inverse of [`flatten_point`].
pub fn unflatten_point<T: Scalar>(p: &SqcqpProblem<T>, t: &SupportSet, v: &[T]) -> Result<PrimalDualPoint<T>> {
    if v.len() != p.p_dim() {
        return Err(Error::DimensionMismatch(format!("flat point has {} entries, expected {}", v.len(), p.p_dim())));
    }
    let (n, k, m) = (p.n(), p.k(), p.m());
    let tc = t.complement(n);
    let mut y = PrimalDualPoint::zeros_for(p);
    let mut it = v.iter().copied();
    for &i in t.indices() {
        y.x[i] = it.next().unwrap();
    }
    for &i in &tc {
        y.x[i] = it.next().unwrap();
    }
    for &i in t.indices() {
        y.nu[i] = it.next().unwrap();
    }
    for &i in &tc {
        y.nu[i] = it.next().unwrap();
    }
    y.mu = it.by_ref().take(k).collect();
    y.lambda = it.by_ref().take(m).collect();
    y.zeta = it.collect();
    Ok(y)
}

/// `σ_min(G)` via a dense singular value decomposition.
pub fn smallest_singular_value<T: Scalar>(g: &Matrix<T>) -> T {
    singular_values(g).last().copied().unwrap_or(T::zero())
}
