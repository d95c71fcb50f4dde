//! Problem data, multiplier tuples and Lagrangian evaluation.
//!
//! The problem is
//!
//! ```text
//! min  f_0(x) = ½ xᵀQ₀x + q₀ᵀx + c₀
//! s.t. f_i(x) = ½ xᵀQᵢx + qᵢᵀx + cᵢ <= 0,   i = 1..k
//!      A x <= b,   A_eq x = b_eq,   x ∈ X = X₁ × … × Xₙ,   ‖x‖₀ <= s
//! ```
//!
//! with every `Xᵢ` a closed interval containing zero. The Lagrangian is
//! `L = f₀ + Σ μᵢ fᵢ + ⟨λ, Ax - b⟩ + ⟨ζ, A_eq x - b_eq⟩`; the box multiplier `ν`
//! enters the stationary equations separately.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::scalar::Scalar;

/// Nonzero entries `(index, value)` of a vector.
pub fn nonzeros<T: Scalar>(x: &[T]) -> Vec<(usize, T)> {
    x.iter().enumerate().filter(|(_, &v)| v != T::zero()).map(|(i, &v)| (i, v)).collect()
}

/// Number of nonzero entries (bit-exact comparison with zero).
pub fn l0_norm<T: Scalar>(x: &[T]) -> usize {
    x.iter().filter(|&&v| v != T::zero()).count()
}

/// `½ xᵀQx + qᵀx + c` with symmetric `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<T> {
    q_mat: Matrix<T>,
    q_vec: Vec<T>,
    c: T,
}

impl<T: Scalar> QuadraticForm<T> {
    /// Builds the form, symmetrizing `Q` as `(Q + Qᵀ)/2`.
    pub fn new(q_mat: Matrix<T>, q_vec: Vec<T>, c: T) -> Result<Self> {
        if !q_mat.is_square() || q_mat.rows() != q_vec.len() {
            return Err(Error::DimensionMismatch(format!(
                "quadratic form has Q {}x{} and q of length {}",
                q_mat.rows(),
                q_mat.cols(),
                q_vec.len()
            )));
        }
        let mut q_mat = q_mat;
        let asym = q_mat.max_asymmetry();
        if asym != T::zero() {
            let scale = q_mat.max_abs().max(T::one());
            if asym > T::lit(1e-12) * scale {
                warn!("symmetrizing quadratic form: max |Q_ij - Q_ji| = {asym:e}");
            }
            q_mat.symmetrize();
        }
        Ok(Self { q_mat, q_vec, c })
    }

    pub fn zero(n: usize) -> Self {
        Self { q_mat: Matrix::zeros(n, n), q_vec: vec![T::zero(); n], c: T::zero() }
    }

    pub fn dim(&self) -> usize {
        self.q_vec.len()
    }

    pub fn q_mat(&self) -> &Matrix<T> {
        &self.q_mat
    }

    pub fn q_vec(&self) -> &[T] {
        &self.q_vec
    }

    pub fn constant(&self) -> T {
        self.c
    }

    pub fn value(&self, x: &[T]) -> T {
        self.value_sparse(&nonzeros(x))
    }

    /// Value at the vector whose nonzeros are `nz`; `O(nnz²)`.
    pub fn value_sparse(&self, nz: &[(usize, T)]) -> T {
        let half = T::lit(0.5);
        let mut quad = T::zero();
        let mut lin = T::zero();
        for &(i, xi) in nz {
            let row = self.q_mat.row(i);
            let mut acc = T::zero();
            for &(j, xj) in nz {
                acc += row[j] * xj;
            }
            quad += xi * acc;
            lin += self.q_vec[i] * xi;
        }
        half * quad + lin + self.c
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        self.gradient_sparse(&nonzeros(x))
    }

    /// `Q x + q` for the vector with nonzeros `nz`; `O(n · nnz)`.
    pub fn gradient_sparse(&self, nz: &[(usize, T)]) -> Vec<T> {
        let mut g = self.q_mat.sym_mul_sparse(nz);
        for (gi, &qi) in g.iter_mut().zip(&self.q_vec) {
            *gi += qi;
        }
        g
    }

    /// `(Q x + q)_r` for a single row.
    #[inline]
    pub fn gradient_entry(&self, r: usize, nz: &[(usize, T)]) -> T {
        let row = self.q_mat.row(r);
        nz.iter().fold(self.q_vec[r], |acc, &(j, xj)| acc + row[j] * xj)
    }

    pub fn cast<U: Scalar>(&self) -> QuadraticForm<U> {
        QuadraticForm {
            q_mat: self.q_mat.cast(),
            q_vec: self.q_vec.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(),
            c: U::lit(self.c.to_f64_lossy()),
        }
    }
}

/// Box `X = Π [lowerᵢ, upperᵢ]` with `lowerᵢ <= 0 <= upperᵢ`; infinite ends allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "box lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // NaN bounds fail these comparisons too.
            if !(lo <= T::zero() && T::zero() <= hi) {
                return Err(Error::BoxExcludesZero { index: i, lower: lo.to_f64_lossy(), upper: hi.to_f64_lossy() });
            }
        }
        Ok(Self { lower, upper })
    }

    /// `ℝⁿ`.
    pub fn free(n: usize) -> Self {
        Self { lower: vec![T::neg_infinity(); n], upper: vec![T::infinity(); n] }
    }

    pub fn uniform(n: usize, lower: T, upper: T) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Clamp of a single coordinate; infinite ends pass `z` through.
    #[inline]
    pub fn clamp(&self, i: usize, z: T) -> T {
        let mut v = z;
        if v < self.lower[i] {
            v = self.lower[i];
        }
        if v > self.upper[i] {
            v = self.upper[i];
        }
        v
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.lower[i] == T::neg_infinity() && self.upper[i] == T::infinity()
    }

    pub fn cast<U: Scalar>(&self) -> BoxSet<U> {
        BoxSet {
            lower: self.lower.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(),
            upper: self.upper.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(),
        }
    }
}

/// Unvalidated problem data; turned into an [`SqcqpProblem`] by [`validate_problem`].
#[derive(Clone, Debug)]
pub struct ProblemParts<T> {
    pub objective: QuadraticForm<T>,
    pub quad_constraints: Vec<QuadraticForm<T>>,
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub a_eq: Matrix<T>,
    pub b_eq: Vec<T>,
    pub bounds: BoxSet<T>,
    pub s: usize,
}

impl<T: Scalar> ProblemParts<T> {
    /// Objective only, over `ℝⁿ`.
    pub fn new(objective: QuadraticForm<T>, s: usize) -> Self {
        let n = objective.dim();
        Self {
            objective,
            quad_constraints: Vec::new(),
            a: Matrix::zeros(0, n),
            b: Vec::new(),
            a_eq: Matrix::zeros(0, n),
            b_eq: Vec::new(),
            bounds: BoxSet::free(n),
            s,
        }
    }

    pub fn with_quad_constraint(mut self, f: QuadraticForm<T>) -> Self {
        self.quad_constraints.push(f);
        self
    }

    pub fn with_linear(mut self, a: Matrix<T>, b: Vec<T>) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn with_equality(mut self, a_eq: Matrix<T>, b_eq: Vec<T>) -> Self {
        self.a_eq = a_eq;
        self.b_eq = b_eq;
        self
    }

    pub fn with_bounds(mut self, bounds: BoxSet<T>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn build(self) -> Result<SqcqpProblem<T>> {
        validate_problem(self)
    }
}

/// Validated sparse QCQP instance. Immutable after construction.
#[derive(Clone, Debug)]
pub struct SqcqpProblem<T> {
    objective: QuadraticForm<T>,
    quad_constraints: Vec<QuadraticForm<T>>,
    a: Matrix<T>,
    b: Vec<T>,
    a_eq: Matrix<T>,
    b_eq: Vec<T>,
    bounds: BoxSet<T>,
    s: usize,
}

/// Checks every dimension and the box/sparsity invariants.
/// Quadratic forms are already symmetric by construction of [`QuadraticForm`].
pub fn validate_problem<T: Scalar>(parts: ProblemParts<T>) -> Result<SqcqpProblem<T>> {
    let n = parts.objective.dim();
    for (i, f) in parts.quad_constraints.iter().enumerate() {
        if f.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "quadratic constraint {i} has dimension {}, objective has {n}",
                f.dim()
            )));
        }
    }
    if parts.a.cols() != n || parts.a.rows() != parts.b.len() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} and b has {} entries (n = {n})",
            parts.a.rows(),
            parts.a.cols(),
            parts.b.len()
        )));
    }
    if parts.a_eq.cols() != n || parts.a_eq.rows() != parts.b_eq.len() {
        return Err(Error::DimensionMismatch(format!(
            "A_eq is {}x{} and b_eq has {} entries (n = {n})",
            parts.a_eq.rows(),
            parts.a_eq.cols(),
            parts.b_eq.len()
        )));
    }
    if parts.bounds.dim() != n {
        return Err(Error::DimensionMismatch(format!("box has dimension {}, objective has {n}", parts.bounds.dim())));
    }
    // Re-run the box check in case the caller built it without `BoxSet::new`.
    BoxSet::new(parts.bounds.lower.clone(), parts.bounds.upper.clone())?;
    if parts.s < 1 || parts.s > n {
        return Err(Error::BadSparsityBound { s: parts.s, n });
    }
    Ok(SqcqpProblem {
        objective: parts.objective,
        quad_constraints: parts.quad_constraints,
        a: parts.a,
        b: parts.b,
        a_eq: parts.a_eq,
        b_eq: parts.b_eq,
        bounds: parts.bounds,
        s: parts.s,
    })
}

impl<T: Scalar> SqcqpProblem<T> {
    pub fn n(&self) -> usize {
        self.objective.dim()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.quad_constraints.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn m_eq(&self) -> usize {
        self.b_eq.len()
    }

    /// Length of the full stationary system, `2n + k + m + m_eq`.
    pub fn p_dim(&self) -> usize {
        2 * self.n() + self.k() + self.m() + self.m_eq()
    }

    /// Size of the reduced Newton system, `2s + k + m + m_eq`.
    pub fn q_dim(&self) -> usize {
        2 * self.s + self.k() + self.m() + self.m_eq()
    }

    pub fn objective(&self) -> &QuadraticForm<T> {
        &self.objective
    }

    pub fn quad_constraints(&self) -> &[QuadraticForm<T>] {
        &self.quad_constraints
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn a_eq(&self) -> &Matrix<T> {
        &self.a_eq
    }

    pub fn b_eq(&self) -> &[T] {
        &self.b_eq
    }

    pub fn bounds(&self) -> &BoxSet<T> {
        &self.bounds
    }

    /// Same data with a different sparsity bound.
    pub fn with_sparsity(&self, s: usize) -> Result<Self> {
        if s < 1 || s > self.n() {
            return Err(Error::BadSparsityBound { s, n: self.n() });
        }
        let mut out = self.clone();
        out.s = s;
        Ok(out)
    }

    pub fn to_parts(&self) -> ProblemParts<T> {
        ProblemParts {
            objective: self.objective.clone(),
            quad_constraints: self.quad_constraints.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            a_eq: self.a_eq.clone(),
            b_eq: self.b_eq.clone(),
            bounds: self.bounds.clone(),
            s: self.s,
        }
    }

    pub fn cast<U: Scalar>(&self) -> SqcqpProblem<U> {
        let v = |x: &[T]| x.iter().map(|&t| U::lit(t.to_f64_lossy())).collect::<Vec<U>>();
        SqcqpProblem {
            objective: self.objective.cast(),
            quad_constraints: self.quad_constraints.iter().map(QuadraticForm::cast).collect(),
            a: self.a.cast(),
            b: v(&self.b),
            a_eq: self.a_eq.cast(),
            b_eq: v(&self.b_eq),
            bounds: self.bounds.cast(),
            s: self.s,
        }
    }

    pub(crate) fn check_x(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!("x has {} entries, problem has n = {}", x.len(), self.n())));
        }
        Ok(())
    }

    /// `fᵢ(x)` for every quadratic constraint.
    pub fn quad_values_sparse(&self, nz: &[(usize, T)]) -> Vec<T> {
        self.quad_constraints.iter().map(|f| f.value_sparse(nz)).collect()
    }

    /// `bᵢ - ⟨aᵢ, x⟩` for every linear inequality (nonnegative when satisfied).
    pub fn linear_slacks_sparse(&self, nz: &[(usize, T)]) -> Vec<T> {
        (0..self.m())
            .map(|i| {
                let row = self.a.row(i);
                self.b[i] - nz.iter().fold(T::zero(), |acc, &(j, xj)| acc + row[j] * xj)
            })
            .collect()
    }

    /// `A_eq x - b_eq`.
    pub fn eq_residual_sparse(&self, nz: &[(usize, T)]) -> Vec<T> {
        (0..self.m_eq())
            .map(|i| {
                let row = self.a_eq.row(i);
                nz.iter().fold(T::zero(), |acc, &(j, xj)| acc + row[j] * xj) - self.b_eq[i]
            })
            .collect()
    }

    /// Largest violation over quadratic, linear, equality and box constraints.
    /// Sparsity is not included.
    pub fn max_violation(&self, x: &[T]) -> T {
        let nz = nonzeros(x);
        let mut worst = T::zero();
        for v in self.quad_values_sparse(&nz) {
            worst = worst.max(v);
        }
        for v in self.linear_slacks_sparse(&nz) {
            worst = worst.max(-v);
        }
        for v in self.eq_residual_sparse(&nz) {
            worst = worst.max(v.abs());
        }
        for (i, &xi) in x.iter().enumerate() {
            worst = worst.max(self.bounds.lower[i] - xi).max(xi - self.bounds.upper[i]);
        }
        worst
    }

    /// `(∇ₓL)_r` for the listed rows, given the nonzeros of `x`.
    pub(crate) fn lagrangian_gradient_rows(&self, y: &PrimalDualPoint<T>, nz: &[(usize, T)], rows: &[usize]) -> Vec<T> {
        rows.iter()
            .map(|&r| {
                let mut g = self.objective.gradient_entry(r, nz);
                for (f, &mu) in self.quad_constraints.iter().zip(&y.mu) {
                    if mu != T::zero() {
                        g += mu * f.gradient_entry(r, nz);
                    }
                }
                for (i, &lam) in y.lambda.iter().enumerate() {
                    g += lam * self.a[(i, r)];
                }
                for (i, &z) in y.zeta.iter().enumerate() {
                    g += z * self.a_eq[(i, r)];
                }
                g
            })
            .collect()
    }

    /// Full `∇ₓL`, given the nonzeros of `x`.
    pub(crate) fn lagrangian_gradient_sparse(&self, y: &PrimalDualPoint<T>, nz: &[(usize, T)]) -> Vec<T> {
        let mut g = self.objective.gradient_sparse(nz);
        for (f, &mu) in self.quad_constraints.iter().zip(&y.mu) {
            if mu != T::zero() {
                let gi = f.gradient_sparse(nz);
                axpy(mu, &gi, &mut g);
            }
        }
        for (i, &lam) in y.lambda.iter().enumerate() {
            if lam != T::zero() {
                axpy(lam, self.a.row(i), &mut g);
            }
        }
        for (i, &z) in y.zeta.iter().enumerate() {
            if z != T::zero() {
                axpy(z, self.a_eq.row(i), &mut g);
            }
        }
        g
    }

    /// `H_{r,c} = (Q₀ + Σ μᵢ Qᵢ)_{r,c}`.
    #[inline]
    pub(crate) fn hessian_entry(&self, mu: &[T], r: usize, c: usize) -> T {
        let mut h = self.objective.q_mat[(r, c)];
        for (f, &m) in self.quad_constraints.iter().zip(mu) {
            if m != T::zero() {
                h += m * f.q_mat[(r, c)];
            }
        }
        h
    }
}

/// `Y = (x, ν, μ, λ, ζ)`: primal vector with box, quadratic-constraint,
/// linear-inequality and equality multipliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint<T> {
    pub x: Vec<T>,
    pub nu: Vec<T>,
    pub mu: Vec<T>,
    pub lambda: Vec<T>,
    pub zeta: Vec<T>,
}

impl<T: Scalar> PrimalDualPoint<T> {
    pub fn zeros_for(p: &SqcqpProblem<T>) -> Self {
        Self {
            x: vec![T::zero(); p.n()],
            nu: vec![T::zero(); p.n()],
            mu: vec![T::zero(); p.k()],
            lambda: vec![T::zero(); p.m()],
            zeta: vec![T::zero(); p.m_eq()],
        }
    }

    /// Primal vector with zero multipliers.
    pub fn from_x(p: &SqcqpProblem<T>, x: Vec<T>) -> Self {
        Self { x, ..Self::zeros_for(p) }
    }

    pub fn check_dims(&self, p: &SqcqpProblem<T>) -> Result<()> {
        let checks = [
            ("x", self.x.len(), p.n()),
            ("nu", self.nu.len(), p.n()),
            ("mu", self.mu.len(), p.k()),
            ("lambda", self.lambda.len(), p.m()),
            ("zeta", self.zeta.len(), p.m_eq()),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::DimensionMismatch(format!("{name} has {got} entries, expected {want}")));
            }
        }
        Ok(())
    }

    /// `‖Y‖ = (‖x‖² + ‖ν‖² + ‖μ‖² + ‖λ‖² + ‖ζ‖²)^½`.
    pub fn norm(&self) -> T {
        [&self.x, &self.nu, &self.mu, &self.lambda, &self.zeta]
            .iter()
            .map(|v| dot(v, v))
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn cast<U: Scalar>(&self) -> PrimalDualPoint<U> {
        let v = |x: &[T]| x.iter().map(|&t| U::lit(t.to_f64_lossy())).collect::<Vec<U>>();
        PrimalDualPoint {
            x: v(&self.x),
            nu: v(&self.nu),
            mu: v(&self.mu),
            lambda: v(&self.lambda),
            zeta: v(&self.zeta),
        }
    }
}

/// `f₀(x)`.
pub fn eval_objective<T: Scalar>(p: &SqcqpProblem<T>, x: &[T]) -> Result<T> {
    p.check_x(x)?;
    Ok(p.objective.value(x))
}

/// `L(x, μ, λ, ζ)`; the box multiplier is not part of the Lagrangian.
pub fn lagrangian_value<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>) -> Result<T> {
    y.check_dims(p)?;
    let nz = nonzeros(&y.x);
    let mut l = p.objective.value_sparse(&nz);
    for (fi, &mu) in p.quad_values_sparse(&nz).iter().zip(&y.mu) {
        l += mu * *fi;
    }
    for (slack, &lam) in p.linear_slacks_sparse(&nz).iter().zip(&y.lambda) {
        l -= lam * *slack;
    }
    for (r, &z) in p.eq_residual_sparse(&nz).iter().zip(&y.zeta) {
        l += z * *r;
    }
    Ok(l)
}

/// `∇ₓL = Q₀x + q₀ + Σ μᵢ(Qᵢx + qᵢ) + Aᵀλ + A_eqᵀζ` (without `ν`).
pub fn lagrangian_gradient<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>) -> Result<Vec<T>> {
    y.check_dims(p)?;
    Ok(p.lagrangian_gradient_sparse(y, &nonzeros(&y.x)))
}

/// `∇²ₓₓL = Q₀ + Σ μᵢ Qᵢ`.
pub fn lagrangian_hessian<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>) -> Result<Matrix<T>> {
    y.check_dims(p)?;
    let mut h = p.objective.q_mat.clone();
    for (f, &mu) in p.quad_constraints.iter().zip(&y.mu) {
        if mu != T::zero() {
            for i in 0..h.rows() {
                axpy(mu, f.q_mat.row(i), h.row_mut(i));
            }
        }
    }
    Ok(h)
}

/// Explicit lower bound `ℓ / (u ‖Q₀‖₁ + ‖q₀‖∞)` on the admissible stationarity
/// constant for problems with only a box and a sparsity constraint.
pub fn tau_lower_bound<T: Scalar>(p: &SqcqpProblem<T>, ell: T, u: T) -> Result<T> {
    if p.k() > 0 || p.m() > 0 || p.m_eq() > 0 {
        return Err(Error::UnsupportedCase(format!(
            "tau lower bound needs k = m = m_eq = 0, got k = {}, m = {}, m_eq = {}",
            p.k(),
            p.m(),
            p.m_eq()
        )));
    }
    if !(ell > T::zero() && u > T::zero()) {
        return Err(Error::UnsupportedCase("ell and u must be positive".into()));
    }
    let q_inf = p.objective.q_vec.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let denom = u * p.objective.q_mat.norm1() + q_inf;
    if denom == T::zero() {
        return Err(Error::ZeroDenominator("Q0 = 0 and q0 = 0".into()));
    }
    Ok(ell / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn qf(rows: &[Vec<f64>], q: Vec<f64>, c: f64) -> QuadraticForm<f64> {
        QuadraticForm::new(Matrix::from_rows(rows).unwrap(), q, c).unwrap()
    }

    #[test]
    fn validate_accepts_simple_box() {
        let p = ProblemParts::new(qf(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0; 2], 0.0), 1)
            .with_bounds(BoxSet::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap())
            .build();
        assert!(p.is_ok());
    }

    #[test]
    fn validate_rejects_box_without_zero() {
        assert!(matches!(BoxSet::new(vec![0.5, -1.0], vec![1.0, 1.0]), Err(Error::BoxExcludesZero { index: 0, .. })));
    }

    #[test]
    fn validate_rejects_zero_sparsity() {
        let err = ProblemParts::new(QuadraticForm::<f64>::zero(2), 0).build().unwrap_err();
        assert!(matches!(err, Error::BadSparsityBound { s: 0, n: 2 }));
    }

    #[test]
    fn validate_rejects_mismatched_linear_block() {
        let err = ProblemParts::new(QuadraticForm::<f64>::zero(2), 1)
            .with_linear(Matrix::zeros(1, 3), vec![0.0])
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn construction_symmetrizes() {
        let f = qf(&[vec![1.0, 2.0], vec![0.0, 1.0]], vec![0.0; 2], 0.0);
        assert_eq!(f.q_mat().max_asymmetry(), 0.0);
        assert_eq!(f.q_mat()[(0, 1)], 1.0);
    }

    #[test]
    fn objective_values() {
        let p = ProblemParts::new(qf(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0; 2], 0.0), 1).build().unwrap();
        assert_eq!(eval_objective(&p, &[3.0, 4.0]).unwrap(), 12.5);
        let p = ProblemParts::new(qf(&[vec![2.0, 0.0], vec![0.0, 2.0]], vec![1.0, 0.0], 1.0), 1).build().unwrap();
        assert_eq!(eval_objective(&p, &[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(eval_objective(&p, &[0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(eval_objective(&p, &[0.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gradient_vanishes_at_analytic_minimizer() {
        let p = ProblemParts::new(qf(&[vec![1.0]], vec![-1.0], 0.0), 1).build().unwrap();
        let y = PrimalDualPoint::from_x(&p, vec![1.0]);
        assert_eq!(lagrangian_gradient(&p, &y).unwrap(), vec![0.0]);
    }

    #[test]
    fn gradient_includes_weighted_constraint() {
        // Q0 = 3, q0 = 1, f1 = x², mu = 0.5 at x = 2: 3*2 + 1 + 0.5 * 4 = 9.
        let p = ProblemParts::new(qf(&[vec![3.0]], vec![1.0], 0.0), 1)
            .with_quad_constraint(qf(&[vec![2.0]], vec![0.0], -1.0))
            .build()
            .unwrap();
        let mut y = PrimalDualPoint::from_x(&p, vec![2.0]);
        y.mu = vec![0.5];
        let g = lagrangian_gradient(&p, &y).unwrap();
        assert_eq!(g, vec![9.0]);
        // Central difference of L.
        let h = 1e-6;
        let mut yp = y.clone();
        yp.x[0] += h;
        let mut ym = y.clone();
        ym.x[0] -= h;
        let fd = (lagrangian_value(&p, &yp).unwrap() - lagrangian_value(&p, &ym).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, 9.0, max_relative = 1e-8);
    }

    #[test]
    fn hessian_adds_weighted_constraint_matrices() {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let p = ProblemParts::new(qf(&[vec![2.0, 1.0], vec![1.0, 3.0]], vec![0.0; 2], 0.0), 1)
            .with_quad_constraint(qf(&eye, vec![0.0; 2], -1.0))
            .build()
            .unwrap();
        let mut y = PrimalDualPoint::zeros_for(&p);
        assert_eq!(lagrangian_hessian(&p, &y).unwrap(), p.objective().q_mat().clone());
        y.mu = vec![2.0];
        let h = lagrangian_hessian(&p, &y).unwrap();
        assert_eq!(h, Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 5.0]]).unwrap());
    }

    #[test]
    fn tau_lower_bound_examples() {
        let p = ProblemParts::new(qf(&[vec![2.0, 0.0], vec![0.0, 2.0]], vec![1.0, 0.0], 0.0), 1).build().unwrap();
        assert_relative_eq!(tau_lower_bound(&p, 0.5, 1.0).unwrap(), 1.0 / 6.0);
        let p = ProblemParts::new(qf(&[vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 1.0], 0.0), 1).build().unwrap();
        assert_eq!(tau_lower_bound(&p, 1.0, 3.0).unwrap(), 1.0);
        let p = ProblemParts::new(QuadraticForm::<f64>::zero(2), 1).build().unwrap();
        assert!(matches!(tau_lower_bound(&p, 1.0, 1.0), Err(Error::ZeroDenominator(_))));
        let p = ProblemParts::new(qf(&[vec![1.0]], vec![0.0], 0.0), 1)
            .with_linear(Matrix::from_rows(&[vec![1.0]]).unwrap(), vec![1.0])
            .build()
            .unwrap();
        assert!(matches!(tau_lower_bound(&p, 1.0, 1.0), Err(Error::UnsupportedCase(_))));
    }
}
