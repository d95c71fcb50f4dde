//! Fischer–Burmeister function and its generalized-derivative coefficients.

use crate::error::Result;
use crate::problem::{nonzeros, SqcqpProblem};
use crate::scalar::Scalar;

/// Radius below which `(a, b)` is treated as the origin.
const ORIGIN_GUARD: f64 = 1e-14;

/// `(u, v)` with `∂φ/∂a = -u`, `∂φ/∂b = v`; always inside the unit ball around `(1, -1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FbCoefficients<T> {
    pub u: T,
    pub v: T,
}

/// `φ(a, b) = √(a² + b²) − a − b`.
#[inline]
pub fn fb_phi<T: Scalar>(a: T, b: T) -> T {
    a.hypot(b) - a - b
}

/// Element of the generalized derivative of `φ`, written so that the row of
/// `φ(−f(x), μ)` is `u ∇f(x)ᵀ` in `x` and `v` in `μ`.
#[inline]
pub fn fb_coefficients<T: Scalar>(a: T, b: T) -> FbCoefficients<T> {
    let r = a.hypot(b);
    if r < T::lit(ORIGIN_GUARD) {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        return FbCoefficients { u: T::one() - h, v: h - T::one() };
    }
    FbCoefficients { u: T::one() - a / r, v: b / r - T::one() }
}

/// `φ(−fᵢ(x), μᵢ)` for every quadratic constraint.
pub fn phi_vec<T: Scalar>(p: &SqcqpProblem<T>, x: &[T], mu: &[T]) -> Result<Vec<T>> {
    p.check_x(x)?;
    check_len("mu", mu.len(), p.k())?;
    let f = p.quad_values_sparse(&nonzeros(x));
    Ok(f.iter().zip(mu).map(|(&fi, &m)| fb_phi(-fi, m)).collect())
}

/// `φ(bᵢ − ⟨aᵢ, x⟩, λᵢ)` for every linear inequality.
pub fn psi_vec<T: Scalar>(p: &SqcqpProblem<T>, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
    p.check_x(x)?;
    check_len("lambda", lambda.len(), p.m())?;
    let slack = p.linear_slacks_sparse(&nonzeros(x));
    Ok(slack.iter().zip(lambda).map(|(&sl, &l)| fb_phi(sl, l)).collect())
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(crate::error::Error::DimensionMismatch(format!("{name} has {got} entries, expected {want}")));
    }
    Ok(())
}
