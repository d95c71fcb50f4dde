//! Starting points.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT, Uniform, Weibull};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2};
use crate::problem::{PrimalDualPoint, SqcqpProblem};
use crate::projection::project_sparse;
use crate::scalar::Scalar;

const MULTIPLIER_START: f64 = 0.01;
const RELAX_ITERS: usize = 500;
/// Penalty weight relative to `max(‖Q₀‖, 1)`.
const RELAX_PENALTY_FACTOR: f64 = 100.0;
/// Scale of the random start of the relaxation (zero is a saddle for indefinite objectives).
const RELAX_START_SCALE: f64 = 1e-3;

/// How `x⁰` is built.
#[derive(Clone, Debug, PartialEq)]
pub enum InitStrategy<T> {
    Zeros,
    /// `s` random coordinates set to `value`.
    SparseUniform {
        value: f64,
    },
    /// Dense `U[0, 1]` entries.
    DenseUniform,
    /// Dense `N(0, 1)` entries.
    DenseGaussian,
    /// Dense Weibull entries, scale 2, shape 1.5.
    DenseWeibull,
    /// Dense Student-t entries with 10 degrees of freedom.
    DenseStudentT,
    /// Penalized projected-gradient solve without the sparsity constraint, then
    /// the `s` largest magnitudes are kept.
    TruncatedRelaxation,
    /// The relaxation point itself, without truncation.
    Relaxation,
    Given(Vec<T>),
}

/// `Y⁰ = (x⁰, 0, 0.01·1, 0.01·1, 0)`. Random choices use `config.seed`.
pub fn make_initial_point<T: Scalar>(
    p: &SqcqpProblem<T>,
    strategy: &InitStrategy<T>,
    config: &SolverConfig,
) -> Result<PrimalDualPoint<T>> {
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dense = |rng: &mut ChaCha8Rng, d: &dyn Fn(&mut ChaCha8Rng) -> f64| -> Vec<T> {
        (0..n).map(|_| T::lit(d(rng))).collect()
    };
    let x = match strategy {
        InitStrategy::Zeros => vec![T::zero(); n],
        InitStrategy::SparseUniform { value } => {
            if !value.is_finite() {
                return Err(Error::InvalidStrategy(format!("sparse start value {value} is not finite")));
            }
            let mut x = vec![T::zero(); n];
            for i in sample(&mut rng, n, p.s()) {
                x[i] = T::lit(*value);
            }
            x
        }
        InitStrategy::DenseUniform => {
            let d = Uniform::new(0.0, 1.0).expect("valid range");
            dense(&mut rng, &|r| d.sample(r))
        }
        InitStrategy::DenseGaussian => {
            let d = Normal::new(0.0, 1.0).expect("valid parameters");
            dense(&mut rng, &|r| d.sample(r))
        }
        InitStrategy::DenseWeibull => {
            let d = Weibull::new(2.0, 1.5).expect("valid parameters");
            dense(&mut rng, &|r| d.sample(r))
        }
        InitStrategy::DenseStudentT => {
            let d = StudentT::new(10.0).expect("valid parameters");
            dense(&mut rng, &|r| d.sample(r))
        }
        InitStrategy::TruncatedRelaxation => {
            let relaxed = relaxation_solve(p, &mut rng);
            project_sparse(&relaxed, p.s())?
        }
        InitStrategy::Relaxation => relaxation_solve(p, &mut rng),
        InitStrategy::Given(x) => {
            if x.len() != n {
                return Err(Error::InvalidStrategy(format!(
                    "given start has {} entries, problem has n = {n}",
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidStrategy("given start has non-finite entries".into()));
            }
            x.clone()
        }
    };
    let mut y = PrimalDualPoint::from_x(p, x);
    y.mu.fill(T::lit(MULTIPLIER_START));
    y.lambda.fill(T::lit(MULTIPLIER_START));
    Ok(y)
}

/// `f₀ + (ρ/2)(Σ max(fᵢ, 0)² + Σ max(⟨aᵢ,x⟩ − bᵢ, 0)² + ‖A_eq x − b_eq‖²)` and its gradient.
fn penalized<T: Scalar>(p: &SqcqpProblem<T>, rho: T, x: &[T]) -> (T, Vec<T>) {
    let half = T::lit(0.5);
    let qx = p.objective().q_mat().mul_vec(x);
    let mut value = half * dot(x, &qx) + dot(p.objective().q_vec(), x) + p.objective().constant();
    let mut grad: Vec<T> = qx.iter().zip(p.objective().q_vec()).map(|(&a, &b)| a + b).collect();
    for f in p.quad_constraints() {
        let qx = f.q_mat().mul_vec(x);
        let fi = half * dot(x, &qx) + dot(f.q_vec(), x) + f.constant();
        if fi > T::zero() {
            value += half * rho * fi * fi;
            let gi: Vec<T> = qx.iter().zip(f.q_vec()).map(|(&a, &b)| a + b).collect();
            axpy(rho * fi, &gi, &mut grad);
        }
    }
    for r in 0..p.m() {
        let v = dot(p.a().row(r), x) - p.b()[r];
        if v > T::zero() {
            value += half * rho * v * v;
            axpy(rho * v, p.a().row(r), &mut grad);
        }
    }
    for e in 0..p.m_eq() {
        let v = dot(p.a_eq().row(e), x) - p.b_eq()[e];
        value += half * rho * v * v;
        axpy(rho * v, p.a_eq().row(e), &mut grad);
    }
    (value, grad)
}

/// Projected gradient on the penalized problem over the box, with backtracking on
/// the Lipschitz estimate starting from the power-iteration estimate of `‖Q₀‖`.
fn relaxation_solve<T: Scalar, R: Rng>(p: &SqcqpProblem<T>, rng: &mut R) -> Vec<T> {
    let n = p.n();
    let q_norm = p.objective().q_mat().spectral_norm_estimate(50);
    let mut lip = q_norm.max(T::lit(1e-12));
    let rho = T::lit(RELAX_PENALTY_FACTOR) * q_norm.max(T::one());
    let start = Normal::new(0.0, RELAX_START_SCALE).expect("valid parameters");
    let mut x: Vec<T> = (0..n).map(|i| p.bounds().clamp(i, T::lit(start.sample(rng)))).collect();
    let (mut value, mut grad) = penalized(p, rho, &x);
    for _ in 0..RELAX_ITERS {
        loop {
            let cand: Vec<T> = (0..n).map(|i| p.bounds().clamp(i, x[i] - grad[i] / lip)).collect();
            let step: Vec<T> = cand.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            let (cv, cg) = penalized(p, rho, &cand);
            let model = value + dot(&grad, &step) + T::lit(0.5) * lip * dot(&step, &step);
            if cv <= model {
                x = cand;
                value = cv;
                grad = cg;
                break;
            }
            lip *= T::lit(2.0);
            if !lip.is_finite() {
                return x;
            }
        }
        if norm2(&grad) == T::zero() {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::problem::{l0_norm, ProblemParts, QuadraticForm};

    fn shifted_norm() -> SqcqpProblem<f64> {
        let f0 = QuadraticForm::new(Matrix::identity(2), vec![-2.0, -1.0], 2.5).unwrap();
        ProblemParts::new(f0, 1).build().unwrap()
    }

    #[test]
    fn zeros_and_multipliers() {
        let f0 = QuadraticForm::new(Matrix::identity(2), vec![0.0; 2], 0.0).unwrap();
        let f1 = QuadraticForm::new(Matrix::identity(2), vec![0.0; 2], -1.0).unwrap();
        let p = ProblemParts::new(f0, 1).with_quad_constraint(f1).build().unwrap();
        let y = make_initial_point(&p, &InitStrategy::Zeros, &SolverConfig::default()).unwrap();
        assert_eq!(l0_norm(&y.x), 0);
        assert_eq!(y.mu, vec![0.01]);
        assert_eq!(y.nu, vec![0.0; 2]);
    }

    #[test]
    fn sparse_uniform_is_deterministic() {
        let f0 = QuadraticForm::<f64>::zero(20);
        let p = ProblemParts::new(f0, 4).build().unwrap();
        let cfg = SolverConfig::default().with_seed(7);
        let s = InitStrategy::SparseUniform { value: 0.1 };
        let a = make_initial_point(&p, &s, &cfg).unwrap();
        let b = make_initial_point(&p, &s, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(l0_norm(&a.x), 4);
        assert!(a.x.iter().all(|&v| v == 0.0 || v == 0.1));
    }

    #[test]
    fn truncated_relaxation_keeps_leading_entry() {
        let p = shifted_norm();
        let y = make_initial_point(&p, &InitStrategy::TruncatedRelaxation, &SolverConfig::default()).unwrap();
        assert!((y.x[0] - 2.0).abs() < 1e-9, "{:?}", y.x);
        assert_eq!(y.x[1], 0.0);
    }

    #[test]
    fn given_length_is_checked() {
        let p = shifted_norm();
        let err = make_initial_point(&p, &InitStrategy::Given(vec![1.0]), &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidStrategy(_)));
    }
}
