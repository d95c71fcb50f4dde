//! Sparse portfolio selection instances.

use rand::Rng;
use rand_distr::{Normal, Uniform};

use super::{gram, stream, InstanceBundle};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{BoxSet, ProblemParts, QuadraticForm};

const ENTRY_MAX: f64 = 0.01;
const RETURN_STD: f64 = 0.5;
/// Cap on the risk term `⟨x, Q₁x⟩`.
const RISK_CAP: f64 = 0.001;
/// Floor on the expected return `⟨a₁, x⟩`.
const RETURN_FLOOR: f64 = 0.002;
const WEIGHT_CAP: f64 = 0.3;

/// `min ⟨x, (DᵀD + Q₁)x⟩ s.t. ⟨x, Q₁x⟩ ≤ 0.001, ⟨a₁, x⟩ ≥ 0.002, ⟨1, x⟩ = 1, x ∈ [0, 0.3]ⁿ, ‖x‖₀ ≤ s`.
///
/// The stored quadratic forms carry a factor 2 so that `½xᵀQx` equals the inner products
/// above. Streams: 1 `D`, 2 diagonal of `Q₁`, 3 `a₁`.
pub fn gen_sps_synthetic(n: usize, s: usize, seed: u64) -> Result<InstanceBundle> {
    if n == 0 || !n.is_multiple_of(4) || s < 4 || s > n {
        return Err(Error::BadDimensions(format!(
            "need n divisible by 4 and 4 <= s <= n (weights capped at 0.3 on the simplex), got n={n}, s={s}"
        )));
    }
    let entry = Uniform::new(0.0, ENTRY_MAX).expect("valid range");
    let mut d_rng = stream(seed, 1);
    let dm = Matrix::from_fn(n / 4, n, |_, _| d_rng.sample(entry));
    let mut q1_rng = stream(seed, 2);
    let q1: Vec<f64> = (0..n).map(|_| q1_rng.sample(entry)).collect();
    let ret = Normal::new(0.0, RETURN_STD).expect("valid parameters");
    let mut a_rng = stream(seed, 3);
    let a1: Vec<f64> = (0..n).map(|_| a_rng.sample(ret)).collect();

    let mut q = gram(&dm);
    for i in 0..n {
        q[(i, i)] += q1[i];
    }
    let objective = QuadraticForm::new(q.scaled(2.0), vec![0.0; n], 0.0)?;
    let risk = QuadraticForm::new(Matrix::diagonal(&q1).scaled(2.0), vec![0.0; n], -RISK_CAP)?;
    let neg_a1 = a1.iter().map(|v| -v).collect();
    let problem = ProblemParts::new(objective, s)
        .with_quad_constraint(risk)
        .with_linear(Matrix::from_row_major(1, n, neg_a1)?, vec![-RETURN_FLOOR])
        .with_equality(Matrix::from_row_major(1, n, vec![1.0; n])?, vec![1.0])
        .with_bounds(BoxSet::uniform(n, 0.0, WEIGHT_CAP)?)
        .build()?;
    Ok(InstanceBundle::new(problem, "sps-synth", seed, 1.0).with_param("n", n).with_param("s", s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_rejections() {
        let b = gen_sps_synthetic(16, 5, 2).unwrap();
        let p = &b.problem;
        assert_eq!((p.k(), p.m(), p.m_eq()), (1, 1, 1));
        assert_eq!(p.b(), &[-RETURN_FLOOR]);
        assert_eq!(p.bounds().upper()[3], WEIGHT_CAP);
        assert!(gen_sps_synthetic(16, 3, 2).is_err());
        assert!(gen_sps_synthetic(18, 5, 2).is_err());
    }
}
