//! Sparse canonical correlation analysis instances.

use rand::Rng;
use rand_distr::Normal;

use super::{gram, outer_gram, stream, InstanceBundle};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::init::{make_initial_point, InitStrategy};
use crate::linalg::Matrix;
use crate::problem::{PrimalDualPoint, ProblemParts, QuadraticForm, SqcqpProblem};

const NOISE_STD: f64 = 0.1;
/// Right-hand side of the joint variance constraint.
const VARIANCE_BUDGET: f64 = 2.0;

/// Default `τ` for synthetic instances, from the searched grid `{0.001, …, 0.01}`.
pub const SCCA_DEFAULT_TAU: f64 = 0.005;

/// `min −2⟨wˣ, Σˣʸ wʸ⟩ s.t. ⟨wˣ, Σˣˣ wˣ⟩ + ⟨wʸ, Σʸʸ wʸ⟩ ≤ 2, ‖w‖₀ ≤ s` over `w = (wˣ, wʸ)`.
pub(crate) fn scca_problem(
    sxx: &Matrix<f64>,
    syy: &Matrix<f64>,
    sxy: &Matrix<f64>,
    s: usize,
) -> Result<SqcqpProblem<f64>> {
    let (nx, ny) = (sxx.rows(), syy.rows());
    let n = nx + ny;
    let objective = Matrix::from_fn(n, n, |r, c| match (r < nx, c < nx) {
        (true, false) => -2.0 * sxy[(r, c - nx)],
        (false, true) => -2.0 * sxy[(c, r - nx)],
        _ => 0.0,
    });
    let variance = Matrix::from_fn(n, n, |r, c| match (r < nx, c < nx) {
        (true, true) => 2.0 * sxx[(r, c)],
        (false, false) => 2.0 * syy[(r - nx, c - nx)],
        _ => 0.0,
    });
    ProblemParts::new(QuadraticForm::new(objective, vec![0.0; n], 0.0)?, s)
        .with_quad_constraint(QuadraticForm::new(variance, vec![0.0; n], -VARIANCE_BUDGET)?)
        .build()
}

pub(crate) fn scca_bundle(
    x: &Matrix<f64>,
    y: &Matrix<f64>,
    s: usize,
    family: &str,
    seed: u64,
) -> Result<InstanceBundle> {
    let sxx = gram(&x.transpose());
    let syy = gram(&y.transpose());
    let sxy = outer_gram(x, y);
    let problem = scca_problem(&sxx, &syy, &sxy, s)?;
    let mut bundle = InstanceBundle::new(problem, family, seed, SCCA_DEFAULT_TAU)
        .with_param("n_x", x.rows())
        .with_param("n_y", y.rows())
        .with_param("samples", x.cols())
        .with_param("s", s);
    bundle.cca_split = Some(x.rows());
    Ok(bundle)
}

/// Dense canonical-correlation start: the relaxation point without the sparsity
/// constraint, with each block rescaled to unit variance `⟨w, Σw⟩ = 1`.
///
/// Rescaling matters because support selection ranks entries across both blocks; an
/// unbalanced start puts all `s` entries in one block, where the objective vanishes.
pub fn cca_initial_point(p: &SqcqpProblem<f64>, split: usize, config: &SolverConfig) -> Result<PrimalDualPoint<f64>> {
    if p.k() != 1 || split == 0 || split >= p.n() {
        return Err(Error::UnsupportedCase(format!(
            "not a canonical-correlation instance (k = {}, split = {split}, n = {})",
            p.k(),
            p.n()
        )));
    }
    let mut y = make_initial_point(p, &InitStrategy::Relaxation, config)?;
    let q1 = p.quad_constraints()[0].q_mat();
    for (lo, hi) in [(0, split), (split, p.n())] {
        let w = &y.x[lo..hi];
        let var: f64 =
            (lo..hi).map(|i| w[i - lo] * (lo..hi).map(|j| q1[(i, j)] * w[j - lo]).sum::<f64>()).sum::<f64>() * 0.5;
        if var > 0.0 {
            let scale = var.sqrt().recip();
            y.x[lo..hi].iter_mut().for_each(|v| *v *= scale);
        }
    }
    Ok(y)
}

/// Signal pattern `(1; −1; 0)` with blocks of length `block`, placed at the start
/// (`leading`) or the end of a length-`len` vector.
fn pattern(len: usize, block: usize, leading: bool) -> Vec<f64> {
    let mut v = vec![0.0; len];
    let start = if leading { 0 } else { len - 2 * block };
    v[start..start + block].fill(1.0);
    v[start + block..start + 2 * block].fill(-1.0);
    v
}

fn rank_one_data<R: Rng>(rng: &mut R, signal: &[f64], u: &[f64]) -> Matrix<f64> {
    let noise = Normal::new(0.0, NOISE_STD).expect("valid parameters");
    let col: Vec<f64> = signal.iter().map(|&a| a + rng.sample(noise)).collect();
    Matrix::from_fn(signal.len(), u.len(), |r, c| col[r] * u[c])
}

/// Rank-one synthetic data `X = ((1;−1;0) + ε)uᵀ`, `Y = ((0;1;−1) + ε')uᵀ`.
///
/// The x-side signal occupies the first `n_x/4` coordinates and the y-side signal
/// the last `2⌊n_y/8⌋` coordinates. Streams: 1 `ε`, 2 `ε'`, 3 `u`.
pub fn gen_scca_synthetic(n_x: usize, n_y: usize, samples: usize, s: usize, seed: u64) -> Result<InstanceBundle> {
    if n_x == 0 || !n_x.is_multiple_of(8) || n_y < 8 || samples == 0 || s == 0 || s > n_x + n_y {
        return Err(Error::BadDimensions(format!(
            "need n_x divisible by 8, n_y >= 8, N >= 1 and 1 <= s <= n_x + n_y; got n_x={n_x}, n_y={n_y}, N={samples}, s={s}"
        )));
    }
    let mut u_rng = stream(seed, 3);
    let u: Vec<f64> = (0..samples).map(|_| u_rng.sample(rand_distr::StandardNormal)).collect();
    let x = rank_one_data(&mut stream(seed, 1), &pattern(n_x, n_x / 8, true), &u);
    let y = rank_one_data(&mut stream(seed, 2), &pattern(n_y, n_y / 8, false), &u);
    scca_bundle(&x, &y, s, "scca-synth", seed)
}
