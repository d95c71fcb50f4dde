//! Planted-solution recovery instances.

use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::{gram, stream, InstanceBundle};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix};
use crate::problem::{BoxSet, ProblemParts, QuadraticForm, SqcqpProblem};

/// Feasibility the planted solution must meet at generation time.
const PLANTED_FEAS_TOL: f64 = 1e-9;
/// Ridge added to every `PᵢᵀPᵢ`.
const CONSTRAINT_RIDGE: f64 = 0.01;
/// Rejection bound for `x*` entries in the `[−2, 2]` box.
const BOX22_INNER: f64 = 1.99;

/// Box of a recovery instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxKind {
    Free,
    /// `[−2, 2]ⁿ`.
    Box22,
    /// `[0, ∞)ⁿ`.
    Nonneg,
}

impl BoxKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoxKind::Free => "free",
            BoxKind::Box22 => "box22",
            BoxKind::Nonneg => "nonneg",
        }
    }

    fn bounds(self, n: usize) -> BoxSet<f64> {
        match self {
            BoxKind::Free => BoxSet::free(n),
            BoxKind::Box22 => BoxSet::uniform(n, -2.0, 2.0).expect("contains zero"),
            BoxKind::Nonneg => BoxSet::uniform(n, 0.0, f64::INFINITY).expect("contains zero"),
        }
    }

    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            BoxKind::Free => rng.sample(StandardNormal),
            BoxKind::Box22 => loop {
                let v = rng.random_range(-2.0..2.0);
                if f64::abs(v) <= BOX22_INNER && v != 0.0 {
                    break v;
                }
            },
            BoxKind::Nonneg => loop {
                let v = rng.random_range(0.0..2.0);
                if v != 0.0 {
                    break v;
                }
            },
        }
    }
}

impl FromStr for BoxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(BoxKind::Free),
            "box22" => Ok(BoxKind::Box22),
            "nonneg" => Ok(BoxKind::Nonneg),
            other => Err(Error::BadDimensions(format!("unknown box kind {other:?} (free, box22, nonneg)"))),
        }
    }
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Matrix<f64> {
    let data = (0..rows * cols).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_row_major(rows, cols, data).expect("buffer size")
}

/// `½‖Dx − d‖²` as a quadratic form.
fn least_squares(dm: &Matrix<f64>, d: &[f64]) -> QuadraticForm<f64> {
    let q = dm.tr_mul_vec(d).into_iter().map(|v| -v).collect();
    QuadraticForm::new(gram(dm), q, 0.5 * dot(d, d)).expect("consistent sizes")
}

/// Sparse vector with `s` nonzeros at random positions, values from `draw`.
fn planted(n: usize, s: usize, seed: u64, mut draw: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> f64) -> Vec<f64> {
    let mut support = sample(&mut stream(seed, 1), n, s).into_vec();
    support.sort_unstable();
    let mut values = stream(seed, 2);
    let mut x = vec![0.0; n];
    for i in support {
        x[i] = draw(&mut values);
    }
    x
}

fn check_planted(p: &SqcqpProblem<f64>, x: &[f64]) {
    let viol = p.max_violation(x);
    assert!(viol <= PLANTED_FEAS_TOL, "planted solution violates the constraints by {viol:e}");
}

/// Noisy nonnegative least squares on the unit simplex.
///
/// Streams: 1 support, 2 `x*` values, 3 `D`, 4 noise. `snr_db = ∞` gives `d = Dx*`.
pub fn gen_recovery_simplex(n: usize, d: usize, s: usize, snr_db: f64, seed: u64) -> Result<InstanceBundle> {
    if d == 0 || s == 0 || s > n {
        return Err(Error::BadDimensions(format!("need d >= 1 and 1 <= s <= n, got n={n}, d={d}, s={s}")));
    }
    if snr_db.is_nan() {
        return Err(Error::BadDimensions("snr_db is NaN".into()));
    }
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let mut x_star = planted(n, s, seed, |r| loop {
        let v = unit.sample(r);
        if v != 0.0 {
            break v;
        }
    });
    let total: f64 = x_star.iter().sum();
    x_star.iter_mut().for_each(|v| *v /= total);

    let dm = gaussian_matrix(&mut stream(seed, 3), d, n, 1.0 / (d as f64).sqrt());
    let mut rhs = dm.mul_vec(&x_star);
    let mut nf = 0.0;
    if snr_db.is_finite() {
        let mut rng = stream(seed, 4);
        let eps: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        nf = norm2(&rhs) / (norm2(&eps) * 10f64.powf(snr_db / 20.0));
        rhs.iter_mut().zip(&eps).for_each(|(r, e)| *r += nf * e);
    }

    let problem = ProblemParts::new(least_squares(&dm, &rhs), s)
        .with_equality(Matrix::from_row_major(1, n, vec![1.0; n])?, vec![1.0])
        .with_bounds(BoxKind::Nonneg.bounds(n))
        .build()?;
    check_planted(&problem, &x_star);
    let tau = if n <= 1000 { 1.0 } else { 0.1 };
    let mut bundle = InstanceBundle::new(problem, "recovery-simplex", seed, tau)
        .with_param("n", n)
        .with_param("d", d)
        .with_param("s", s)
        .with_param("noise_factor", nf);
    if snr_db.is_finite() {
        bundle = bundle.with_param("snr_db", snr_db);
    }
    bundle.x_star = Some(x_star);
    Ok(bundle)
}

/// Least squares with `k` strongly convex quadratic and `m` linear constraints, half
/// of each family active at the planted solution. `D` is scaled by `1/√d` as in
/// [`gen_recovery_simplex`]; `d = Dx*` exactly.
///
/// Streams: 1 support, 2 `x*` values, 3 `D`, 4 all `Pᵢ` in order, 5 all `qᵢ`,
/// 6 `A`, 7 slack quadratic indices, 8 `ζ`, 9 slack linear indices, 10 `ξ`.
pub fn gen_recovery_qcqp(
    n: usize,
    d: usize,
    k: usize,
    m: usize,
    s: usize,
    box_kind: BoxKind,
    seed: u64,
) -> Result<InstanceBundle> {
    if n == 0 || d == 0 || s == 0 || s > n {
        return Err(Error::BadDimensions(format!("need n, d >= 1 and 1 <= s <= n, got n={n}, d={d}, s={s}")));
    }
    let x_star = planted(n, s, seed, |r| box_kind.draw(r));
    let support: Vec<(usize, f64)> = crate::problem::nonzeros(&x_star);

    let dm = gaussian_matrix(&mut stream(seed, 3), d, n, 1.0 / (d as f64).sqrt());
    let rhs = dm.mul_vec(&x_star);
    let mut parts = ProblemParts::new(least_squares(&dm, &rhs), s).with_bounds(box_kind.bounds(n));

    let slack_quad = slack_indices(seed, 7, k);
    let mut zeta = stream(seed, 8);
    let mut p_rng = stream(seed, 4);
    let mut q_rng = stream(seed, 5);
    for i in 0..k {
        let pm = gaussian_matrix(&mut p_rng, n, n, 1.0);
        let mut qm = gram(&pm);
        for j in 0..n {
            qm[(j, j)] += CONSTRAINT_RIDGE;
        }
        let q: Vec<f64> = (0..n).map(|_| q_rng.sample(StandardNormal)).collect();
        let form = QuadraticForm::new(qm, q, 0.0)?;
        let mut c = -form.value_sparse(&support);
        if slack_quad.contains(&i) {
            c -= zeta.random_range(0.0..1.0);
        }
        parts = parts.with_quad_constraint(QuadraticForm::new(form.q_mat().clone(), form.q_vec().to_vec(), c)?);
    }

    let slack_lin = slack_indices(seed, 9, m);
    let mut xi = stream(seed, 10);
    let a = gaussian_matrix(&mut stream(seed, 6), m, n, 1.0);
    let mut b = Vec::with_capacity(m);
    for i in 0..m {
        // Same summation order as the slack evaluation, so active rows are exactly tight.
        let mut bi = support.iter().fold(0.0, |acc, &(j, v)| acc + a[(i, j)] * v);
        if slack_lin.contains(&i) {
            bi += xi.random_range(0.0..1.0);
        }
        b.push(bi);
    }
    if m > 0 {
        parts = parts.with_linear(a, b);
    }

    let problem = parts.build()?;
    check_planted(&problem, &x_star);
    let mut bundle = InstanceBundle::new(problem, "recovery-qcqp", seed, 3.0)
        .with_param("n", n)
        .with_param("d", d)
        .with_param("k", k)
        .with_param("m", m)
        .with_param("s", s)
        .with_param("box", box_kind.as_str());
    bundle.x_star = Some(x_star);
    Ok(bundle)
}

/// Sorted random subset of `0..count` of size `⌈count/2⌉`.
fn slack_indices(seed: u64, id: u64, count: usize) -> Vec<usize> {
    let mut v = sample(&mut stream(seed, id), count, count.div_ceil(2)).into_vec();
    v.sort_unstable();
    v
}
