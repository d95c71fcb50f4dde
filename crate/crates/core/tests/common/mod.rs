//! Random instances and finite-difference helpers shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use snsqp::{
    apply_w, assemble_f, assemble_g, flatten_point, unflatten_point, BoxSet, Matrix, Point, Problem, ProblemParts,
    QuadraticForm, SupportSet,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| normal(rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxStyle {
    Free,
    /// Every coordinate bounded, `[-l, u]` with `l, u ∈ [0.5, 2]`.
    Finite,
    /// Free, half-line and finite coordinates mixed.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub n: usize,
    pub s: usize,
    pub k: usize,
    pub m: usize,
    pub m_eq: usize,
    pub convex: bool,
    pub bounds: BoxStyle,
}

/// Random instance with `0` strictly feasible for the inequalities.
pub fn random_problem(rng: &mut ChaCha8Rng, sh: &Shape) -> Problem {
    let n = sh.n;
    let q0 = if sh.convex {
        let m = gaussian(rng, n, n);
        let mut g = m.gram();
        for i in 0..n {
            g[(i, i)] += 0.1;
        }
        g
    } else {
        let m = gaussian(rng, n, n);
        Matrix::from_fn(n, n, |r, c| 0.5 * (m[(r, c)] + m[(c, r)]))
    };
    let f0 = QuadraticForm::new(q0, (0..n).map(|_| normal(rng)).collect(), 0.0).unwrap();
    let mut parts = ProblemParts::new(f0, sh.s);
    for _ in 0..sh.k {
        let p = gaussian(rng, n, n);
        let mut q = p.gram().scaled(0.2);
        for i in 0..n {
            q[(i, i)] += 0.01;
        }
        let c = -1.0 - rng.random_range(0.0..1.0);
        parts =
            parts.with_quad_constraint(QuadraticForm::new(q, (0..n).map(|_| 0.3 * normal(rng)).collect(), c).unwrap());
    }
    let a = gaussian(rng, sh.m, n);
    let b = (0..sh.m).map(|_| rng.random_range(0.5..1.5)).collect();
    let a_eq = gaussian(rng, sh.m_eq, n);
    let b_eq = (0..sh.m_eq).map(|_| 0.5 * normal(rng)).collect();
    let (lower, upper): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| match sh.bounds {
            BoxStyle::Free => (f64::NEG_INFINITY, f64::INFINITY),
            BoxStyle::Finite => (-rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)),
            BoxStyle::Mixed => match i % 3 {
                0 => (f64::NEG_INFINITY, f64::INFINITY),
                1 => (0.0, f64::INFINITY),
                _ => (-rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)),
            },
        })
        .unzip();
    parts.with_linear(a, b).with_equality(a_eq, b_eq).with_bounds(BoxSet::new(lower, upper).unwrap()).build().unwrap()
}

/// Dense random point with positive multipliers.
pub fn random_point(rng: &mut ChaCha8Rng, p: &Problem) -> Point {
    let mut y = Point::zeros_for(p);
    y.x.iter_mut().for_each(|v| *v = normal(rng));
    y.nu.iter_mut().for_each(|v| *v = normal(rng));
    y.mu.iter_mut().for_each(|v| *v = rng.random_range(0.1..1.0));
    y.lambda.iter_mut().for_each(|v| *v = rng.random_range(0.1..1.0));
    y.zeta.iter_mut().for_each(|v| *v = normal(rng));
    y
}

pub fn random_support(rng: &mut ChaCha8Rng, n: usize, s: usize) -> SupportSet {
    let mut idx = rand::seq::index::sample(rng, n, s).into_vec();
    idx.sort_unstable();
    SupportSet::new(idx, n).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Central difference of `F(·;T)` along `d` (flattened layout).
pub fn fd_directional(p: &Problem, y: &Point, t: &SupportSet, d: &[f64], h: f64) -> Vec<f64> {
    let base = flatten_point(y, t);
    let shifted = |sign: f64| {
        let v: Vec<f64> = base.iter().zip(d).map(|(b, di)| b + sign * h * di).collect();
        let yy = unflatten_point(p, t, &v).unwrap();
        assemble_f(p, &yy, t).unwrap().to_vec()
    };
    let (plus, minus) = (shifted(1.0), shifted(-1.0));
    plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// Relative mismatch `‖Wd − FD‖ / max(1, ‖Wd‖)` for a random direction.
pub fn w_fd_error(rng: &mut ChaCha8Rng, p: &Problem, y: &Point, t: &SupportSet) -> f64 {
    let d: Vec<f64> = (0..p.p_dim()).map(|_| normal(rng)).collect();
    let wd = apply_w(p, y, t, &d).unwrap();
    let fd = fd_directional(p, y, t, &d, 1e-6);
    let diff: Vec<f64> = wd.iter().zip(&fd).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(&wd).max(1.0)
}

/// Flattened position of each column of `G`, in the order `x_T, μ, λ, ν_T, ζ`.
pub fn g_column_positions(p: &Problem) -> Vec<usize> {
    let (n, s, k, m, e) = (p.n(), p.s(), p.k(), p.m(), p.m_eq());
    let mut cols: Vec<usize> = (0..s).collect();
    cols.extend((0..k).map(|i| 2 * n + i));
    cols.extend((0..m).map(|i| 2 * n + k + i));
    cols.extend((0..s).map(|i| n + i));
    cols.extend((0..e).map(|i| 2 * n + k + m + i));
    cols
}

/// Rows of `F` that form the `K` block, in the order `grad_T, proj, φ, ψ, eq`.
pub fn k_row_positions(p: &Problem) -> Vec<usize> {
    let (n, s, k, m, e) = (p.n(), p.s(), p.k(), p.m(), p.m_eq());
    let mut rows: Vec<usize> = (0..s).collect();
    rows.extend(n..n + s);
    rows.extend(2 * n..2 * n + k + m + e);
    rows
}

/// Largest relative mismatch between columns of `G` and central differences of `F`
/// along the matching unit directions, restricted to the `K` rows.
pub fn g_fd_error(p: &Problem, y: &Point, t: &SupportSet) -> f64 {
    let g = assemble_g(p, y, t).unwrap().g;
    let rows = k_row_positions(p);
    let mut worst: f64 = 0.0;
    for (j, &col) in g_column_positions(p).iter().enumerate() {
        let mut d = vec![0.0; p.p_dim()];
        d[col] = 1.0;
        let fd = fd_directional(p, y, t, &d, 1e-6);
        let fd_k: Vec<f64> = rows.iter().map(|&r| fd[r]).collect();
        let gj = g.column(j);
        let diff: Vec<f64> = gj.iter().zip(&fd_k).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff) / norm(&gj).max(1.0));
    }
    worst
}
