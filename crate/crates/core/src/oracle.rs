//! Brute-force reference solver for tiny instances: every support of size
//! `min(s, n)` is searched by nested grid refinement plus a penalized polish.
//!
//! Deliberately shares no code with the Newton solver beyond problem data access.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::SqcqpProblem;
use crate::projection::SupportSet;
use crate::scalar::Scalar;

/// Largest support the grid search accepts.
pub const MAX_SUPPORT: usize = 3;
/// Largest dimension accepted by [`brute_force_solve`].
pub const MAX_DIM: usize = 8;
/// Unbounded coordinates are searched inside `[-CAP, CAP]`.
pub const BOX_CAP: f64 = 10.0;
/// Constraint violation accepted as feasible.
pub const FEAS_TOL: f64 = 1e-6;
const GRID_INTERVALS: usize = 50;
const REFINE_LEVELS: usize = 2;
const REFINE_HALF_WIDTH: i64 = 10;
const POLISH_STEPS: usize = 200;
const POLISH_PENALTY: f64 = 1e4;

/// Result of [`restricted_solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedSolution<T> {
    pub x: Vec<T>,
    /// `f₀(x)`; `+∞` when infeasible.
    pub value: T,
    pub feasible: bool,
}

/// Per-support entry of an [`OracleResult`].
#[derive(Clone, Debug, PartialEq)]
pub struct SupportOutcome<T> {
    pub support: SupportSet,
    pub value: T,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T> {
    pub best_x: Vec<T>,
    /// `+∞` when no support admits a feasible grid point.
    pub best_value: T,
    pub best_support: Option<SupportSet>,
    pub per_support: Vec<SupportOutcome<T>>,
    pub tolerance: T,
}

impl<T: Scalar> OracleResult<T> {
    pub fn feasible(&self) -> bool {
        self.best_support.is_some()
    }
}

/// The problem restricted to coordinates `T` (all other coordinates fixed at zero).
struct Restricted<T> {
    r: usize,
    /// Quadratic forms as `(Q_TT row-major, q_T, c)`, objective first.
    forms: Vec<(Vec<T>, Vec<T>, T)>,
    a: Vec<Vec<T>>,
    b: Vec<T>,
    a_eq: Vec<Vec<T>>,
    b_eq: Vec<T>,
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Scalar> Restricted<T> {
    fn new(p: &SqcqpProblem<T>, idx: &[usize]) -> Self {
        let r = idx.len();
        let cap = T::lit(BOX_CAP);
        let forms = std::iter::once(p.objective())
            .chain(p.quad_constraints())
            .map(|f| {
                let mut q = Vec::with_capacity(r * r);
                for &i in idx {
                    for &j in idx {
                        q.push(f.q_mat()[(i, j)]);
                    }
                }
                (q, idx.iter().map(|&i| f.q_vec()[i]).collect(), f.constant())
            })
            .collect();
        let pick = |row: &[T]| idx.iter().map(|&i| row[i]).collect::<Vec<T>>();
        Self {
            r,
            forms,
            a: (0..p.m()).map(|i| pick(p.a().row(i))).collect(),
            b: p.b().to_vec(),
            a_eq: (0..p.m_eq()).map(|i| pick(p.a_eq().row(i))).collect(),
            b_eq: p.b_eq().to_vec(),
            lo: idx.iter().map(|&i| p.bounds().lower()[i].max(-cap)).collect(),
            hi: idx.iter().map(|&i| p.bounds().upper()[i].min(cap)).collect(),
        }
    }

    fn form_value(&self, which: usize, z: &[T]) -> T {
        let (q, lin, c) = &self.forms[which];
        let mut v = *c;
        for a in 0..self.r {
            let mut acc = T::zero();
            for b in 0..self.r {
                acc += q[a * self.r + b] * z[b];
            }
            v += T::lit(0.5) * z[a] * acc + lin[a] * z[a];
        }
        v
    }

    fn form_gradient(&self, which: usize, z: &[T]) -> Vec<T> {
        let (q, lin, _) = &self.forms[which];
        (0..self.r).map(|a| (0..self.r).fold(lin[a], |acc, b| acc + q[a * self.r + b] * z[b])).collect()
    }

    fn objective(&self, z: &[T]) -> T {
        self.form_value(0, z)
    }

    /// Signed violations: `fᵢ`, `⟨aᵢ,z⟩ − bᵢ` (positive part matters) and `|A_eq z − b_eq|`.
    fn violations(&self, z: &[T]) -> Vec<(T, Vec<T>)> {
        let dot = |row: &[T]| row.iter().zip(z).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        let mut out = Vec::new();
        for i in 1..self.forms.len() {
            let v = self.form_value(i, z);
            if v > T::zero() {
                out.push((v, self.form_gradient(i, z)));
            }
        }
        for (row, &bi) in self.a.iter().zip(&self.b) {
            let v = dot(row) - bi;
            if v > T::zero() {
                out.push((v, row.clone()));
            }
        }
        for (row, &bi) in self.a_eq.iter().zip(&self.b_eq) {
            let v = dot(row) - bi;
            if v != T::zero() {
                out.push((v, row.clone()));
            }
        }
        out
    }

    fn max_violation(&self, z: &[T]) -> T {
        self.violations(z).iter().fold(T::zero(), |acc, (v, _)| acc.max(v.abs()))
    }

    /// Best feasible point on the tensor grid `center + h·k`, `k ∈ [−w, w]ʳ`, clipped to the box.
    fn grid_search(&self, axes: &[Vec<T>], incumbent: &mut Option<(Vec<T>, T)>) {
        let tol = T::lit(FEAS_TOL);
        let mut counter = vec![0usize; self.r];
        let mut z = vec![T::zero(); self.r];
        loop {
            for a in 0..self.r {
                z[a] = axes[a][counter[a]];
            }
            if self.max_violation(&z) <= tol {
                let v = self.objective(&z);
                if incumbent.as_ref().is_none_or(|(_, best)| v < *best) {
                    *incumbent = Some((z.clone(), v));
                }
            }
            // Odometer increment.
            let mut a = 0;
            loop {
                if a == self.r {
                    return;
                }
                counter[a] += 1;
                if counter[a] < axes[a].len() {
                    break;
                }
                counter[a] = 0;
                a += 1;
            }
        }
    }

    fn penalized(&self, z: &[T]) -> (T, Vec<T>) {
        let w = T::lit(POLISH_PENALTY);
        let mut value = self.objective(z);
        let mut grad = self.form_gradient(0, z);
        for (v, g) in self.violations(z) {
            value += w * v * v;
            for (gi, &di) in grad.iter_mut().zip(&g) {
                *gi += T::lit(2.0) * w * v * di;
            }
        }
        (value, grad)
    }

    /// Projected gradient with backtracking on the penalized objective.
    fn polish(&self, start: &[T]) -> Vec<T> {
        let clamp = |a: usize, v: T| v.max(self.lo[a]).min(self.hi[a]);
        let mut z = start.to_vec();
        let (mut val, mut grad) = self.penalized(&z);
        let mut lip = T::one();
        for _ in 0..POLISH_STEPS {
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<T> = (0..self.r).map(|a| clamp(a, z[a] - grad[a] / lip)).collect();
                let (cv, cg) = self.penalized(&cand);
                let step_sq = cand.iter().zip(&z).fold(T::zero(), |acc, (&c, &zz)| acc + (c - zz) * (c - zz));
                let lin =
                    grad.iter().zip(cand.iter().zip(&z)).fold(T::zero(), |acc, (&g, (&c, &zz))| acc + g * (c - zz));
                if cv <= val + lin + T::lit(0.5) * lip * step_sq {
                    z = cand;
                    val = cv;
                    grad = cg;
                    accepted = true;
                    lip *= T::lit(0.5);
                    break;
                }
                lip *= T::lit(2.0);
            }
            if !accepted {
                break;
            }
        }
        z
    }
}

fn axis<T: Scalar>(lo: T, hi: T, center: T, h: T, half_width: i64) -> Vec<T> {
    let mut out: Vec<T> =
        (-half_width..=half_width).map(|k| center + h * T::lit(k as f64)).filter(|&v| v >= lo && v <= hi).collect();
    if out.is_empty() {
        out.push(center.max(lo).min(hi));
    }
    out
}

/// Minimizes `f₀` over `x_T ∈ X_T` (capped at `±10`), `x_T̄ = 0`, subject to all constraints.
pub fn restricted_solve<T: Scalar>(p: &SqcqpProblem<T>, t: &SupportSet) -> Result<RestrictedSolution<T>> {
    let idx = t.indices();
    if idx.len() > MAX_SUPPORT {
        return Err(Error::OracleScaleExceeded(format!(
            "support of size {} exceeds the oracle limit {MAX_SUPPORT}",
            idx.len()
        )));
    }
    if idx.last().is_some_and(|&i| i >= p.n()) {
        return Err(Error::DimensionMismatch(format!("support {idx:?} exceeds n = {}", p.n())));
    }
    let rp = Restricted::new(p, idx);
    let r = idx.len();

    let mut incumbent: Option<(Vec<T>, T)> = None;
    let intervals = T::lit(GRID_INTERVALS as f64);
    let axes: Vec<Vec<T>> = (0..r)
        .map(|a| {
            let h = (rp.hi[a] - rp.lo[a]) / intervals;
            (0..=GRID_INTERVALS)
                .map(|k| if k == GRID_INTERVALS { rp.hi[a] } else { rp.lo[a] + h * T::lit(k as f64) })
                .collect()
        })
        .collect();
    rp.grid_search(&axes, &mut incumbent);
    let mut spacing: Vec<T> = (0..r).map(|a| (rp.hi[a] - rp.lo[a]) / intervals).collect();
    for _ in 0..REFINE_LEVELS {
        let Some((center, _)) = incumbent.clone() else {
            break;
        };
        spacing.iter_mut().for_each(|h| *h /= T::lit(10.0));
        let axes: Vec<Vec<T>> =
            (0..r).map(|a| axis(rp.lo[a], rp.hi[a], center[a], spacing[a], REFINE_HALF_WIDTH)).collect();
        rp.grid_search(&axes, &mut incumbent);
    }

    let mut x = vec![T::zero(); p.n()];
    let Some((mut best, mut value)) = incumbent else {
        return Ok(RestrictedSolution { x, value: T::infinity(), feasible: false });
    };
    if r > 0 {
        let polished = rp.polish(&best);
        if rp.max_violation(&polished) <= T::lit(FEAS_TOL) && rp.objective(&polished) < value {
            value = rp.objective(&polished);
            best = polished;
        }
    }
    for (a, &i) in idx.iter().enumerate() {
        x[i] = best[a];
    }
    Ok(RestrictedSolution { x, value, feasible: true })
}

/// Global search over every support of size `min(s, n)`; smaller supports are
/// covered because grid points may vanish on some coordinates.
pub fn brute_force_solve<T: Scalar>(p: &SqcqpProblem<T>) -> Result<OracleResult<T>> {
    if p.n() > MAX_DIM || p.s() > MAX_SUPPORT {
        return Err(Error::OracleScaleExceeded(format!(
            "n = {}, s = {} exceeds the oracle limits n <= {MAX_DIM}, s <= {MAX_SUPPORT}",
            p.n(),
            p.s()
        )));
    }
    let size = p.s().min(p.n());
    let supports = all_subsets(p.n(), size);
    let solved: Vec<(SupportSet, RestrictedSolution<T>)> = supports
        .into_par_iter()
        .map(|idx| {
            let t = SupportSet::new(idx, p.n())?;
            let sol = restricted_solve(p, &t)?;
            Ok((t, sol))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, T)> = None;
    for (i, (_, sol)) in solved.iter().enumerate() {
        if sol.feasible && best.is_none_or(|(_, v)| sol.value < v) {
            best = Some((i, sol.value));
        }
    }
    let (best_x, best_value, best_support) = match best {
        Some((i, v)) => (solved[i].1.x.clone(), v, Some(solved[i].0.clone())),
        None => (vec![T::zero(); p.n()], T::infinity(), None),
    };
    Ok(OracleResult {
        best_x,
        best_value,
        best_support,
        per_support: solved
            .into_iter()
            .map(|(support, sol)| SupportOutcome { support, value: sol.value, feasible: sol.feasible })
            .collect(),
        tolerance: T::lit(FEAS_TOL),
    })
}

fn all_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..r).collect();
    loop {
        out.push(combo.clone());
        let mut i = r;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if combo[i] < n - r + i {
                combo[i] += 1;
                for j in (i + 1)..r {
                    combo[j] = combo[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}
