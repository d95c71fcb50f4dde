//! Sparse and box projections, the box-projection derivative and support selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{BoxSet, PrimalDualPoint, SqcqpProblem};
use crate::scalar::Scalar;

/// Two magnitudes closer than this are treated as tied when enumerating supports.
pub const TIE_TOL: f64 = 1e-12;

/// Strictly increasing index set `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Validates that `indices` is strictly increasing and bounded by `n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch(format!("support {indices:?} is not strictly increasing")));
        }
        if indices.last().is_some_and(|&i| i >= n) {
            return Err(Error::DimensionMismatch(format!("support {indices:?} exceeds n = {n}")));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// `T̄ = [n] \ T`, ascending.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n - self.indices.len());
        let mut it = self.indices.iter().peekable();
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }

    /// Position of each index in `T` (`Some(pos)`) or `None` for `T̄`.
    pub fn positions(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (pos, &i) in self.indices.iter().enumerate() {
            out[i] = Some(pos);
        }
        out
    }
}

/// Magnitude used for ranking; NaN ranks first so a broken iterate stays visible.
#[inline]
fn rank_key<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::infinity()
    } else {
        v.abs()
    }
}

/// Indices of the `s` largest `|u_i|` (ties to the smaller index), ascending.
pub fn top_s_indices<T: Scalar>(u: &[T], s: usize) -> Vec<usize> {
    let s = s.min(u.len());
    if s == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..u.len()).collect();
    let cmp =
        |&i: &usize, &j: &usize| rank_key(u[j]).partial_cmp(&rank_key(u[i])).unwrap_or(Ordering::Equal).then(i.cmp(&j));
    if s < idx.len() {
        idx.select_nth_unstable_by(s - 1, cmp);
        idx.truncate(s);
    }
    idx.sort_unstable();
    idx
}

/// `Π_S(x)`: keeps the `s` largest-magnitude entries of `x`.
pub fn project_sparse<T: Scalar>(x: &[T], s: usize) -> Result<Vec<T>> {
    if s < 1 || s > x.len() {
        return Err(Error::BadSparsityBound { s, n: x.len() });
    }
    let mut out = vec![T::zero(); x.len()];
    for i in top_s_indices(x, s) {
        out[i] = x[i];
    }
    Ok(out)
}

/// `Π_X(z)`, component-wise clamp.
pub fn project_box<T: Scalar>(z: &[T], bounds: &BoxSet<T>) -> Result<Vec<T>> {
    if z.len() != bounds.dim() {
        return Err(Error::DimensionMismatch(format!("vector has {} entries, box has {}", z.len(), bounds.dim())));
    }
    Ok(z.iter().enumerate().map(|(i, &zi)| bounds.clamp(i, zi)).collect())
}

/// Derivative element of the clamp at `z`: 1 strictly inside, 0 outside or on a bound.
#[inline]
pub fn box_derivative<T: Scalar>(z: T, lower: T, upper: T) -> T {
    if lower < z && z < upper {
        T::one()
    } else {
        T::zero()
    }
}

/// `u = x − τ(∇ₓL + ν)`, the vector whose top-`s` entries define `T_τ(Y)`.
pub fn support_scores<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, tau: T) -> Result<Vec<T>> {
    let g = crate::problem::lagrangian_gradient(p, y)?;
    Ok(scores_from_gradient(&y.x, &y.nu, &g, tau))
}

pub(crate) fn scores_from_gradient<T: Scalar>(x: &[T], nu: &[T], g: &[T], tau: T) -> Vec<T> {
    x.iter().zip(nu).zip(g).map(|((&xi, &ni), &gi)| xi - tau * (gi + ni)).collect()
}

/// An element of `T_τ(Y)`, chosen by the index tie rule.
pub fn select_support<T: Scalar>(p: &SqcqpProblem<T>, y: &PrimalDualPoint<T>, tau: T) -> Result<SupportSet> {
    let u = support_scores(p, y, tau)?;
    Ok(SupportSet { indices: top_s_indices(&u, p.s()) })
}

/// Supports returned by [`enumerate_supports`].
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFamily {
    pub sets: Vec<SupportSet>,
    /// More tied supports exist than the cap allowed.
    pub truncated: bool,
}

/// All top-`s` index sets of `u = x − τ(∇ₓL + ν)` under ties of width [`TIE_TOL`],
/// in lexicographic order, at most `cap` of them.
pub fn enumerate_supports<T: Scalar>(
    p: &SqcqpProblem<T>,
    y: &PrimalDualPoint<T>,
    tau: T,
    cap: usize,
) -> Result<SupportFamily> {
    let u = support_scores(p, y, tau)?;
    Ok(enumerate_top_sets(&u, p.s(), cap))
}

/// Tie-aware enumeration of top-`s` sets of `u`.
pub fn enumerate_top_sets<T: Scalar>(u: &[T], s: usize, cap: usize) -> SupportFamily {
    let s = s.min(u.len());
    if s == 0 || cap == 0 {
        return SupportFamily { sets: vec![SupportSet { indices: Vec::new() }], truncated: false };
    }
    let tol = T::lit(TIE_TOL);
    let top = top_s_indices(u, s);
    let threshold = top.iter().map(|&i| rank_key(u[i])).fold(T::infinity(), T::min);
    let mut sure = Vec::new();
    let mut tied = Vec::new();
    for (i, &ui) in u.iter().enumerate() {
        let a = rank_key(ui);
        if a >= threshold + tol {
            sure.push(i);
        } else if (a - threshold).abs() < tol {
            tied.push(i);
        }
    }
    let need = s - sure.len();
    let mut sets = Vec::new();
    let mut truncated = false;
    let mut combo: Vec<usize> = (0..need).collect();
    loop {
        if sets.len() == cap {
            truncated = true;
            break;
        }
        let mut indices: Vec<usize> = sure.iter().copied().chain(combo.iter().map(|&c| tied[c])).collect();
        indices.sort_unstable();
        sets.push(SupportSet { indices });
        if !next_combination(&mut combo, tied.len()) {
            break;
        }
    }
    SupportFamily { sets, truncated }
}

/// Advances `combo` to the next `combo.len()`-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if combo[i] < n - r + i {
            combo[i] += 1;
            for j in (i + 1)..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
