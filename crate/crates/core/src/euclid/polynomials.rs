//! d-polynomials: `Pol_k = {ψ : Q^b ψ = 0, (Q^w)^{k+1} ψ = 0}`.
//!
//! On a solution of `Q^b ψ = 0` the shift `t₂` acts as `−(1 + t₁)`, which
//! turns `Q^w` into `t₁⁻¹ (t₁² + t₁ + 1) / (1 + t₁)`. Every row (and, by the
//! `m ↔ n` symmetry, every column) of an element of `Pol_k` therefore obeys
//! the linear recurrence with characteristic polynomial `(x² + x + 1)^{k+1}`.
//! Its constant term is 1, so the recurrence runs in both directions, and an
//! element is fixed by the `2k+2` values on the bottom edge of `T_k`.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use super::{canonical_triangle, qb_apply, qw_power, EuclidError, LatticeFunction, LatticePoint, Result};
use crate::linalg::{normalize, RowEchelon, SparseVec};
use crate::scalar::{q, Field, Q};

/// Coefficients `c_0 … c_{2k+2}` of `(x² + x + 1)^{k+1}` (`c_j` for `x^j`).
pub fn recurrence(k: usize) -> Vec<i64> {
    let mut c = vec![1i64];
    for _ in 0..=k {
        let mut next = vec![0i64; c.len() + 2];
        for (j, v) in c.iter().enumerate() {
            next[j] += v;
            next[j + 1] += v;
            next[j + 2] += v;
        }
        c = next;
    }
    c
}

/// Extends `init` (length `2k+2`) to `len` terms of the row recurrence.
pub fn extend_sequence(init: &[Q], k: usize, len: usize) -> Vec<Q> {
    let c = recurrence(k);
    let d = c.len() - 1;
    let mut a = init.to_vec();
    while a.len() < len {
        let j = a.len() - d;
        let s = (0..d).fold(q(0), |acc, i| acc + q(c[i]) * &a[j + i]);
        a.push(-s);
    }
    a
}

/// An element of `Pol_k`, stored by its values on the bottom edge of `T_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolElement {
    pub k: usize,
    pub anchor: LatticePoint,
    pub bottom: Vec<Q>,
}

impl PolElement {
    pub fn new(k: usize, anchor: LatticePoint, bottom: Vec<Q>) -> Self {
        assert_eq!(bottom.len(), 2 * k + 2, "bottom edge of T_k has 2k+2 points");
        Self { k, anchor, bottom }
    }

    /// Values on the rectangle `[mlo, mhi] × [nlo, nhi]`.
    pub fn eval_rect(&self, (mlo, mhi): (i64, i64), (nlo, nhi): (i64, i64)) -> LatticeFunction<Q> {
        let c: Vec<Q> = recurrence(self.k).into_iter().map(q).collect();
        let d = c.len() - 1;
        let (m0, n0) = self.anchor;
        let a = mlo.min(m0);
        let top = nhi.max(n0 + d as i64 - 1);
        let right = mhi.max(m0 + d as i64 - 1);
        let b = right + (top - n0);
        let mut v: HashMap<LatticePoint, Q> = HashMap::new();

        // bottom row, both directions
        for (i, x) in self.bottom.iter().enumerate() {
            v.insert((m0 + i as i64, n0), x.clone());
        }
        for m in m0 + d as i64..=b {
            let s = (0..d).fold(q(0), |acc, i| acc + c[i].clone() * &v[&(m - d as i64 + i as i64, n0)]);
            v.insert((m, n0), -s);
        }
        for m in (a..m0).rev() {
            let s = (1..=d).fold(q(0), |acc, j| acc + c[j].clone() * &v[&(m + j as i64, n0)]);
            v.insert((m, n0), -s);
        }
        // upward: ψ(m, n+1) = −ψ(m, n) − ψ(m+1, n)
        for n in n0..top {
            for m in a..b - (n - n0) {
                let x = -(v[&(m, n)].clone() + &v[&(m + 1, n)]);
                v.insert((m, n + 1), x);
            }
        }
        if nlo < n0 {
            // column m0 downward by the column recurrence
            for n in (nlo..n0).rev() {
                let s = (1..=d).fold(q(0), |acc, j| acc + c[j].clone() * &v[&(m0, n + j as i64)]);
                v.insert((m0, n), -s);
            }
            // right of the column: ψ(m+1, n) = −ψ(m, n) − ψ(m, n+1)
            for n in (nlo..n0).rev() {
                for m in m0..right {
                    let x = -(v[&(m, n)].clone() + &v[&(m, n + 1)]);
                    v.insert((m + 1, n), x);
                }
            }
            // lower-left quadrant: ψ(m, n) = −ψ(m+1, n) − ψ(m, n+1)
            for n in (nlo..n0).rev() {
                for m in (a..m0).rev() {
                    let x = -(v[&(m + 1, n)].clone() + &v[&(m, n + 1)]);
                    v.insert((m, n), x);
                }
            }
        }
        let mut out = LatticeFunction::default();
        for m in mlo..=mhi {
            for n in nlo..=nhi {
                out.values.insert((m, n), v[&(m, n)].clone());
            }
        }
        out
    }

    pub fn eval_points(&self, points: impl IntoIterator<Item = LatticePoint>) -> LatticeFunction<Q> {
        let pts: Vec<LatticePoint> = points.into_iter().collect();
        if pts.is_empty() {
            return LatticeFunction::default();
        }
        let mlo = pts.iter().map(|p| p.0).min().unwrap();
        let mhi = pts.iter().map(|p| p.0).max().unwrap();
        let nlo = pts.iter().map(|p| p.1).min().unwrap();
        let nhi = pts.iter().map(|p| p.1).max().unwrap();
        self.eval_rect((mlo, mhi), (nlo, nhi)).restrict(pts)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.k, self.anchor), (other.k, other.anchor));
        Self {
            k: self.k,
            anchor: self.anchor,
            bottom: self.bottom.iter().zip(&other.bottom).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self { k: self.k, anchor: self.anchor, bottom: self.bottom.iter().map(|a| a.clone() * s).collect() }
    }
}

/// The `2k+2` elements with unit bottom-edge data on `T_k`.
pub fn unit_basis(k: usize, anchor: LatticePoint) -> Vec<PolElement> {
    (0..2 * k + 2)
        .map(|i| PolElement::new(k, anchor, (0..2 * k + 2).map(|j| q((i == j) as i64)).collect()))
        .collect()
}

/// Basis of `Pol_k` restricted to a rectangular window.
pub fn pol_space_basis(
    k: usize,
    anchor: LatticePoint,
    mrange: (i64, i64),
    nrange: (i64, i64),
) -> Vec<LatticeFunction<Q>> {
    unit_basis(k, anchor).iter().map(|p| p.eval_rect(mrange, nrange)).collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Exact dimension of `Pol_k` on the triangular window
/// `{m, n ≥ 0, m + n ≤ L − 1}`.
#[derive(Debug, Clone, Serialize)]
pub struct PolDimension {
    pub k: usize,
    pub window: usize,
    pub unknowns: usize,
    pub constraints: usize,
    /// Independent solutions exhibited from the recurrence.
    pub lower_bound: usize,
    pub rank: usize,
    pub dimension: usize,
    pub early_stop: bool,
}

/// Unknowns are the window's bottom row, which parametrizes all solutions
/// of `Q^b ψ = 0` on the window. Constraints are `(Q^w)^{k+1} ψ = 0` wherever
/// the stencil fits. With `early_stop`, elimination ends as soon as the rank
/// meets the bound implied by the exhibited solutions.
pub fn pol_dimension(k: usize, window: usize, early_stop: bool) -> PolDimension {
    let l = window;
    // ψ(m, n) = (−1)^n Σ_i C(n, i) u_{m+i}
    let form = |m: usize, n: usize| -> SparseVec<Q> {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        (0..=n).map(|i| (m + i, Q::from_integer(binomial(n, i) * sign))).collect()
    };
    let kk = k + 1;
    let mut stencil = Vec::new();
    for i in 0..=kk {
        for j in 0..=kk - i {
            // multinomial (k+1)! / (i! j! (k+1−i−j)!)
            stencil.push((i, j, binomial(kk, i) * binomial(kk - i, j)));
        }
    }
    let mut rows = Vec::new();
    for n in kk..l {
        for m in kk..l {
            if m + n > l - 1 {
                continue;
            }
            let entries = stencil.iter().flat_map(|(i, j, c)| {
                let c = Q::from_integer(c.clone());
                form(m - i, n - j).into_iter().map(move |(col, v)| (col, v * &c))
            });
            rows.push(normalize(entries));
        }
    }
    let target_dim = 2 * k + 2;
    let solutions: Vec<Vec<Q>> = (0..target_dim)
        .map(|i| extend_sequence(&(0..target_dim).map(|j| q((i == j) as i64)).collect::<Vec<_>>(), k, l))
        .collect();
    let lower_bound = if l >= target_dim
        && solutions.iter().all(|s| rows.iter().all(|r| r.iter().fold(q(0), |a, (c, v)| a + v * &s[*c]).is_zero()))
    {
        target_dim
    } else {
        0
    };
    let mut ech = RowEchelon::new(l);
    let mut stopped = false;
    for r in &rows {
        if early_stop && lower_bound > 0 && ech.rank() + lower_bound == l {
            stopped = true;
            break;
        }
        ech.insert(r.clone());
    }
    PolDimension {
        k,
        window: l,
        unknowns: l,
        constraints: rows.len(),
        lower_bound,
        rank: ech.rank(),
        dimension: l - ech.rank(),
        early_stop: stopped,
    }
}

/// Default window for [`pol_dimension`]; stability is checked by comparing
/// with a window six points larger.
pub fn default_window(k: usize) -> usize {
    4 * k + 8
}

#[derive(Debug, Clone, Serialize)]
pub struct StableDimension {
    pub k: usize,
    pub dimension: usize,
    pub stable: bool,
    pub runs: Vec<PolDimension>,
}

/// Dimension of `Pol_k` with a window-stability check.
pub fn pol_dimension_stable(k: usize) -> Result<StableDimension> {
    let small = pol_dimension(k, default_window(k), true);
    let large = pol_dimension(k, default_window(k) + 6, true);
    let stable = small.dimension == large.dimension && small.lower_bound == small.dimension;
    if !stable {
        return Err(EuclidError::WindowTooSmall(format!(
            "k = {k}: dimension {} on window {} vs {} on window {}",
            small.dimension, small.window, large.dimension, large.window
        )));
    }
    Ok(StableDimension { k, dimension: large.dimension, stable, runs: vec![small, large] })
}

/// Values on `T_k` that vanish except along one boundary edge. Edges are
/// traversed counter-clockwise (bottom, hypotenuse, left), each alternating
/// `+1, −1, …` from its starting corner.
pub fn edge_data(k: usize, anchor: LatticePoint, edge: usize) -> LatticeFunction<Q> {
    let side = 2 * k as i64 + 1;
    let (m0, n0) = anchor;
    let mut f: LatticeFunction<Q> = canonical_triangle(k, anchor).into_iter().map(|p| (p, q(0))).collect();
    for j in 0..=side {
        let p = match edge {
            0 => (m0 + j, n0),
            1 => (m0 + side - j, n0 + j),
            _ => (m0, n0 + side - j),
        };
        f.values.insert(p, q(if j % 2 == 0 { 1 } else { -1 }));
    }
    f
}

fn bottom_row(f: &LatticeFunction<Q>, k: usize, (m0, n0): LatticePoint) -> Result<Vec<Q>> {
    (0..2 * k as i64 + 2)
        .map(|i| f.get((m0 + i, n0)).cloned().ok_or(EuclidError::Undefined((m0 + i, n0))))
        .collect()
}

/// The three canonical polynomials `ψ_{T_k, α}` for the edges of `T_k`.
pub fn canonical_polynomials(k: usize, anchor: LatticePoint) -> Result<[PolElement; 3]> {
    let mut out = Vec::with_capacity(3);
    for edge in 0..3 {
        let data = edge_data(k, anchor, edge);
        if qb_apply(&data)?.values.values().any(|v| !v.is_zero()) {
            return Err(EuclidError::NoSuchPolynomial { k, edge });
        }
        let p = PolElement::new(k, anchor, bottom_row(&data, k, anchor)?);
        if p.eval_points(data.values.keys().copied()) != data {
            return Err(EuclidError::NoSuchPolynomial { k, edge });
        }
        out.push(p);
    }
    Ok(out.try_into().expect("three edges"))
}

/// Whether `ψ` (given on a window) is annihilated by `(Q^w)^{j+1}`.
pub fn in_pol(psi: &LatticeFunction<Q>, j: usize) -> Result<bool> {
    Ok(qw_power(psi, j + 1)?.values.values().all(|v| v.is_zero()))
}

/// Result of one d-Taylor step.
#[derive(Debug, Clone)]
pub struct TaylorStep {
    pub phi: PolElement,
    /// Rank of the evaluation map from `Pol_k` to values on `T_k`.
    pub interpolation_rank: usize,
}

/// The unique `φ ∈ Pol_k` agreeing with `ψ` on `T_k`.
pub fn taylor_step(psi: &LatticeFunction<Q>, k: usize, anchor: LatticePoint) -> Result<TaylorStep> {
    let tk = canonical_triangle(k, anchor);
    if let Some(p) = tk.iter().find(|p| psi.get(**p).is_none()) {
        return Err(EuclidError::Undefined(*p));
    }
    if let Some((p, _)) = qb_apply(psi)?.values.iter().find(|(_, v)| !v.is_zero()) {
        return Err(EuclidError::NotHolomorphic(*p));
    }
    // interpolation certificate: the basis restricted to T_k has full rank
    let basis = unit_basis(k, anchor);
    let evals: Vec<LatticeFunction<Q>> = basis.iter().map(|b| b.eval_points(tk.iter().copied())).collect();
    let rows = tk.iter().map(|p| normalize(evals.iter().enumerate().map(|(j, e)| (j, e.values[p].clone()))));
    let rank = RowEchelon::from_rows(basis.len(), rows).rank();
    if rank != 2 * k + 2 {
        return Err(EuclidError::RankDeficient { k, rank, expected: 2 * k + 2 });
    }
    let phi = PolElement::new(k, anchor, bottom_row(psi, k, anchor)?);
    Ok(TaylorStep { phi, interpolation_rank: rank })
}

/// Least-squares slope of `log max|ψ|` over hexagonal rings against `log d`.
pub fn ring_growth_exponent(psi: &LatticeFunction<Q>, center: LatticePoint, radii: std::ops::RangeInclusive<i64>) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for d in radii {
        let max = psi
            .values
            .iter()
            .filter(|(p, _)| super::hex_norm((p.0 - center.0, p.1 - center.1)) == d)
            .map(|(_, v)| crate::scalar::q_to_f64(v).abs())
            .fold(0.0f64, f64::max);
        if max > 0.0 {
            xs.push((d as f64).ln());
            ys.push(max.ln());
        }
    }
    super::green::linear_fit_slope(&xs, &ys)
}
