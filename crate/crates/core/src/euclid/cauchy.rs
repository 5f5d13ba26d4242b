//! Fundamental solutions of `Q^b` and the discrete Cauchy formula
//!
//! ```text
//! Σ_y [Q^b ψ̄](y) · G(x − y) = ψ(x),   x ∈ D,
//! ```
//!
//! where `ψ̄` is `ψ` on `D` and zero outside. Any `G` with `Q^b G = δ` works,
//! since the left side equals `Σ_z ψ̄(z) (Q^b G)(x − z)`.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use super::{EuclidError, LatticeFunction, LatticePoint, Result};
use crate::scalar::{q, q_to_f64, Q};

/// Integer kernel supported in the cone `n ≥ 1, −(n−1) ≤ m ≤ 0`, built row by
/// row from `G(m, n+1) = δ(m, n) − G(m, n) − G(m+1, n)`. Returned on the
/// square `[−depth, depth]²`.
pub fn pascal_kernel(depth: i64) -> LatticeFunction<Q> {
    let mut g = LatticeFunction::default();
    for m in -depth..=depth {
        for n in -depth..=0 {
            g.values.insert((m, n), q(0));
        }
    }
    for n in 0..depth {
        for m in -depth..=depth {
            let delta = q(((m, n) == (0, 0)) as i64);
            let here = g.values[&(m, n)].clone();
            let right = g.get((m + 1, n)).cloned().unwrap_or_else(|| q(0));
            g.values.insert((m, n + 1), delta - here - right);
        }
    }
    g
}

/// Scalars the reconstruction can be run over.
pub trait KernelScalar: Clone + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl KernelScalar for Q {
    fn zero() -> Self {
        q(0)
    }
    fn magnitude(&self) -> f64 {
        q_to_f64(self).abs()
    }
}

impl KernelScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyReport {
    pub points: usize,
    /// Roots `y` of triangles meeting but not contained in `D` with
    /// `Q^b ψ̄(y) ≠ 0`.
    pub strip_triangles: usize,
    /// Max of `|Q^b ψ̄|` over triangles inside `D`; zero for d-holomorphic ψ.
    pub interior_residual: f64,
    pub max_error: f64,
    /// All reconstructed values equal ψ exactly.
    pub exact: bool,
}

/// Reconstructs ψ on `D` from `Q^b ψ̄` and a kernel `G` with `Q^b G = δ`.
pub fn cauchy_reconstruct<S: KernelScalar>(
    domain: &BTreeSet<LatticePoint>,
    psi: &LatticeFunction<S>,
    kernel: &LatticeFunction<S>,
) -> Result<CauchyReport> {
    let bar = |p: &LatticePoint| -> S {
        if domain.contains(p) {
            psi.get(*p).cloned().unwrap_or_else(S::zero)
        } else {
            S::zero()
        }
    };
    for p in domain {
        if psi.get(*p).is_none() {
            return Err(EuclidError::Undefined(*p));
        }
    }
    let roots: BTreeSet<LatticePoint> =
        domain.iter().flat_map(|&(m, n)| [(m, n), (m - 1, n), (m, n - 1)]).collect();
    let mut strip = Vec::new();
    let mut interior_residual = 0.0f64;
    for &(m, n) in &roots {
        let tri = [(m, n), (m + 1, n), (m, n + 1)];
        let v = bar(&tri[0]) + bar(&tri[1]) + bar(&tri[2]);
        if tri.iter().all(|p| domain.contains(p)) {
            interior_residual = interior_residual.max(v.magnitude());
        } else if v != S::zero() {
            strip.push(((m, n), v));
        }
    }
    let mut max_error = 0.0f64;
    let mut exact = true;
    for &(xm, xn) in domain {
        let mut acc = S::zero();
        for ((ym, yn), v) in &strip {
            let d = (xm - ym, xn - yn);
            let g = kernel.get(d).ok_or(EuclidError::KernelWindowTooSmall(d.0.abs().max(d.1.abs())))?;
            acc = acc + v.clone() * g.clone();
        }
        let want = psi.get((xm, xn)).unwrap().clone();
        if acc != want {
            exact = false;
        }
        max_error = max_error.max((acc - want).magnitude());
    }
    Ok(CauchyReport {
        points: domain.len(),
        strip_triangles: strip.len(),
        interior_residual,
        max_error,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::{hex_points, qb_apply};

    #[test]
    fn pascal_kernel_is_a_fundamental_solution() {
        let g = pascal_kernel(10);
        let r = qb_apply(&g).unwrap();
        for (p, v) in &r.values {
            assert_eq!(*v, q(((*p) == (0, 0)) as i64), "{p:?}");
        }
        assert_eq!(g.values[&(0, 1)], q(1));
        assert_eq!(g.values[&(-1, 3)], q(2));
        assert_eq!(g.values[&(1, 3)], q(0));
    }

    #[test]
    fn constant_residue_function_reconstructs() {
        let vals = [q(1), q(1), q(-2)];
        let d = hex_points(3);
        let psi: LatticeFunction<Q> =
            d.iter().map(|&p| (p, vals[crate::euclid::residue(p)].clone())).collect();
        let rep = cauchy_reconstruct(&d, &psi, &pascal_kernel(9)).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.interior_residual, 0.0);
    }
}
