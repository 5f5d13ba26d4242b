//! Fourier Green function against a one-dimensional reduction.
//!
//! Integrating `e^{inφ} / (a + e^{iφ})` over `φ` by residues, with
//! `a = 1 + e^{iθ}`, leaves a single integral over `θ` whose integrand is
//! smooth on each side of the kinks at `θ = ±2π/3`. Gauss–Legendre on those
//! pieces is accurate to rounding.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use dca::euclid::green::{green_table, QuadratureSpec};
use dca::euclid::qb_apply;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;

fn oracle(gl: &GaussLegendre, m: i64, n: i64) -> f64 {
    let f = |t: f64| {
        let a = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, t);
        let v = if n >= 1 {
            (-a).powi((n - 1) as i32)
        } else {
            a.powi((n - 1) as i32) * if n % 2 == 0 { 1.0 } else { -1.0 }
        };
        (Complex64::from_polar(1.0, m as f64 * t) * v).re
    };
    let third = 2.0 * PI / 3.0;
    let s = if n >= 1 {
        gl.integrate(third, PI, f) + gl.integrate(-PI, -third, f)
    } else {
        gl.integrate(-third, 0.0, f) + gl.integrate(0.0, third, f)
    };
    s / (2.0 * PI)
}

#[test]
fn default_quadrature_matches_oracle() {
    let gl = GaussLegendre::new(NonZeroUsize::new(600).unwrap());
    let table = green_table(100, &QuadratureSpec::default()).unwrap();
    let est = table.error_estimate.unwrap();
    assert!(est < 1e-6, "{est}");
    let mut worst = 0.0f64;
    for p in [(0, 0), (1, 0), (0, 1), (-1, -1), (3, -2), (10, 5), (-30, 40), (60, -20), (100, 0), (0, -100), (70, 70)] {
        let err = (table.values.values[&p] - oracle(&gl, p.0, p.1)).abs();
        worst = worst.max(err);
    }
    assert!(worst < 1e-6, "{worst}");
    // the estimate should not be wildly optimistic
    assert!(worst < 10.0 * est, "error {worst} vs estimate {est}");
}

#[test]
fn oracle_values_are_a_fundamental_solution() {
    let gl = GaussLegendre::new(NonZeroUsize::new(400).unwrap());
    let g = (-4..=4).flat_map(|m| (-4..=4).map(move |n| (m, n))).map(|(m, n)| ((m, n), oracle(&gl, m, n))).collect();
    for (p, v) in qb_apply(&g).unwrap().values {
        let want = if p == (0, 0) { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-12, "{p:?} {v}");
    }
    assert!((g.values[&(0, 0)] - 1.0 / 3.0).abs() < 1e-13);
}
