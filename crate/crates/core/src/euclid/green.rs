//! The decaying Green function of `Q^b`,
//!
//! ```text
//! G(m, n) = (2π)⁻² ∫∫ e^{i(m k₁ + n k₂)} / (1 + e^{ik₁} + e^{ik₂}) dk₁ dk₂,
//! ```
//!
//! evaluated on a whole window at once by a tensor midpoint rule and a 2-D
//! inverse FFT. The integrand is singular where `(e^{ik₁}, e^{ik₂})` are the
//! two primitive cube roots of unity. With a grid size divisible by 3 both
//! points fall on cell corners, never on a sample, and the error decays like
//! `h²`; successive grid doublings are combined by Richardson extrapolation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{euclid_norm, qw_power, EuclidError, LatticeFunction, LatticePoint, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Samples per axis at the coarsest level; a multiple of 3.
    pub grid: usize,
    /// Number of grid doublings after the coarsest level.
    pub refine: usize,
    /// Largest accepted error estimate.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { grid: 768, refine: 2, tol: 1e-6 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self, radius: i64) -> Result<()> {
        if self.grid < 8 {
            return Err(EuclidError::InvalidSpec(format!("grid {} below 8", self.grid)));
        }
        if self.grid % 3 != 0 {
            return Err(EuclidError::InvalidSpec(format!(
                "grid {} is not a multiple of 3, so a sample could sit on a singular point",
                self.grid
            )));
        }
        if (self.grid as i64) < 2 * radius + 2 {
            return Err(EuclidError::InvalidSpec(format!("grid {} cannot resolve radius {radius}", self.grid)));
        }
        Ok(())
    }

    pub fn finest(&self) -> usize {
        self.grid << self.refine
    }
}

/// Green function values on the square `[−radius, radius]²`.
#[derive(Debug, Clone)]
pub struct GreenTable {
    pub radius: i64,
    pub values: LatticeFunction<f64>,
    /// Max over the window of the Richardson error estimate, or `None` when
    /// no refinement was requested.
    pub error_estimate: Option<f64>,
    pub levels: Vec<usize>,
}

/// Midpoint rule with `n × n` samples, for every point of the window.
fn midpoint_level(n: usize, radius: i64) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let e: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, (j as f64 + 0.5) * h)).collect();
    let mut data: Vec<Complex64> = Vec::with_capacity(n * n);
    for a in &e {
        for b in &e {
            data.push((Complex64::new(1.0, 0.0) + a + b).inv());
        }
    }
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    fft.process(&mut data);
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = data[i * n + j];
        }
    }
    drop(data);
    fft.process(&mut t);
    // t[j2 * n + j1] = Σ f e^{2πi (j1 l1 + j2 l2)/n}; the half-cell offset adds a phase
    let side = (2 * radius + 1) as usize;
    let scale = 1.0 / (n * n) as f64;
    let mut out = Vec::with_capacity(side * side);
    for m in -radius..=radius {
        for k in -radius..=radius {
            let idx = k.rem_euclid(n as i64) as usize * n + m.rem_euclid(n as i64) as usize;
            let phase = Complex64::from_polar(1.0, PI * (m + k) as f64 / n as f64);
            out.push((t[idx] * phase).re * scale);
        }
    }
    out
}

/// Green function on `[−radius, radius]²` with Richardson refinement.
///
/// The midpoint rule converges like `h²`, and one Richardson step removes
/// that term, leaving `h⁴`. With two or more refinements the result is the
/// last once-extrapolated level, and its error is estimated from the last two
/// of those as `|R_l − R_{l−1}| / 15`. With a single refinement only the
/// fine midpoint error `|f − c| / 3` is available, which overstates the error
/// of the extrapolated value.
pub fn green_table(radius: i64, spec: &QuadratureSpec) -> Result<GreenTable> {
    spec.validate(radius)?;
    let levels: Vec<usize> = (0..=spec.refine).map(|j| spec.grid << j).collect();
    let mut coarse: Option<Vec<f64>> = None;
    let mut prev_extrapolated: Option<Vec<f64>> = None;
    let mut values = Vec::new();
    let mut estimate = None;
    for &n in &levels {
        let fine = midpoint_level(n, radius);
        match &coarse {
            None => values = fine.clone(),
            Some(c) => {
                let r: Vec<f64> = fine.iter().zip(c).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
                estimate = Some(match &prev_extrapolated {
                    None => fine.iter().zip(c).map(|(f, c)| (f - c).abs() / 3.0).fold(0.0, f64::max),
                    Some(p) => r.iter().zip(p).map(|(a, b)| (a - b).abs() / 15.0).fold(0.0, f64::max),
                });
                values = r.clone();
                prev_extrapolated = Some(r);
            }
        }
        coarse = Some(fine);
    }
    if let Some(est) = estimate {
        if est > spec.tol {
            return Err(EuclidError::QuadratureNotConverged { estimate: est, tol: spec.tol });
        }
    }
    let mut table = LatticeFunction::default();
    let mut it = values.into_iter();
    for m in -radius..=radius {
        for n in -radius..=radius {
            table.values.insert((m, n), it.next().unwrap());
        }
    }
    Ok(GreenTable { radius, values: table, error_estimate: estimate, levels })
}

/// Green function at arbitrary points.
pub fn green_function(points: &[LatticePoint], spec: &QuadratureSpec) -> Result<(Vec<f64>, Option<f64>)> {
    let radius = points.iter().map(|p| p.0.abs().max(p.1.abs())).max().unwrap_or(0);
    let table = green_table(radius, spec)?;
    Ok((points.iter().map(|p| table.values.values[p]).collect(), table.error_estimate))
}

/// `(Q^w)^k G`, defined where the iterated stencil stays inside the table.
pub fn rational_analog(g: &LatticeFunction<f64>, k: usize) -> Result<LatticeFunction<f64>> {
    qw_power(g, k)
}

pub fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    /// `(mean distance, RMS value)` per shell.
    pub shells: Vec<(f64, f64)>,
}

/// Log–log slope of the RMS of `f` over equal-width Euclidean shells
/// covering `[dmin, dmax)`. The RMS smooths out the period-3 oscillation
/// that makes single rays unreliable.
pub fn decay_slope(f: &LatticeFunction<f64>, dmin: f64, dmax: f64, shells: usize) -> Result<DecayFit> {
    let width = (dmax - dmin) / shells as f64;
    let mut acc = vec![(0.0f64, 0.0f64, 0usize); shells];
    for (p, v) in &f.values {
        let r = euclid_norm(*p);
        if r < dmin || r >= dmax {
            continue;
        }
        let i = (((r - dmin) / width) as usize).min(shells - 1);
        acc[i].0 += r;
        acc[i].1 += v * v;
        acc[i].2 += 1;
    }
    if acc.iter().any(|a| a.2 == 0) {
        return Err(EuclidError::WindowTooSmall(format!("a shell in [{dmin}, {dmax}) has no samples")));
    }
    let shells: Vec<(f64, f64)> =
        acc.iter().map(|(r, s, c)| (r / *c as f64, (s / *c as f64).sqrt())).collect();
    let xs: Vec<f64> = shells.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = shells.iter().map(|s| s.1.ln()).collect();
    Ok(DecayFit { slope: linear_fit_slope(&xs, &ys), shells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::qb_apply;

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec { grid: 100, refine: 0, tol: 1.0 }.validate(3).is_err());
        assert!(QuadratureSpec { grid: 6, refine: 0, tol: 1.0 }.validate(1).is_err());
        assert!(QuadratureSpec { grid: 96, refine: 0, tol: 1.0 }.validate(3).is_ok());
    }

    #[test]
    fn normalization_and_symmetry() {
        let t = green_table(12, &QuadratureSpec { grid: 192, refine: 1, tol: 1e-3 }).unwrap();
        let g = &t.values;
        for p in [(0, 0), (1, 0), (0, 1)] {
            assert!((g.values[&p] - 1.0 / 3.0).abs() < 1e-4, "{p:?} {}", g.values[&p]);
        }
        for (&(m, n), v) in &g.values {
            if let Some(w) = g.get((n, m)) {
                assert!((v - w).abs() < 1e-12);
            }
        }
        let r = qb_apply(g).unwrap();
        for (p, v) in &r.values {
            let want = if *p == (0, 0) { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let f: LatticeFunction<f64> =
            (-60..=60).flat_map(|m| (-60..=60).map(move |n| (m, n))).map(|p| (p, euclid_norm(p).powi(-2))).collect();
        let fit = decay_slope(&f, 10.0, 50.0, 20).unwrap();
        assert!((fit.slope + 2.0).abs() < 2e-2, "{}", fit.slope);
    }
}
