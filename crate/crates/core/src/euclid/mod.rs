//! The equilateral triangle lattice.
//!
//! Points are integer pairs `(m, n)` with shifts `t₁(m,n) = (m+1,n)` and
//! `t₂(m,n) = (m,n+1)`. The black (up) triangle rooted at `x` has vertices
//! `x, t₁x, t₂x`, so `Q^b = 1 + t₁ + t₂` and `Q^w = 1 + t₁⁻¹ + t₂⁻¹` act on
//! vertex-indexed functions.

pub mod cauchy;
pub mod green;
pub mod polynomials;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Add;

use crate::complex::{Color, Coloring, ComplexError, TriangulatedSurface, VertexId};
use crate::linalg::{normalize, SparseMatrix};
use crate::ops::{compare_rows, graph_laplacian, IdentityReport};
use crate::scalar::{q, Q};

pub type LatticePoint = (i64, i64);

#[derive(Debug, Clone, thiserror::Error)]
pub enum EuclidError {
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("triangle data on edge {edge} is not d-holomorphic on T_{k}")]
    NoSuchPolynomial { k: usize, edge: usize },
    #[error("interpolation system on T_{k} has rank {rank}, expected {expected}")]
    RankDeficient { k: usize, rank: usize, expected: usize },
    #[error("function is not d-holomorphic at {0:?}")]
    NotHolomorphic(LatticePoint),
    #[error("function is not defined at {0:?}")]
    Undefined(LatticePoint),
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },
    #[error("kernel window does not cover the needed differences (needs radius {0})")]
    KernelWindowTooSmall(i64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub type Result<T> = std::result::Result<T, EuclidError>;

/// A function on a finite set of lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction<S> {
    pub values: BTreeMap<LatticePoint, S>,
}

impl<S> Default for LatticeFunction<S> {
    fn default() -> Self {
        Self { values: BTreeMap::new() }
    }
}

impl<S> FromIterator<(LatticePoint, S)> for LatticeFunction<S> {
    fn from_iter<I: IntoIterator<Item = (LatticePoint, S)>>(iter: I) -> Self {
        Self { values: iter.into_iter().collect() }
    }
}

impl<S: Clone> LatticeFunction<S> {
    pub fn get(&self, p: LatticePoint) -> Option<&S> {
        self.values.get(&p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn restrict(&self, points: impl IntoIterator<Item = LatticePoint>) -> Self {
        points.into_iter().filter_map(|p| self.values.get(&p).map(|v| (p, v.clone()))).collect()
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> LatticeFunction<T> {
        self.values.iter().map(|(p, v)| (*p, f(v))).collect()
    }
}

fn stencil_apply<S: Clone + Add<Output = S>>(
    psi: &LatticeFunction<S>,
    offsets: [LatticePoint; 2],
) -> Result<LatticeFunction<S>> {
    let out: LatticeFunction<S> = psi
        .values
        .iter()
        .filter_map(|(&(m, n), v)| {
            let a = psi.values.get(&(m + offsets[0].0, n + offsets[0].1))?;
            let b = psi.values.get(&(m + offsets[1].0, n + offsets[1].1))?;
            Some(((m, n), v.clone() + a.clone() + b.clone()))
        })
        .collect();
    if out.is_empty() && !psi.is_empty() {
        return Err(EuclidError::WindowTooSmall("no complete triangle in the window".into()));
    }
    Ok(out)
}

/// `(Q^b ψ)(m,n) = ψ(m,n) + ψ(m+1,n) + ψ(m,n+1)` wherever all three exist.
pub fn qb_apply<S: Clone + Add<Output = S>>(psi: &LatticeFunction<S>) -> Result<LatticeFunction<S>> {
    stencil_apply(psi, [(1, 0), (0, 1)])
}

/// `(Q^w ψ)(m,n) = ψ(m,n) + ψ(m−1,n) + ψ(m,n−1)` wherever all three exist.
pub fn qw_apply<S: Clone + Add<Output = S>>(psi: &LatticeFunction<S>) -> Result<LatticeFunction<S>> {
    stencil_apply(psi, [(-1, 0), (0, -1)])
}

/// `(Q^w)^k ψ`.
pub fn qw_power<S: Clone + Add<Output = S>>(psi: &LatticeFunction<S>, k: usize) -> Result<LatticeFunction<S>> {
    let mut out = psi.clone();
    for _ in 0..k {
        out = qw_apply(&out)?;
    }
    Ok(out)
}

/// Hexagonal distance from the origin.
pub fn hex_norm((m, n): LatticePoint) -> i64 {
    m.abs().max(n.abs()).max((m + n).abs())
}

/// Euclidean length of `m·e₁ + n·e₂` for unit vectors at 60°.
pub fn euclid_norm((m, n): LatticePoint) -> f64 {
    ((m * m + n * n + m * n) as f64).sqrt()
}

pub fn hex_points(radius: i64) -> BTreeSet<LatticePoint> {
    let mut out = BTreeSet::new();
    for m in -radius..=radius {
        for n in -radius..=radius {
            if hex_norm((m, n)) <= radius {
                out.insert((m, n));
            }
        }
    }
    out
}

/// Points of `T_k` anchored at `(m0, n0)`: `m ≥ m0, n ≥ n0`,
/// `(m−m0)+(n−n0) ≤ 2k+1`; each edge carries `2k+2` points.
pub fn canonical_triangle(k: usize, (m0, n0): LatticePoint) -> Vec<LatticePoint> {
    let side = 2 * k as i64 + 1;
    let mut out = Vec::new();
    for n in 0..=side {
        for m in 0..=side - n {
            out.push((m0 + m, n0 + n));
        }
    }
    out
}

/// The residue class `(m − n) mod 3` that labels covariant constants.
pub fn residue((m, n): LatticePoint) -> usize {
    (m - n).rem_euclid(3) as usize
}

/// A finite piece of the lattice (or a quotient of it) as a colored surface.
#[derive(Debug, Clone)]
pub struct LatticeSurface {
    pub surface: TriangulatedSurface,
    pub coloring: Coloring,
    /// Lattice representative of each vertex id.
    pub points: Vec<LatticePoint>,
    pub ids: BTreeMap<LatticePoint, VertexId>,
    /// Root of each simplex: `x` for the up triangle `x, t₁x, t₂x` and for the
    /// down triangle `t₁x, t₂x, t₁t₂x`.
    pub roots: Vec<LatticePoint>,
}

impl LatticeSurface {
    pub fn black(&self) -> Vec<usize> {
        self.coloring.of(Color::Black)
    }

    pub fn id(&self, p: LatticePoint) -> Option<VertexId> {
        self.ids.get(&p).copied()
    }

    /// Black triangles whose three vertices lie in `points`.
    pub fn black_within(&self, points: &BTreeSet<LatticePoint>) -> Vec<usize> {
        self.black()
            .into_iter()
            .filter(|&t| self.surface.simplex(t).iter().all(|v| points.contains(&self.points[*v])))
            .collect()
    }
}

fn up((m, n): LatticePoint) -> [LatticePoint; 3] {
    [(m, n), (m + 1, n), (m, n + 1)]
}

fn down((m, n): LatticePoint) -> [LatticePoint; 3] {
    [(m + 1, n), (m + 1, n + 1), (m, n + 1)]
}

/// All up and down triangles with vertices in `points`; up is black.
pub fn lattice_patch(points: &BTreeSet<LatticePoint>) -> Result<LatticeSurface> {
    let mut tris: Vec<([LatticePoint; 3], Color, LatticePoint)> = Vec::new();
    for &p in points {
        let u = up(p);
        if u.iter().all(|x| points.contains(x)) {
            tris.push((u, Color::Black, p));
        }
        let d = down(p);
        if d.iter().all(|x| points.contains(x)) {
            tris.push((d, Color::White, p));
        }
    }
    let used: BTreeSet<LatticePoint> = tris.iter().flat_map(|(t, _, _)| t.iter().copied()).collect();
    let points: Vec<LatticePoint> = used.into_iter().collect();
    let ids: BTreeMap<LatticePoint, VertexId> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let simplices: Vec<Vec<VertexId>> = tris.iter().map(|(t, _, _)| t.iter().map(|p| ids[p]).collect()).collect();
    let surface = TriangulatedSurface::build(&simplices)?;
    let coloring = Coloring { colors: tris.iter().map(|(_, c, _)| *c).collect() };
    Ok(LatticeSurface { surface, coloring, points, ids, roots: tris.iter().map(|(_, _, r)| *r).collect() })
}

pub fn hex_patch(radius: i64) -> Result<LatticeSurface> {
    lattice_patch(&hex_points(radius))
}

/// Quotient of the lattice by the sublattice spanned by `(p, s)` and `(0, q)`.
pub fn torus(p: i64, s: i64, qn: i64) -> Result<LatticeSurface> {
    assert!(p > 0 && qn > 0, "periods must be positive");
    let reduce = |(m, n): LatticePoint| -> LatticePoint {
        let j = m.div_euclid(p);
        (m - j * p, (n - j * s).rem_euclid(qn))
    };
    let mut points = Vec::new();
    let mut ids = BTreeMap::new();
    for m in 0..p {
        for n in 0..qn {
            ids.insert((m, n), points.len());
            points.push((m, n));
        }
    }
    let mut simplices = Vec::new();
    let mut colors = Vec::new();
    let mut roots = Vec::new();
    for &x in &points {
        for (tri, c) in [(up(x), Color::Black), (down(x), Color::White)] {
            simplices.push(tri.iter().map(|v| ids[&reduce(*v)]).collect());
            colors.push(c);
            roots.push(x);
        }
    }
    let surface = TriangulatedSurface::build(&simplices)?;
    Ok(LatticeSurface { surface, coloring: Coloring { colors }, points, ids, roots })
}

/// `3N × 3N` torus, on which the canonical connection is flat.
pub fn square_torus(side: i64) -> Result<LatticeSurface> {
    torus(side, 0, side)
}

/// Exact check of `−Δ + 9 = Q^b Q^w` on the interior of a hexagonal window,
/// with `Δ` the graph Laplacian of the patch.
pub fn factorization_check(radius: i64) -> Result<IdentityReport> {
    let patch = hex_patch(radius)?;
    let col: HashMap<LatticePoint, usize> = patch.points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let has = |p: &LatticePoint| col.contains_key(p);
    // rows of Q^w where the down stencil fits
    let qw_rows: BTreeSet<LatticePoint> =
        patch.points.iter().copied().filter(|&(m, n)| has(&(m - 1, n)) && has(&(m, n - 1))).collect();
    let targets: Vec<LatticePoint> = qw_rows
        .iter()
        .copied()
        .filter(|&(m, n)| qw_rows.contains(&(m + 1, n)) && qw_rows.contains(&(m, n + 1)))
        .collect();
    if targets.is_empty() {
        return Err(EuclidError::WindowTooSmall(format!("radius {radius}")));
    }
    let qw_row = |(m, n): LatticePoint| [(m, n), (m - 1, n), (m, n - 1)].map(|p| (col[&p], q(1)));
    let nv = patch.points.len();
    let mut lhs_rows = vec![Vec::new(); nv];
    for &(m, n) in &targets {
        let entries = [(m, n), (m + 1, n), (m, n + 1)].into_iter().flat_map(qw_row);
        lhs_rows[col[&(m, n)]] = normalize(entries);
    }
    let lhs = SparseMatrix::new(nv, lhs_rows);
    let lap = graph_laplacian(&patch.surface, &(0..nv).collect::<Vec<_>>());
    let nine = SparseMatrix::new(nv, (0..nv).map(|i| vec![(i, q(9))]).collect());
    let rhs = nine.sub(&lap);
    let rows: Vec<usize> = targets.iter().map(|p| col[p]).collect();
    Ok(compare_rows("-Laplacian + 9 = Q^b Q^w", &lhs, &rhs, &rows))
}

/// Lattice values of a vertex function on a lattice surface.
pub fn to_lattice(patch: &LatticeSurface, psi: &crate::complex::VertexFunction<Q>) -> LatticeFunction<Q> {
    psi.values.iter().map(|(v, x)| (patch.points[*v], x.clone())).collect()
}

pub fn from_lattice(patch: &LatticeSurface, f: &LatticeFunction<Q>) -> crate::complex::VertexFunction<Q> {
    f.values.iter().filter_map(|(p, x)| patch.id(*p).map(|v| (v, x.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::laplace_identity_check;

    #[test]
    fn constant_maps_to_three_c() {
        let f: LatticeFunction<Q> = hex_points(3).into_iter().map(|p| (p, q(5))).collect();
        let out = qb_apply(&f).unwrap();
        assert!(out.values.values().all(|v| *v == q(15)));
    }

    #[test]
    fn residue_functions_are_killed() {
        let vals = [q(2), q(-5), q(3)];
        let f: LatticeFunction<Q> = hex_points(4).into_iter().map(|p| (p, vals[residue(p)].clone())).collect();
        assert!(qb_apply(&f).unwrap().values.values().all(|v| *v == q(0)));
        assert!(qw_apply(&f).unwrap().values.values().all(|v| *v == q(0)));
    }

    #[test]
    fn tk_has_2k_plus_2_points_per_edge() {
        for k in 0..4 {
            let t = canonical_triangle(k, (0, 0));
            let bottom = t.iter().filter(|p| p.1 == 0).count();
            assert_eq!(bottom, 2 * k + 2);
            assert_eq!(t.len(), (2 * k + 2) * (2 * k + 3) / 2);
        }
    }

    #[test]
    fn hex_patch_is_colored_up_black() {
        let patch = hex_patch(2).unwrap();
        assert!(patch.coloring.is_valid_for(&patch.surface));
        assert_eq!(patch.black().len(), 3 * 2 * 2);
        assert!(patch.surface.is_orientable());
    }

    #[test]
    fn window_identities_hold() {
        assert!(factorization_check(4).unwrap().pass);
        let patch = hex_patch(4).unwrap();
        for r in laplace_identity_check(&patch.surface, &patch.coloring).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn small_tori_are_valid_complexes() {
        for (p, s, qn) in [(3, 0, 3), (4, 0, 4), (3, 1, 3), (6, 0, 6)] {
            let t = torus(p, s, qn).unwrap();
            assert!(t.surface.is_closed());
            assert!(t.coloring.is_valid_for(&t.surface));
            assert!(t.surface.vertices().iter().all(|&v| t.surface.degree(v) == 6));
        }
    }
}
