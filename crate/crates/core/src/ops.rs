//! Triangle operators `Q^b`, `Q^w`, `Q = Q^b ⊕ Q^w` on a colored surface,
//! d-holomorphic kernels, evaluations, and the Liouville and maximum
//! principle verifiers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::complex::{
    covariant_constant_basis, Color, Coloring, ComplexError, Connection, TriangulatedSurface, VertexFunction,
    VertexId,
};
use crate::linalg::{normalize, solve, RowEchelon, SparseMatrix, SparseVec};
use crate::scalar::{format_q, q, Field, Q};

#[derive(Debug, Clone, thiserror::Error)]
pub enum OpsError {
    #[error("operation needs a black/white coloring")]
    MissingColoring,
    #[error("coloring is not valid for this surface")]
    InvalidColoring,
    #[error("selected family is empty")]
    EmptyFamily,
    #[error("function is not defined at vertex {0}")]
    DomainMismatch(VertexId),
    #[error("simplex {0} is not in the operator's family")]
    NotInFamily(usize),
    #[error("constraints are inconsistent with Q^b ψ = 0")]
    Inconsistent(Box<InconsistencyCertificate>),
    #[error("evaluation basis does not span the solutions on triangle {0}")]
    NoAgreement(usize),
    #[error("surface has boundary")]
    NotClosed,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub type Result<T> = std::result::Result<T, OpsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Black,
    White,
    Both,
}

/// Function on a family of top simplices, keyed by simplex index.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexFunction<S> {
    pub values: BTreeMap<usize, S>,
}

impl<S: Field> SimplexFunction<S> {
    pub fn at(&self, t: usize) -> S {
        self.values.get(&t).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
}

impl<S> FromIterator<(usize, S)> for SimplexFunction<S> {
    fn from_iter<I: IntoIterator<Item = (usize, S)>>(iter: I) -> Self {
        Self { values: iter.into_iter().collect() }
    }
}

/// Sparse operator from vertex functions to functions on a simplex family.
#[derive(Debug, Clone)]
pub struct TriangleOperator<S> {
    rows: Vec<usize>,
    vertices: Vec<VertexId>,
    column: HashMap<VertexId, usize>,
    matrix: SparseMatrix<S>,
}

impl<S: Field> TriangleOperator<S> {
    /// Simplex index of each row.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Vertex id of each column.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn column_of(&self, v: VertexId) -> Option<usize> {
        self.column.get(&v).copied()
    }

    pub fn matrix(&self) -> &SparseMatrix<S> {
        &self.matrix
    }

    /// `(Q^X ψ)(T) = Σ_{P∈T} b_{T:P} ψ(P)`.
    pub fn apply(&self, psi: &VertexFunction<S>) -> Result<SimplexFunction<S>> {
        self.rows
            .iter()
            .zip(&self.matrix.rows)
            .map(|(&t, row)| {
                let mut acc = S::zero();
                for (c, b) in row {
                    let v = self.vertices[*c];
                    let x = psi.get(v).ok_or(OpsError::DomainMismatch(v))?;
                    acc = acc + b.clone() * x.clone();
                }
                Ok((t, acc))
            })
            .collect()
    }

    /// `(Q* φ)(P) = Σ_{T∋P} b_{T:P} φ(T)`.
    pub fn adjoint_apply(&self, phi: &SimplexFunction<S>) -> Result<VertexFunction<S>> {
        let rowpos: HashMap<usize, usize> = self.rows.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let mut out: Vec<S> = vec![S::zero(); self.vertices.len()];
        for (t, x) in &phi.values {
            let i = *rowpos.get(t).ok_or(OpsError::NotInFamily(*t))?;
            for (c, b) in &self.matrix.rows[i] {
                out[*c] = out[*c].clone() + b.clone() * x.clone();
            }
        }
        Ok(self.vertices.iter().copied().zip(out).collect())
    }

    /// `Q* Q` as a square matrix over the operator's columns.
    pub fn gram(&self) -> SparseMatrix<S> {
        self.matrix.transpose().matmul(&self.matrix)
    }
}

/// Builds `Q^b`, `Q^w`, or `Q` for a connection on a colored surface.
pub fn build_q<S: Field>(
    surface: &TriangulatedSurface,
    coloring: Option<&Coloring>,
    family: Family,
    conn: &Connection<S>,
) -> Result<TriangleOperator<S>> {
    let coloring = coloring.ok_or(OpsError::MissingColoring)?;
    if !coloring.is_valid_for(surface) {
        return Err(OpsError::InvalidColoring);
    }
    let rows: Vec<usize> = match family {
        Family::Black => coloring.of(Color::Black),
        Family::White => coloring.of(Color::White),
        Family::Both => {
            let mut r = coloring.of(Color::Black);
            r.extend(coloring.of(Color::White));
            r
        }
    };
    if rows.is_empty() {
        return Err(OpsError::EmptyFamily);
    }
    Ok(operator_on(surface, conn, rows))
}

fn operator_on<S: Field>(surface: &TriangulatedSurface, conn: &Connection<S>, rows: Vec<usize>) -> TriangleOperator<S> {
    let vertices = surface.vertices().to_vec();
    let column: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let matrix_rows = rows
        .iter()
        .map(|&t| normalize(surface.simplex(t).iter().zip(conn.coefficients(t)).map(|(v, b)| (column[v], b.clone()))))
        .collect();
    let matrix = SparseMatrix::new(column.len(), matrix_rows);
    TriangleOperator { rows, vertices, column, matrix }
}

/// Outcome of an exact identity or dimension comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub pass: bool,
    pub max_discrepancy: String,
}

fn max_abs_entry(m: &SparseMatrix<Q>, rows: &[usize]) -> Q {
    rows.iter()
        .flat_map(|&r| m.rows[r].iter().map(|(_, v)| if *v < q(0) { -v.clone() } else { v.clone() }))
        .max()
        .unwrap_or_else(|| q(0))
}

/// Compares two square matrices on the given rows.
pub fn compare_rows(identity: &str, lhs: &SparseMatrix<Q>, rhs: &SparseMatrix<Q>, rows: &[usize]) -> IdentityReport {
    let diff = lhs.sub(rhs);
    let d = max_abs_entry(&diff, rows);
    IdentityReport {
        identity: identity.to_string(),
        lhs_dim: rows.len(),
        rhs_dim: rows.len(),
        pass: d == q(0),
        max_discrepancy: format_q(&d),
    }
}

/// Vertices whose star closes up into a full cycle.
pub fn interior_vertices(surface: &TriangulatedSurface) -> Vec<VertexId> {
    surface.vertices().iter().copied().filter(|&v| surface.link_cycle(&[v]).is_some()).collect()
}

/// Positive graph Laplacian `(Δψ)(P) = m'_P ψ(P) − Σ_{P'~P} ψ(P')` where
/// `m'_P` is the number of edge neighbours.
pub fn graph_laplacian(surface: &TriangulatedSurface, vertices: &[VertexId]) -> SparseMatrix<Q> {
    let column: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertices.len()];
    for s in surface.simplices() {
        for a in s {
            for b in s {
                if a != b {
                    nbrs[column[a]].insert(column[b]);
                }
            }
        }
    }
    let rows = nbrs
        .iter()
        .enumerate()
        .map(|(i, ns)| normalize(std::iter::once((i, q(ns.len() as i64))).chain(ns.iter().map(|&j| (j, q(-1))))))
        .collect();
    SparseMatrix::new(vertices.len(), rows)
}

/// Checks `Q*Q = 2Q^{b*}Q^b = 2Q^{w*}Q^w = −2Δ + 3m_P` for the canonical
/// connection, row by row on interior vertices.
pub fn laplace_identity_check(surface: &TriangulatedSurface, coloring: &Coloring) -> Result<Vec<IdentityReport>> {
    let conn = Connection::<Q>::canonical(surface);
    let qb = build_q(surface, Some(coloring), Family::Black, &conn)?;
    let qw = build_q(surface, Some(coloring), Family::White, &conn)?;
    let qq = build_q(surface, Some(coloring), Family::Both, &conn)?;
    let l = qq.gram();
    let lb = qb.gram().scale(&q(2));
    let lw = qw.gram().scale(&q(2));
    let vertices = qq.vertices().to_vec();
    let lap = graph_laplacian(surface, &vertices);
    let degree_rows = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i, q(3 * surface.degree(*v) as i64))])
        .collect();
    let rhs = lap.scale(&q(-2)).add(&SparseMatrix::new(vertices.len(), degree_rows));
    let interior: Vec<usize> =
        interior_vertices(surface).iter().map(|v| qq.column_of(*v).expect("vertex column")).collect();
    Ok(vec![
        compare_rows("Q*Q = 2Q^b*Q^b", &l, &lb, &interior),
        compare_rows("Q*Q = 2Q^w*Q^w", &l, &lw, &interior),
        compare_rows("Q*Q = -2Laplacian + 3m_P", &l, &rhs, &interior),
    ])
}

/// Basis of d-holomorphic functions on a set of black triangles, with the
/// vertex order used for the unknowns.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub vertices: Vec<VertexId>,
    pub basis: Vec<VertexFunction<Q>>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Random combination with small integer coefficients.
    pub fn random_element<R: Rng>(&self, rng: &mut R, bound: i64) -> VertexFunction<Q> {
        let mut out = VertexFunction::constant(&self.vertices, q(0));
        for b in &self.basis {
            let c = q(rng.gen_range(-bound..=bound));
            out = out.add(&b.scale(&c));
        }
        out
    }
}

fn domain_system(surface: &TriangulatedSurface, domain: &[usize]) -> (Vec<VertexId>, HashMap<VertexId, usize>, Vec<SparseVec<Q>>) {
    let verts: BTreeSet<VertexId> = domain.iter().flat_map(|&t| surface.simplex(t).iter().copied()).collect();
    let vertices: Vec<VertexId> = verts.into_iter().collect();
    let column: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let rows = domain
        .iter()
        .map(|&t| normalize(surface.simplex(t).iter().map(|v| (column[v], q(1)))))
        .collect();
    (vertices, column, rows)
}

fn to_function(vertices: &[VertexId], v: &SparseVec<Q>) -> VertexFunction<Q> {
    let mut f = VertexFunction::constant(vertices, q(0));
    for (i, x) in v {
        f.set(vertices[*i], x.clone());
    }
    f
}

/// Exact basis of `{ψ : Q^b ψ = 0 on domain}` over the vertices of the
/// domain triangles (canonical connection).
pub fn dholomorphic_kernel(surface: &TriangulatedSurface, coloring: &Coloring, domain: &[usize]) -> Result<KernelBasis> {
    if !coloring.is_valid_for(surface) {
        return Err(OpsError::InvalidColoring);
    }
    if let Some(&t) = domain.iter().find(|&&t| coloring.color(t) != Color::Black) {
        return Err(OpsError::NotInFamily(t));
    }
    let (vertices, _, rows) = domain_system(surface, domain);
    let ech = RowEchelon::from_rows(vertices.len(), rows);
    let basis = ech.nullspace().iter().map(|v| to_function(&vertices, v)).collect();
    Ok(KernelBasis { vertices, basis })
}

/// Nonzero combination of equations proving infeasibility: the listed
/// triangle sums and constraint rows add up to `0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistencyCertificate {
    pub triangle_multipliers: Vec<(usize, Q)>,
    pub constraint_multipliers: Vec<(VertexId, Q)>,
}

#[derive(Debug, Clone)]
pub struct BoundaryValueSolution {
    pub psi: VertexFunction<Q>,
    /// Dimension of the remaining freedom; zero means the data determine ψ.
    pub residual_nullity: usize,
}

/// Finds ψ with `Q^b ψ = 0` on the domain matching the given values.
pub fn solve_boundary_value(
    surface: &TriangulatedSurface,
    coloring: &Coloring,
    domain: &[usize],
    constraints: &VertexFunction<Q>,
) -> Result<BoundaryValueSolution> {
    if !coloring.is_valid_for(surface) {
        return Err(OpsError::InvalidColoring);
    }
    let (vertices, column, mut rows) = domain_system(surface, domain);
    let m = rows.len();
    let mut rhs = vec![q(0); m];
    let mut cvert = Vec::new();
    for (v, x) in &constraints.values {
        let c = *column.get(v).ok_or(OpsError::DomainMismatch(*v))?;
        rows.push(vec![(c, q(1))]);
        rhs.push(x.clone());
        cvert.push(*v);
    }
    let a = SparseMatrix::new(vertices.len(), rows);
    match solve(&a, &rhs) {
        Ok(sol) => Ok(BoundaryValueSolution {
            psi: vertices.iter().copied().zip(sol.particular).collect(),
            residual_nullity: sol.nullspace.len(),
        }),
        Err(cert) => {
            let mut tri = Vec::new();
            let mut con = Vec::new();
            for (i, y) in cert.multipliers {
                if i < m {
                    tri.push((domain[i], y));
                } else {
                    con.push((cvert[i - m], y));
                }
            }
            Err(OpsError::Inconsistent(Box::new(InconsistencyCertificate {
                triangle_multipliers: tri,
                constraint_multipliers: con,
            })))
        }
    }
}

/// Coordinates of the covariant constant agreeing with ψ on a triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub triangle: usize,
    pub coords: Vec<Q>,
}

pub fn evaluate(
    surface: &TriangulatedSurface,
    psi: &VertexFunction<Q>,
    t: usize,
    basis: &[VertexFunction<Q>],
) -> Result<Evaluation> {
    let s = surface.simplex(t);
    let rows: Vec<SparseVec<Q>> =
        s.iter().map(|v| normalize(basis.iter().enumerate().map(|(j, e)| (j, e.at(*v))))).collect();
    let mut rhs = Vec::with_capacity(s.len());
    for v in s {
        rhs.push(psi.get(*v).cloned().ok_or(OpsError::DomainMismatch(*v))?);
    }
    let a = SparseMatrix::new(basis.len(), rows);
    match solve(&a, &rhs) {
        Ok(sol) if sol.is_unique() => Ok(Evaluation { triangle: t, coords: sol.particular }),
        _ => Err(OpsError::NoAgreement(t)),
    }
}

/// Covariant-constant basis for the canonical connection, as rationals.
pub fn canonical_basis(surface: &TriangulatedSurface) -> Result<Vec<VertexFunction<Q>>> {
    Ok(covariant_constant_basis(surface, &Connection::<Q>::canonical(surface))?)
}

/// Compares `dim ker Q^b` with the covariant constants on a closed surface.
pub fn liouville_check(surface: &TriangulatedSurface, coloring: &Coloring) -> Result<Vec<IdentityReport>> {
    if !surface.is_closed() {
        return Err(OpsError::NotClosed);
    }
    let cov = canonical_basis(surface)?;
    let black = coloring.of(Color::Black);
    let white = coloring.of(Color::White);
    let kb = dholomorphic_kernel(surface, coloring, &black)?;
    let kw = dholomorphic_kernel(surface, &coloring.swapped(), &white)?;
    let report = |name: &str, k: usize| IdentityReport {
        identity: name.to_string(),
        lhs_dim: k,
        rhs_dim: cov.len(),
        pass: k == cov.len(),
        max_discrepancy: (k as i64 - cov.len() as i64).abs().to_string(),
    };
    Ok(vec![report("dim ker Q^b = dim covariant constants", kb.dimension()), report("dim ker Q^w = dim covariant constants", kw.dimension())])
}

// Exact planar geometry for the hull test.

type Point = [Q; 2];

fn cross(o: &Point, a: &Point, b: &Point) -> Q {
    (a[0].clone() - &o[0]) * (b[1].clone() - &o[1]) - (a[1].clone() - &o[1]) * (b[0].clone() - &o[0])
}

/// Convex hull in counter-clockwise order without collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let zero = q(0);
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= zero {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= zero {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Exact membership of `p` in the convex hull given in counter-clockwise
/// order, including degenerate point and segment hulls.
pub fn in_hull(hull: &[Point], p: &Point) -> bool {
    let zero = q(0);
    match hull.len() {
        0 => false,
        1 => hull[0] == *p,
        2 => {
            let (a, b) = (&hull[0], &hull[1]);
            cross(a, b, p) == zero
                && (0..2).all(|k| {
                    let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
                    lo <= &p[k] && &p[k] <= hi
                })
        }
        n => (0..n).all(|i| cross(&hull[i], &hull[(i + 1) % n], p) >= zero),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximumPrincipleReport {
    pub pass: bool,
    pub interior: usize,
    pub boundary: usize,
    pub failures: Vec<usize>,
    pub hull_vertices: usize,
    /// Euler characteristic of the closed subcomplex spanned by the domain
    /// vertices, and whether it equals the component count (disk-like).
    pub euler_characteristic: i64,
    pub simply_connected: bool,
}

/// Black triangles of the domain touching a black triangle outside it, or a
/// vertex with an open star.
pub fn boundary_triangles(surface: &TriangulatedSurface, coloring: &Coloring, domain: &[usize]) -> BTreeSet<usize> {
    let inside: BTreeSet<usize> = domain.iter().copied().collect();
    domain
        .iter()
        .copied()
        .filter(|&t| {
            surface.simplex(t).iter().any(|&v| {
                surface.link_cycle(&[v]).is_none()
                    || surface.star(v).iter().any(|u| coloring.color(*u) == Color::Black && !inside.contains(u))
            })
        })
        .collect()
}

fn euler_data(surface: &TriangulatedSurface, domain: &[usize]) -> (i64, usize) {
    let verts: BTreeSet<VertexId> = domain.iter().flat_map(|&t| surface.simplex(t).iter().copied()).collect();
    let faces: Vec<&Vec<VertexId>> =
        surface.simplices().iter().filter(|s| s.iter().all(|v| verts.contains(v))).collect();
    let mut edges = BTreeSet::new();
    for s in &faces {
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                edges.insert((s[i], s[j]));
            }
        }
    }
    // union-find over vertices through edges
    let idx: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (a, b) in &edges {
        let (ra, rb) = (find(&mut parent, idx[a]), find(&mut parent, idx[b]));
        parent[ra] = rb;
    }
    let comps = (0..verts.len()).filter(|&i| find(&mut parent, i) == i).count();
    (verts.len() as i64 - edges.len() as i64 + faces.len() as i64, comps)
}

/// Checks that every interior evaluation of ψ lies in the convex hull of the
/// boundary evaluations, exactly.
pub fn maximum_principle_check(
    surface: &TriangulatedSurface,
    coloring: &Coloring,
    psi: &VertexFunction<Q>,
    domain: &[usize],
    basis: &[VertexFunction<Q>],
) -> Result<MaximumPrincipleReport> {
    let boundary = boundary_triangles(surface, coloring, domain);
    let mut bpts = Vec::new();
    let mut ipts = Vec::new();
    for &t in domain {
        let e = evaluate(surface, psi, t, basis)?;
        let p: Point = [e.coords[0].clone(), e.coords[1].clone()];
        if boundary.contains(&t) {
            bpts.push(p);
        } else {
            ipts.push((t, p));
        }
    }
    let hull = convex_hull(&bpts);
    let failures: Vec<usize> = ipts.iter().filter(|(_, p)| !in_hull(&hull, p)).map(|(t, _)| *t).collect();
    let (chi, comps) = euler_data(surface, domain);
    Ok(MaximumPrincipleReport {
        pass: failures.is_empty(),
        interior: ipts.len(),
        boundary: bpts.len(),
        failures,
        hull_vertices: hull.len(),
        euler_characteristic: chi,
        simply_connected: chi == comps as i64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximumPrincipleTrials {
    pub trials: usize,
    pub failures: usize,
    pub kernel_dimension: usize,
    pub reports: Vec<MaximumPrincipleReport>,
}

/// Runs the maximum principle check on random d-holomorphic functions of the
/// domain, each an integer combination of a kernel basis.
pub fn maximum_principle_trials<R: Rng>(
    surface: &TriangulatedSurface,
    coloring: &Coloring,
    domain: &[usize],
    trials: usize,
    rng: &mut R,
    bound: i64,
) -> Result<MaximumPrincipleTrials> {
    let kernel = dholomorphic_kernel(surface, coloring, domain)?;
    let basis = canonical_basis(surface)?;
    let mut reports = Vec::with_capacity(trials);
    for _ in 0..trials {
        let psi = kernel.random_element(rng, bound);
        reports.push(maximum_principle_check(surface, coloring, &psi, domain, &basis)?);
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    Ok(MaximumPrincipleTrials { trials, failures, kernel_dimension: kernel.dimension(), reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_surface, find_bw_coloring};

    fn hexagon() -> (TriangulatedSurface, Coloring) {
        let tris: Vec<Vec<VertexId>> = (0..6).map(|i| vec![0, 1 + i, 1 + (i + 1) % 6]).collect();
        let s = build_surface(&tris).unwrap();
        let c = find_bw_coloring(&s).unwrap();
        (s, c)
    }

    #[test]
    fn single_triangle_row_and_kernel() {
        let s = build_surface(&[vec![0, 1, 2]]).unwrap();
        let c = Coloring { colors: vec![Color::Black] };
        let conn = Connection::<Q>::canonical(&s);
        let qb = build_q(&s, Some(&c), Family::Black, &conn).unwrap();
        assert_eq!(qb.matrix().rows, vec![vec![(0, q(1)), (1, q(1)), (2, q(1))]]);
        assert!(matches!(build_q(&s, Some(&c), Family::White, &conn), Err(OpsError::EmptyFamily)));
        assert!(matches!(build_q(&s, None, Family::Black, &conn), Err(OpsError::MissingColoring)));
        assert_eq!(dholomorphic_kernel(&s, &c, &[0]).unwrap().dimension(), 2);
    }

    #[test]
    fn adjoint_identity_on_hexagon() {
        let (s, c) = hexagon();
        let conn = Connection::<Q>::canonical(&s);
        let op = build_q(&s, Some(&c), Family::Both, &conn).unwrap();
        let psi: VertexFunction<Q> = s.vertices().iter().map(|&v| (v, q(v as i64 * 3 - 5))).collect();
        let phi: SimplexFunction<Q> = op.rows().iter().map(|&t| (t, q(t as i64 + 1))).collect();
        let lhs = op.apply(&psi).unwrap().values.iter().fold(q(0), |a, (t, x)| a + x * phi.at(*t));
        let rhs = op.adjoint_apply(&phi).unwrap().values.iter().fold(q(0), |a, (v, x)| a + x * psi.at(*v));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn laplace_identities_hold_at_hexagon_center() {
        let (s, c) = hexagon();
        for r in laplace_identity_check(&s, &c).unwrap() {
            assert!(r.pass, "{r:?}");
            assert_eq!(r.lhs_dim, 1);
        }
    }

    #[test]
    fn contradictory_triangle_values_are_inconsistent() {
        let s = build_surface(&[vec![0, 1, 2]]).unwrap();
        let c = Coloring { colors: vec![Color::Black] };
        let data: VertexFunction<Q> = [(0, q(1)), (1, q(1)), (2, q(1))].into_iter().collect();
        match solve_boundary_value(&s, &c, &[0], &data) {
            Err(OpsError::Inconsistent(cert)) => {
                assert_eq!(cert.triangle_multipliers.len(), 1);
                assert_eq!(cert.constraint_multipliers.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hull_membership_handles_degenerate_hulls() {
        let p = |a: i64, b: i64| [q(a), q(b)];
        let seg = convex_hull(&[p(0, 0), p(2, 2), p(1, 1)]);
        assert_eq!(seg.len(), 2);
        assert!(in_hull(&seg, &p(1, 1)));
        assert!(!in_hull(&seg, &p(3, 3)));
        assert!(!in_hull(&seg, &p(1, 0)));
        let tri = convex_hull(&[p(0, 0), p(4, 0), p(0, 4), p(1, 1)]);
        assert_eq!(tri.len(), 3);
        assert!(in_hull(&tri, &p(2, 2)));
        assert!(!in_hull(&tri, &p(3, 2)));
        assert!(in_hull(&convex_hull(&[p(1, 1)]), &p(1, 1)));
    }
}
