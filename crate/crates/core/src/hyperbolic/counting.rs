//! Equation and unknown counts for `Q^b ψ = 0` on balls, the exact rank that
//! realizes them, and reconstruction from half of the boundary data.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{HyperError, HyperbolicBall, Result};
use crate::complex::{Color, VertexFunction, VertexId};
use crate::linalg::{normalize, solve, RowEchelon, SparseMatrix, SparseVec};
use crate::ops::{dholomorphic_kernel, KernelBasis};
use crate::scalar::{q, Q};

/// Black triangles of one strip between layers `k − 1` and `k`.
#[derive(Debug, Clone, Serialize)]
pub struct StripCount {
    pub layer: usize,
    /// Triangles with one vertex on the inner layer.
    pub one_inner: usize,
    /// Triangles with one vertex on the outer layer.
    pub one_outer: usize,
    /// Black letters of the outer boundary word.
    pub outer_black_letters: usize,
    /// White letters of the inner boundary word.
    pub inner_white_letters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationCount {
    pub radius: usize,
    pub vertices: usize,
    pub equations: usize,
    pub dof: usize,
    pub boundary: usize,
    pub strips: Vec<StripCount>,
    /// `B_R + N_{R−1} − 1`.
    pub equations_formula: usize,
    /// `|∂D_R|/2 + 1`.
    pub dof_formula: usize,
    pub letters_balanced: bool,
    pub pass: bool,
}

/// Counts the equations of `Q^b ψ = 0` on `D_R` strip by strip and checks
/// them against the letter counts of the boundary words.
pub fn equation_count(ball: &HyperbolicBall) -> Result<EquationCount> {
    let r = ball.radius;
    if r == 0 {
        return Err(HyperError::LayerOutOfRange { layer: 0, radius: 0 });
    }
    let black = ball.black_triangles();
    let mut strips = Vec::new();
    let mut letters_balanced = true;
    let mut inner_white = 0;
    for k in 1..=r {
        let word = ball.boundary_word(k)?;
        let (b, w) = (word.count(Color::Black), word.count(Color::White));
        letters_balanced &= b == w;
        let (mut one_inner, mut one_outer) = (0, 0);
        for &t in &black {
            let layers: Vec<usize> = ball.triangles[t].iter().map(|&v| ball.layer(v)).collect();
            if layers.iter().any(|&l| l != k && l != k - 1) || !layers.contains(&k) {
                continue;
            }
            let inner = layers.iter().filter(|&&l| l == k - 1).count();
            match inner {
                1 => one_inner += 1,
                2 => one_outer += 1,
                _ => {}
            }
        }
        strips.push(StripCount {
            layer: k,
            one_inner,
            one_outer,
            outer_black_letters: b,
            inner_white_letters: inner_white,
        });
        inner_white = w;
    }
    let n_prev: usize = (0..r).map(|k| ball.boundary_size(k)).sum();
    let b_r = strips.last().unwrap().outer_black_letters;
    let boundary = ball.boundary_size(r);
    let vertices = ball.num_vertices();
    let equations = black.len();
    let equations_formula = b_r + n_prev - 1;
    let dof_formula = boundary / 2 + 1;
    let strips_ok = strips.iter().all(|s| s.one_inner == s.outer_black_letters && s.one_outer == s.inner_white_letters);
    let dof = vertices - equations;
    Ok(EquationCount {
        radius: r,
        vertices,
        equations,
        dof,
        boundary,
        equations_formula,
        dof_formula,
        letters_balanced,
        pass: strips_ok && letters_balanced && equations == equations_formula && dof == dof_formula,
        strips,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub radius: usize,
    pub vertices: usize,
    pub equations: usize,
    pub rank: usize,
    pub nullity: usize,
    pub expected: usize,
    pub equations_independent: bool,
    pub pass: bool,
}

fn black_rows(ball: &HyperbolicBall) -> Vec<SparseVec<Q>> {
    ball.black_triangles().iter().map(|&t| normalize(ball.triangles[t].iter().map(|&v| (v, q(1))))).collect()
}

/// Exact rank of `Q^b` on `D_R`; the nullity must equal `|∂D_R|/2 + 1`.
pub fn dof_rank_check(ball: &HyperbolicBall, cap: usize) -> Result<RankReport> {
    if ball.radius > cap {
        return Err(HyperError::TooLarge { radius: ball.radius, cap });
    }
    let rows = black_rows(ball);
    let equations = rows.len();
    let rank = RowEchelon::from_rows(ball.num_vertices(), rows).rank();
    let nullity = ball.num_vertices() - rank;
    let expected = ball.boundary_size(ball.radius) / 2 + 1;
    Ok(RankReport {
        radius: ball.radius,
        vertices: ball.num_vertices(),
        equations,
        rank,
        nullity,
        expected,
        equations_independent: rank == equations,
        pass: nullity == expected && rank == equations,
    })
}

/// Basis of d-holomorphic functions on the whole ball.
pub fn ball_kernel(ball: &HyperbolicBall) -> Result<KernelBasis> {
    let (s, c) = ball.surface()?;
    Ok(dholomorphic_kernel(&s, &c, &ball.black_triangles())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Independence {
    pub points: Vec<VertexId>,
    pub rank: usize,
    pub dimension: usize,
    pub determines: bool,
}

fn restriction_rows(kernel: &KernelBasis, points: &[VertexId]) -> Vec<SparseVec<Q>> {
    points.iter().map(|&p| normalize(kernel.basis.iter().enumerate().map(|(j, f)| (j, f.at(p))))).collect()
}

/// Whether values at the points determine a d-holomorphic function.
pub fn independence(kernel: &KernelBasis, points: &[VertexId]) -> Independence {
    let rank = RowEchelon::from_rows(kernel.dimension(), restriction_rows(kernel, points)).rank();
    Independence { points: points.to_vec(), rank, dimension: kernel.dimension(), determines: rank == kernel.dimension() }
}

/// Greedy choice of boundary vertices, in cycle order, whose values are
/// independent on the kernel. The result has `dim` points when boundary
/// data determine the function.
pub fn independent_boundary_points(ball: &HyperbolicBall, kernel: &KernelBasis) -> Result<Vec<VertexId>> {
    let cycle = ball.boundary_cycle(ball.radius)?;
    let mut ech = RowEchelon::new(kernel.dimension());
    let mut chosen = Vec::new();
    for (&p, row) in cycle.iter().zip(restriction_rows(kernel, cycle)) {
        if ech.insert(row).is_some() {
            chosen.push(p);
        }
        if chosen.len() == kernel.dimension() {
            break;
        }
    }
    Ok(chosen)
}

/// Every other boundary vertex plus one more.
pub fn alternate_points(ball: &HyperbolicBall) -> Result<Vec<VertexId>> {
    let cycle = ball.boundary_cycle(ball.radius)?;
    let mut pts: Vec<VertexId> = cycle.iter().step_by(2).copied().collect();
    pts.push(cycle[1]);
    Ok(pts)
}

/// The unique d-holomorphic function with the given values.
pub fn reconstruct_from_data(kernel: &KernelBasis, data: &VertexFunction<Q>) -> Result<VertexFunction<Q>> {
    let points: Vec<VertexId> = data.values.keys().copied().collect();
    let known: BTreeSet<VertexId> = kernel.vertices.iter().copied().collect();
    if let Some(&p) = points.iter().find(|p| !known.contains(p)) {
        return Err(HyperError::UnknownVertex(p));
    }
    let a = SparseMatrix::new(kernel.dimension(), restriction_rows(kernel, &points));
    let b: Vec<Q> = points.iter().map(|&p| data.at(p)).collect();
    let sol = solve(&a, &b).map_err(|_| HyperError::InconsistentData)?;
    if let Some(null) = sol.nullspace.first() {
        return Err(HyperError::DependentDataSet { witness: Box::new(combine(kernel, null)) });
    }
    let coeffs: SparseVec<Q> = normalize(sol.particular.into_iter().enumerate());
    Ok(combine(kernel, &coeffs))
}

fn combine(kernel: &KernelBasis, coeffs: &SparseVec<Q>) -> VertexFunction<Q> {
    let mut acc: HashMap<VertexId, Q> = kernel.vertices.iter().map(|&v| (v, q(0))).collect();
    for (j, c) in coeffs {
        for (v, x) in &kernel.basis[*j].values {
            *acc.get_mut(v).unwrap() += c * x;
        }
    }
    acc.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::build_ball;

    #[test]
    fn counts_on_small_balls() {
        let c1 = equation_count(&build_ball(1)).unwrap();
        assert_eq!((c1.vertices, c1.equations, c1.dof), (9, 4, 5));
        assert!(c1.pass, "{c1:?}");
        let c2 = equation_count(&build_ball(2)).unwrap();
        assert_eq!(c2.dof, 17);
        assert!(c2.pass, "{c2:?}");
    }

    #[test]
    fn rank_matches_count() {
        for r in 1..=3 {
            let rep = dof_rank_check(&build_ball(r), 4).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
        assert!(matches!(dof_rank_check(&build_ball(2), 1), Err(HyperError::TooLarge { .. })));
    }

    #[test]
    fn half_data_round_trip() {
        let ball = build_ball(2);
        let kernel = ball_kernel(&ball).unwrap();
        let pts = independent_boundary_points(&ball, &kernel).unwrap();
        assert_eq!(pts.len(), 17);
        let psi = kernel.basis[3].add(&kernel.basis[7].scale(&q(-2)));
        let data: VertexFunction<Q> = pts.iter().map(|&p| (p, psi.at(p))).collect();
        assert_eq!(reconstruct_from_data(&kernel, &data).unwrap(), psi);
        let zero: VertexFunction<Q> = pts.iter().map(|&p| (p, q(0))).collect();
        assert!(reconstruct_from_data(&kernel, &zero).unwrap().is_zero());
        let few: VertexFunction<Q> = pts[..5].iter().map(|&p| (p, q(1))).collect();
        assert!(matches!(reconstruct_from_data(&kernel, &few), Err(HyperError::DependentDataSet { .. })));
    }
}
