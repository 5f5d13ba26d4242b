//! Zero sets of d-holomorphic functions and the walks around them.
//!
//! Around a vertex `v` with `ψ(v) ≠ 0`, the zeros among its neighbours form
//! arcs of the rotation. Each arc is one visit of a walk that keeps the zeros
//! on its right: it arrives from the neighbour just before the arc and leaves
//! to the neighbour just after it, sweeping `arc length + 1` triangles.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use super::{right_convex_check, HyperbolicBall, Result, DEGREE};
use crate::complex::{VertexFunction, VertexId};
use crate::linalg::{normalize, RowEchelon, SparseVec};
use crate::ops::KernelBasis;
use crate::scalar::{q, Q};

#[derive(Debug, Clone, Serialize)]
pub struct ZeroWalk {
    pub vertices: Vec<VertexId>,
    pub right_counts: Vec<usize>,
    pub closed: bool,
    pub right_convex: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetReport {
    pub zeros: usize,
    /// Non-zero vertices adjacent to a zero.
    pub boundary_set: usize,
    /// Connected components of the boundary set.
    pub components: usize,
    pub walks: Vec<ZeroWalk>,
    /// Boundary-set vertices on the outer layer, whose star is cut off.
    pub truncated: usize,
    pub all_right_convex: bool,
}

/// One zero arc at a vertex: rotation start index and length.
type Visit = (VertexId, usize);

fn arcs(rot: &[VertexId], is_zero: &dyn Fn(VertexId) -> bool) -> Vec<(usize, usize)> {
    let n = rot.len();
    let z: Vec<bool> = rot.iter().map(|&u| is_zero(u)).collect();
    if z.iter().all(|&b| b) {
        return vec![(0, n)];
    }
    let mut out = Vec::new();
    for s in 0..n {
        if z[s] && !z[(s + n - 1) % n] {
            let mut k = 0;
            while z[(s + k) % n] {
                k += 1;
            }
            out.push((s, k));
        }
    }
    out
}

/// Traces the walks around the zero set of ψ on the complete vertices of
/// the ball and checks each for right convexity.
pub fn zero_set_components(ball: &HyperbolicBall, psi: &VertexFunction<Q>) -> Result<ZeroSetReport> {
    let zero = |v: VertexId| psi.get(v).is_some_and(|x| *x == q(0));
    let zeros = (0..ball.num_vertices()).filter(|&v| zero(v)).count();
    let boundary: BTreeSet<VertexId> = (0..ball.num_vertices())
        .filter(|&v| !zero(v) && ball.neighbors(v).iter().any(|&u| zero(u)))
        .collect();
    let truncated = boundary.iter().filter(|&&v| !ball.is_complete(v)).count();
    // visits with their arc length and successor
    let mut visits: BTreeMap<Visit, (usize, Option<Visit>)> = BTreeMap::new();
    for &v in boundary.iter().filter(|&&v| ball.is_complete(v)) {
        let rot = ball.rotation(v);
        for (s, k) in arcs(rot, &zero) {
            let last = rot[(s + k - 1) % DEGREE];
            let n = rot[(s + k) % DEGREE];
            let succ = if ball.is_complete(n) {
                let nrot = ball.rotation(n);
                let i = nrot.iter().position(|&u| u == last).expect("adjacent through a triangle");
                Some((n, i))
            } else {
                None
            };
            visits.insert((v, s), (k, succ));
        }
    }
    let has_pred: BTreeSet<Visit> = visits.values().filter_map(|(_, s)| *s).collect();
    let mut used: BTreeSet<Visit> = BTreeSet::new();
    let mut walks = Vec::new();
    let starts: Vec<Visit> = visits.keys().filter(|k| !has_pred.contains(k)).copied().chain(visits.keys().copied()).collect();
    for start in starts {
        if used.contains(&start) {
            continue;
        }
        let mut cur = Some(start);
        let mut vertices = Vec::new();
        let mut right_counts = Vec::new();
        let mut closed = false;
        while let Some(vis) = cur {
            if used.contains(&vis) {
                closed = vis == start;
                break;
            }
            used.insert(vis);
            let (k, succ) = visits[&vis];
            vertices.push(vis.0);
            right_counts.push(k + 1);
            cur = succ.filter(|s| visits.contains_key(s));
        }
        let mut right_convex = right_counts.iter().all(|&c| c == 2 || c == 3);
        if closed && vertices.len() >= 3 {
            // independent recount from the rotation system
            let rep = right_convex_check(ball, &vertices, true)?;
            right_convex &= rep.convex && rep.counts.iter().flatten().copied().eq(right_counts.iter().copied());
        }
        walks.push(ZeroWalk { vertices, right_counts, closed, right_convex });
    }
    // connected components of the boundary set
    let mut comp_seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut components = 0;
    for &v in &boundary {
        if comp_seen.insert(v) {
            components += 1;
            let mut queue = VecDeque::from([v]);
            while let Some(x) = queue.pop_front() {
                for &u in ball.neighbors(x) {
                    if boundary.contains(&u) && comp_seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
        }
    }
    let all_right_convex = walks.iter().all(|w| w.right_convex);
    Ok(ZeroSetReport { zeros, boundary_set: boundary.len(), components, walks, truncated, all_right_convex })
}

/// Random d-holomorphic function on the ball vanishing on `patch`, as an
/// integer combination of the constrained kernel; `None` when only zero fits.
pub fn random_with_zeros<R: Rng>(
    kernel: &KernelBasis,
    patch: &[VertexId],
    rng: &mut R,
    bound: i64,
) -> Option<VertexFunction<Q>> {
    let rows: Vec<SparseVec<Q>> =
        patch.iter().map(|&p| normalize(kernel.basis.iter().enumerate().map(|(j, f)| (j, f.at(p))))).collect();
    let null = RowEchelon::from_rows(kernel.dimension(), rows).nullspace();
    if null.is_empty() {
        return None;
    }
    let mut coeffs = vec![q(0); kernel.dimension()];
    for n in &null {
        let c = q(rng.gen_range(-bound..=bound));
        for (j, x) in n {
            coeffs[*j] += &c * x;
        }
    }
    let mut out = VertexFunction::constant(&kernel.vertices, q(0));
    for (j, c) in coeffs.iter().enumerate() {
        if *c != q(0) {
            out = out.add(&kernel.basis[j].scale(c));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::build_ball;
    use crate::hyperbolic::counting::ball_kernel;
    use crate::hyperbolic::special::{default_direction, psi_function, ExtensionPolicy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_zeros_no_walks() {
        let ball = build_ball(2);
        let f = VertexFunction::constant(&(0..ball.num_vertices()).collect::<Vec<_>>(), q(1));
        let rep = zero_set_components(&ball, &f).unwrap();
        assert_eq!((rep.zeros, rep.walks.len(), rep.components), (0, 0, 0));
    }

    #[test]
    fn psi_xl_walk_follows_path() {
        let ball = build_ball(4);
        let (x, l) = default_direction(&ball).unwrap();
        let f = psi_function(&ball, x, l, ExtensionPolicy::LeastNorm).unwrap();
        let rep = zero_set_components(&ball, &f.values).unwrap();
        assert!(rep.all_right_convex);
        let on_path: BTreeSet<VertexId> = f.anchor.iter().copied().collect();
        assert!(rep.walks.iter().any(|w| w.vertices.len() > 3 && w.vertices.iter().all(|v| on_path.contains(v))));
    }

    #[test]
    fn random_zero_patches() {
        let ball = build_ball(3);
        let kernel = ball_kernel(&ball).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let c = rng.gen_range(0..ball.ball_vertices(1).len());
            let mut patch = vec![c];
            patch.extend(ball.neighbors(c).iter().take(3));
            let f = random_with_zeros(&kernel, &patch, &mut rng, 5).unwrap();
            let rep = zero_set_components(&ball, &f).unwrap();
            assert!(rep.zeros >= patch.len());
            assert!(rep.all_right_convex, "{rep:?}");
        }
    }
}
