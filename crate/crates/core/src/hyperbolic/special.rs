//! d-holomorphic functions with prescribed zeros: `z_{P,r}`, vanishing on
//! `D_{r−1}` and on `∂D_r` away from a short arc `P`, and `ψ_{x,l}`, vanishing
//! to the right of the all-black path `γ_{x,l}` and alternating `±1` on it.
//!
//! Both are fixed on a seed region and then extended outward one layer at a
//! time. The extension is not unique; two policies are offered and both are
//! experimental.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::str::FromStr;

use serde::Serialize;

use super::{HyperError, HyperbolicBall, Result, DEGREE};
use crate::complex::{Color, VertexFunction, VertexId};
use crate::linalg::{normalize, solve, SparseMatrix, SparseVec};
use crate::scalar::{q, q_to_f64, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtensionPolicy {
    /// Least Euclidean norm on each new layer.
    LeastNorm,
    /// Basic solution: free unknowns of each layer set to zero.
    Sparse,
}

impl FromStr for ExtensionPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "least-norm" => Ok(Self::LeastNorm),
            "sparse" => Ok(Self::Sparse),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialFunction {
    pub kind: String,
    pub policy: ExtensionPolicy,
    #[serde(skip)]
    pub values: VertexFunction<Q>,
    /// The arc `P` or the path `γ_{x,l}`.
    pub anchor: Vec<VertexId>,
    /// Vertices forced to vanish.
    pub zero_region: Vec<VertexId>,
    /// Max `|ψ|` on the seed region (entry 0) and on each extension layer.
    pub profile: Vec<f64>,
    pub profile_monotone: bool,
}

/// Solves the black-triangle equations layer by layer. `known` grows as
/// layers are fixed.
fn extend(
    ball: &HyperbolicBall,
    known: &mut BTreeMap<VertexId, Q>,
    layers: &[Vec<VertexId>],
    extra: &[(VertexId, Q)],
    policy: ExtensionPolicy,
) -> Result<()> {
    let black: Vec<usize> = ball.black_triangles();
    for (j, layer) in layers.iter().enumerate() {
        let col: BTreeMap<VertexId, usize> = layer.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut rows: Vec<SparseVec<Q>> = Vec::new();
        let mut rhs = Vec::new();
        for &t in &black {
            let tri = ball.triangles[t];
            if !tri.iter().any(|v| col.contains_key(v)) || !tri.iter().all(|v| col.contains_key(v) || known.contains_key(v)) {
                continue;
            }
            let mut b = q(0);
            let mut row = Vec::new();
            for v in tri {
                match col.get(&v) {
                    Some(&c) => row.push((c, q(1))),
                    None => b -= &known[&v],
                }
            }
            rows.push(normalize(row));
            rhs.push(b);
        }
        if j == 0 {
            for (v, x) in extra {
                if let Some(&c) = col.get(v) {
                    rows.push(vec![(c, q(1))]);
                    rhs.push(x.clone());
                }
            }
        }
        let a = SparseMatrix::new(layer.len(), rows);
        let x = match policy {
            ExtensionPolicy::Sparse => solve(&a, &rhs).map(|s| s.particular),
            ExtensionPolicy::LeastNorm => {
                let at = a.transpose();
                solve(&a.matmul(&at), &rhs).map(|s| at.mul_vec(&s.particular))
            }
        }
        .map_err(|_| HyperError::InfeasibleAnchor(format!("no extension at step {j}")))?;
        for (v, val) in layer.iter().zip(x) {
            known.insert(*v, val);
        }
    }
    for &t in &black {
        let tri = ball.triangles[t];
        if tri.iter().all(|v| known.contains_key(v)) {
            let s: Q = tri.iter().map(|v| known[v].clone()).sum();
            if s != q(0) {
                return Err(HyperError::InfeasibleAnchor(format!("equation on triangle {t} fails")));
            }
        }
    }
    Ok(())
}

/// Unknown vertices grouped by graph distance from the fixed set.
fn distance_layers(ball: &HyperbolicBall, fixed: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
    let seed: Vec<VertexId> = fixed.iter().copied().collect();
    let dist = ball.distances_from(&seed);
    let mut layers: Vec<Vec<VertexId>> = Vec::new();
    for v in 0..ball.num_vertices() {
        if let Some(d) = dist[v].filter(|&d| d > 0) {
            if layers.len() < d {
                layers.resize(d, Vec::new());
            }
            layers[d - 1].push(v);
        }
    }
    layers
}

fn profile(values: &BTreeMap<VertexId, Q>, groups: &[Vec<VertexId>]) -> (Vec<f64>, bool) {
    let p: Vec<f64> =
        groups.iter().map(|g| g.iter().map(|v| q_to_f64(&values[v]).abs()).fold(0.0, f64::max)).collect();
    let monotone = p.windows(2).all(|w| w[1] >= w[0]);
    (p, monotone)
}

/// `z_{P,r}` with `P` the `len` consecutive vertices of the layer-`r` cycle
/// starting at position `start`, normalized to 1 at the first of them.
pub fn z_function(
    ball: &HyperbolicBall,
    r: usize,
    start: usize,
    len: usize,
    policy: ExtensionPolicy,
) -> Result<SpecialFunction> {
    if r == 0 || r >= ball.radius {
        return Err(HyperError::BallTooSmall { radius: ball.radius, needed: r + 1 });
    }
    let cycle = ball.boundary_cycle(r)?;
    if len == 0 || len > cycle.len() {
        return Err(HyperError::InfeasibleAnchor(format!("arc length {len}")));
    }
    let arc: Vec<VertexId> = (0..len).map(|i| cycle[(start + i) % cycle.len()]).collect();
    let arc_set: BTreeSet<VertexId> = arc.iter().copied().collect();
    let zeros: Vec<VertexId> = ball.ball_vertices(r).into_iter().filter(|v| !arc_set.contains(v)).collect();
    let mut known: BTreeMap<VertexId, Q> = zeros.iter().map(|&v| (v, q(0))).collect();
    let mut layers = vec![arc.clone()];
    layers.extend(ball.layers[r + 1..].iter().cloned());
    extend(ball, &mut known, &layers, &[(arc[0], q(1))], policy)?;
    let mut groups = vec![ball.ball_vertices(r)];
    groups.extend(ball.layers[r + 1..].iter().cloned());
    let (profile, profile_monotone) = profile(&known, &groups);
    Ok(SpecialFunction {
        kind: format!("z_P,{r}"),
        policy,
        values: known.into_iter().collect(),
        anchor: arc,
        zero_region: zeros,
        profile,
        profile_monotone,
    })
}

/// First arc of length 2 or 3 on the layer-`r` cycle admitting `z_{P,r}`.
pub fn z_default(ball: &HyperbolicBall, r: usize, policy: ExtensionPolicy) -> Result<SpecialFunction> {
    let n = ball.boundary_cycle(r)?.len();
    for len in 2..=3 {
        for start in 0..n {
            if let Ok(z) = z_function(ball, r, start, len, policy) {
                return Ok(z);
            }
        }
    }
    Err(HyperError::InfeasibleAnchor(format!("no short arc on layer {r}")))
}

fn step(ball: &HyperbolicBall, v: VertexId, from: VertexId, offset: isize) -> Option<VertexId> {
    let rot = ball.rotation(v);
    let i = rot.iter().position(|x| *x == from)? as isize + offset;
    if ball.is_complete(v) {
        Some(rot[i.rem_euclid(DEGREE as isize) as usize])
    } else if i >= 0 && (i as usize) < rot.len() {
        Some(rot[i as usize])
    } else {
        None
    }
}

/// The maximal path through `x → l` with a black triangle on the right of
/// every edge, traced in both directions until it leaves the ball. Returns
/// the path and the position of `x`.
pub fn black_path(ball: &HyperbolicBall, x: VertexId, l: VertexId) -> Result<(Vec<VertexId>, usize)> {
    if x >= ball.num_vertices() || l >= ball.num_vertices() {
        return Err(HyperError::UnknownVertex(x.max(l)));
    }
    if !ball.is_complete(x) || !ball.adjacent(x, l) {
        return Err(HyperError::InfeasibleAnchor(format!("{x} → {l} is not an inner edge")));
    }
    match ball.right_triangle(x, l) {
        Some(t) if ball.colors[t] == Color::Black => {}
        _ => return Err(HyperError::InfeasibleAnchor(format!("{x} → {l} has no black triangle on its right"))),
    }
    let mut seen = BTreeSet::from([x, l]);
    // three triangles on the right at every vertex keep every edge black
    let mut forward = vec![x, l];
    while let Some(n) = step(ball, forward[forward.len() - 1], forward[forward.len() - 2], 3) {
        if !seen.insert(n) {
            return Err(HyperError::InfeasibleAnchor("path closes up".into()));
        }
        forward.push(n);
    }
    let mut backward = vec![l, x];
    while let Some(p) = step(ball, backward[backward.len() - 1], backward[backward.len() - 2], -3) {
        if !seen.insert(p) {
            return Err(HyperError::InfeasibleAnchor("path closes up".into()));
        }
        backward.push(p);
    }
    let ix = backward.len() - 2;
    let mut path: Vec<VertexId> = backward[2..].iter().rev().copied().collect();
    path.extend(forward);
    Ok((path, ix))
}

/// Vertices strictly on the right of the path, by flood fill from the
/// right-hand neighbours of its vertices without crossing it.
fn right_side(ball: &HyperbolicBall, path: &[VertexId]) -> Result<BTreeSet<VertexId>> {
    let on_path: BTreeSet<VertexId> = path.iter().copied().collect();
    let mut right_seeds = Vec::new();
    let mut left_seeds = Vec::new();
    for i in 0..path.len() {
        let v = path[i];
        if i > 0 {
            right_seeds.extend((1..=2).filter_map(|k| step(ball, v, path[i - 1], k)));
        } else {
            right_seeds.extend((1..=2).filter_map(|k| step(ball, v, path[1], -k)));
        }
        if i > 0 && i + 1 < path.len() && ball.is_complete(v) {
            left_seeds.extend((1..=4).filter_map(|k| step(ball, v, path[i + 1], k)));
        }
    }
    let mut region: BTreeSet<VertexId> = BTreeSet::new();
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for s in right_seeds {
        if !on_path.contains(&s) && region.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in ball.neighbors(v) {
            if !on_path.contains(&u) && region.insert(u) {
                queue.push_back(u);
            }
        }
    }
    if left_seeds.iter().any(|s| !on_path.contains(s) && region.contains(s)) {
        return Err(HyperError::NotSeparating);
    }
    Ok(region)
}

/// `ψ_{x,l}`: zero on the right of `γ_{x,l}`, `+1` at `x` and alternating
/// along the path, extended to the left side by the chosen policy.
pub fn psi_function(ball: &HyperbolicBall, x: VertexId, l: VertexId, policy: ExtensionPolicy) -> Result<SpecialFunction> {
    let (path, ix) = black_path(ball, x, l)?;
    let right = right_side(ball, &path)?;
    let mut known: BTreeMap<VertexId, Q> = right.iter().map(|&v| (v, q(0))).collect();
    for (i, &v) in path.iter().enumerate() {
        known.insert(v, q(if (i + ix) % 2 == 0 { 1 } else { -1 }));
    }
    let fixed: BTreeSet<VertexId> = known.keys().copied().collect();
    let layers = distance_layers(ball, &fixed);
    extend(ball, &mut known, &layers, &[], policy)?;
    let mut groups = vec![fixed.into_iter().collect::<Vec<_>>()];
    groups.extend(layers);
    let (profile, profile_monotone) = profile(&known, &groups);
    Ok(SpecialFunction {
        kind: format!("psi_{x},{l}"),
        policy,
        values: known.into_iter().collect(),
        anchor: path,
        zero_region: right.into_iter().collect(),
        profile,
        profile_monotone,
    })
}

/// An inner edge `x → l` with a black triangle on its right, `x` a
/// neighbour of the centre.
pub fn default_direction(ball: &HyperbolicBall) -> Option<(VertexId, VertexId)> {
    let x = *ball.layers.get(1)?.first()?;
    ball.rotation(x).iter().copied().find(|&l| ball.right_triangle(x, l).is_some_and(|t| ball.colors[t] == Color::Black))
        .map(|l| (x, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{build_ball, path_word, right_convex_check};

    fn is_holomorphic(ball: &HyperbolicBall, f: &VertexFunction<Q>) -> bool {
        ball.black_triangles().iter().all(|&t| ball.triangles[t].iter().map(|v| f.at(*v)).sum::<Q>() == q(0))
    }

    #[test]
    fn black_path_is_right_convex() {
        let ball = build_ball(4);
        let (x, l) = default_direction(&ball).unwrap();
        let (path, ix) = black_path(&ball, x, l).unwrap();
        assert_eq!(path[ix], x);
        assert_eq!(path[ix + 1], l);
        let word = path_word(&ball, &path, false).unwrap();
        assert_eq!(word.count(Color::White), 0);
        let rep = right_convex_check(&ball, &path, false).unwrap();
        assert!(rep.convex);
        assert!(rep.counts.iter().flatten().all(|&c| c == 3));
    }

    #[test]
    fn psi_vanishes_right_of_path() {
        let ball = build_ball(4);
        let (x, l) = default_direction(&ball).unwrap();
        for policy in [ExtensionPolicy::LeastNorm, ExtensionPolicy::Sparse] {
            let f = psi_function(&ball, x, l, policy).unwrap();
            assert!(is_holomorphic(&ball, &f.values));
            assert!(f.zero_region.iter().all(|v| f.values.at(*v) == q(0)));
            assert!(!f.zero_region.is_empty());
            for w in f.anchor.windows(2) {
                assert_eq!(f.values.at(w[0]), -f.values.at(w[1]));
            }
            assert_eq!(f.values.at(x), q(1));
        }
    }

    #[test]
    fn z_function_pattern() {
        let ball = build_ball(4);
        for policy in [ExtensionPolicy::LeastNorm, ExtensionPolicy::Sparse] {
            let z = z_default(&ball, 2, policy).unwrap();
            assert!(is_holomorphic(&ball, &z.values));
            assert!(z.zero_region.iter().all(|v| z.values.at(*v) == q(0)));
            assert_eq!(z.values.at(z.anchor[0]), q(1));
        }
        // a single boundary vertex is pinned to zero by its inner black triangle
        assert!(z_function(&ball, 2, 0, 1, ExtensionPolicy::Sparse).is_err());
    }
}
