//! The order-8 triangular lattice of the hyperbolic plane: balls grown layer
//! by layer, their boundary words, right-convex paths and domains `D_{K,r}`.

pub mod counting;
pub mod special;
pub mod zeros;

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Color, Coloring, ComplexError, TriangulatedSurface, VertexFunction, VertexId};
use crate::dynamics::Word;
use crate::ops::OpsError;
use crate::scalar::Q;

/// Triangles meeting at every vertex.
pub const DEGREE: usize = 8;

#[derive(Debug, Error)]
pub enum HyperError {
    #[error("seed set is empty")]
    EmptySeed,
    #[error("seed set is not connected")]
    DisconnectedSeed,
    #[error("vertex {0} is not in the ball")]
    UnknownVertex(VertexId),
    #[error("vertices at positions {0} and {next} are not adjacent", next = .0 + 1)]
    NotAPath(usize),
    #[error("layer {layer} outside 1..={radius}")]
    LayerOutOfRange { layer: usize, radius: usize },
    #[error("ball of radius {radius} is too small, need {needed}")]
    BallTooSmall { radius: usize, needed: usize },
    #[error("infeasible anchor: {0}")]
    InfeasibleAnchor(String),
    #[error("the path does not separate the ball")]
    NotSeparating,
    #[error("data points do not determine the function")]
    DependentDataSet { witness: Box<VertexFunction<Q>> },
    #[error("data values are inconsistent with d-holomorphy")]
    InconsistentData,
    #[error("radius {radius} exceeds the cap {cap}")]
    TooLarge { radius: usize, cap: usize },
    #[error("ball growth failed at vertex {0}")]
    GrowthFailure(VertexId),
    #[error("malformed ball document: {0}")]
    Json(String),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub type Result<T> = std::result::Result<T, HyperError>;

fn key(a: VertexId, b: VertexId, c: VertexId) -> [VertexId; 3] {
    let mut k = [a, b, c];
    k.sort_unstable();
    k
}

/// Ball `D_r` around vertex 0: every lattice vertex within `r` edges, and
/// every lattice triangle on those vertices.
#[derive(Debug, Clone)]
pub struct HyperbolicBall {
    pub radius: usize,
    /// `layers[k]` holds the vertices at distance `k`.
    pub layers: Vec<Vec<VertexId>>,
    /// `boundary_cycles[k − 1]` is the cycle of layer `k` oriented with
    /// `D_k` on its right.
    pub boundary_cycles: Vec<Vec<VertexId>>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[VertexId; 3]>,
    pub colors: Vec<Color>,
    layer_of: Vec<usize>,
    /// Neighbours in counter-clockwise order. For vertices of the outer
    /// layer this is the open fan, first entry to last.
    rotation: Vec<Vec<VertexId>>,
    index: HashMap<[VertexId; 3], usize>,
}

struct Grower {
    rotation: Vec<Vec<VertexId>>,
    triangles: Vec<[VertexId; 3]>,
    colors: Vec<Color>,
    index: HashMap<[VertexId; 3], usize>,
}

impl Grower {
    fn add(&mut self, t: [VertexId; 3], color: Color) -> Result<()> {
        let k = key(t[0], t[1], t[2]);
        match self.index.get(&k) {
            Some(&i) if self.colors[i] != color => Err(HyperError::GrowthFailure(t[0])),
            Some(_) => Ok(()),
            None => {
                self.index.insert(k, self.triangles.len());
                self.triangles.push(t);
                self.colors.push(color);
                Ok(())
            }
        }
    }

    fn color(&self, a: VertexId, b: VertexId, c: VertexId) -> Color {
        self.colors[self.index[&key(a, b, c)]]
    }
}

/// Grows `D_r`. Each vertex of the outer cycle is completed to degree 8;
/// the new triangles over the cycle edges share their apex with the
/// neighbouring vertex, and colours alternate around every vertex.
pub fn build_ball(r: usize) -> HyperbolicBall {
    grow(r).expect("order-8 growth closes at every layer")
}

fn grow(r: usize) -> Result<HyperbolicBall> {
    let mut g = Grower { rotation: vec![vec![]], triangles: vec![], colors: vec![], index: HashMap::new() };
    let mut layers = vec![vec![0]];
    let mut ccw_cycles: Vec<Vec<VertexId>> = Vec::new();
    if r >= 1 {
        let cycle: Vec<VertexId> = (1..=DEGREE).collect();
        g.rotation[0] = cycle.clone();
        for i in 0..DEGREE {
            let (v, next, prev) = (cycle[i], cycle[(i + 1) % DEGREE], cycle[(i + DEGREE - 1) % DEGREE]);
            g.rotation.push(vec![next, 0, prev]);
            let color = if i % 2 == 0 { Color::Black } else { Color::White };
            g.add([0, v, next], color)?;
        }
        layers.push(cycle.clone());
        ccw_cycles.push(cycle);
    }
    for _ in 2..=r {
        let cycle = ccw_cycles.last().unwrap().clone();
        let n = cycle.len();
        let mut next_id = g.rotation.len();
        // exclusives[i] are the new neighbours of cycle[i] between the apexes
        let mut exclusives = Vec::with_capacity(n);
        let mut apex = Vec::with_capacity(n);
        let mut new_cycle = Vec::new();
        for &c in &cycle {
            let t = g.rotation[c].len() - 1;
            if t > 4 {
                return Err(HyperError::GrowthFailure(c));
            }
            let ex: Vec<VertexId> = (0..5 - t).map(|j| next_id + j).collect();
            next_id += ex.len();
            new_cycle.extend(&ex);
            exclusives.push(ex);
            apex.push(next_id);
            new_cycle.push(next_id);
            next_id += 1;
        }
        g.rotation.resize(next_id, Vec::new());
        for i in 0..n {
            let c = cycle[i];
            let (prev, next) = (cycle[(i + n - 1) % n], cycle[(i + 1) % n]);
            let mut outer = vec![apex[(i + n - 1) % n]];
            outer.extend(&exclusives[i]);
            outer.push(apex[i]);
            let fan = &g.rotation[c];
            let inner = g.color(c, fan[fan.len() - 2], fan[fan.len() - 1]);
            let mut color = inner.opposite();
            g.add([c, prev, outer[0]], color)?;
            for w in outer.windows(2) {
                color = color.opposite();
                g.add([c, w[0], w[1]], color)?;
            }
            color = color.opposite();
            g.add([c, *outer.last().unwrap(), next], color)?;
            g.rotation[c].extend(outer);
            if g.rotation[c].len() != DEGREE {
                return Err(HyperError::GrowthFailure(c));
            }
        }
        // open fans of the new vertices, from the next cycle vertex to the previous
        for i in 0..n {
            for &x in &exclusives[i] {
                g.rotation[x] = vec![cycle[i]];
            }
            g.rotation[apex[i]] = vec![cycle[(i + 1) % n], cycle[i]];
        }
        let m = new_cycle.len();
        for j in 0..m {
            let v = new_cycle[j];
            let mut fan = vec![new_cycle[(j + 1) % m]];
            fan.append(&mut g.rotation[v]);
            fan.push(new_cycle[(j + m - 1) % m]);
            g.rotation[v] = fan;
        }
        layers.push(new_cycle.clone());
        ccw_cycles.push(new_cycle);
    }
    let ball = HyperbolicBall::from_parts(
        r,
        g.triangles,
        g.colors,
        layers,
        ccw_cycles.iter().map(|c| c.iter().rev().copied().collect()).collect(),
    )?;
    // the incrementally maintained rotation must agree with the recomputed one
    for (v, rot) in g.rotation.iter().enumerate() {
        if ball.layer_of[v] < r && *rot != ball.rotation[v] {
            let k = rot.iter().position(|x| *x == ball.rotation[v][0]).ok_or(HyperError::GrowthFailure(v))?;
            let mut r2 = rot.clone();
            r2.rotate_left(k);
            if r2 != ball.rotation[v] {
                return Err(HyperError::GrowthFailure(v));
            }
        }
    }
    Ok(ball)
}

#[derive(Serialize, Deserialize)]
struct BallJson {
    radius: usize,
    dimension: usize,
    vertices: Vec<VertexId>,
    simplices: Vec<Vec<VertexId>>,
    colors: Vec<String>,
    layers: Vec<Vec<VertexId>>,
    boundary_cycles: Vec<Vec<VertexId>>,
}

impl HyperbolicBall {
    /// Assembles a ball from counter-clockwise triangles, recomputing the
    /// rotation system from them.
    pub fn from_parts(
        radius: usize,
        triangles: Vec<[VertexId; 3]>,
        colors: Vec<Color>,
        layers: Vec<Vec<VertexId>>,
        boundary_cycles: Vec<Vec<VertexId>>,
    ) -> Result<Self> {
        let nv = layers.iter().map(Vec::len).sum::<usize>();
        let mut layer_of = vec![usize::MAX; nv];
        for (k, layer) in layers.iter().enumerate() {
            for &v in layer {
                *layer_of.get_mut(v).ok_or(HyperError::UnknownVertex(v))? = k;
            }
        }
        let mut succ: Vec<HashMap<VertexId, VertexId>> = vec![HashMap::new(); nv];
        let mut index = HashMap::new();
        for (i, t) in triangles.iter().enumerate() {
            for j in 0..3 {
                let (a, b, c) = (t[j], t[(j + 1) % 3], t[(j + 2) % 3]);
                if a >= nv || b >= nv || c >= nv {
                    return Err(HyperError::UnknownVertex(a.max(b).max(c)));
                }
                succ[a].insert(b, c);
            }
            index.insert(key(t[0], t[1], t[2]), i);
        }
        let mut rotation = Vec::with_capacity(nv);
        for (v, s) in succ.iter().enumerate() {
            if s.is_empty() {
                rotation.push(Vec::new());
                continue;
            }
            let targets: BTreeSet<VertexId> = s.values().copied().collect();
            let start = s.keys().copied().filter(|a| !targets.contains(a)).min();
            let closed = start.is_none();
            let start = start.unwrap_or_else(|| *s.keys().min().unwrap());
            let mut rot = vec![start];
            let mut cur = start;
            while let Some(&nx) = s.get(&cur) {
                if nx == start {
                    break;
                }
                rot.push(nx);
                cur = nx;
                if rot.len() > s.len() + 1 {
                    return Err(HyperError::GrowthFailure(v));
                }
            }
            if closed && rot.len() != s.len() {
                return Err(HyperError::GrowthFailure(v));
            }
            rotation.push(rot);
        }
        Ok(Self { radius, layers, boundary_cycles, triangles, colors, layer_of, rotation, index })
    }

    pub fn num_vertices(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layer(&self, v: VertexId) -> usize {
        self.layer_of[v]
    }

    /// Vertices of `D_k`.
    pub fn ball_vertices(&self, k: usize) -> Vec<VertexId> {
        self.layers.iter().take(k + 1).flatten().copied().collect()
    }

    pub fn rotation(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v]
    }

    /// A vertex whose full star lies in the ball.
    pub fn is_complete(&self, v: VertexId) -> bool {
        self.layer_of[v] < self.radius
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v]
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.rotation[a].contains(&b)
    }

    pub fn triangle_index(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<usize> {
        self.index.get(&key(a, b, c)).copied()
    }

    /// Triangle on the right of the directed edge `u → v`.
    pub fn right_triangle(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|x| *x == u)?;
        // at v the right side of u → v starts ccw from u
        let w = if self.is_complete(v) { rot[(i + 1) % DEGREE] } else { *rot.get(i + 1)? };
        self.triangle_index(u, v, w)
    }

    pub fn boundary_size(&self, k: usize) -> usize {
        self.layers.get(k).map_or(0, Vec::len)
    }

    pub fn boundary_cycle(&self, k: usize) -> Result<&[VertexId]> {
        if k == 0 || k > self.radius {
            return Err(HyperError::LayerOutOfRange { layer: k, radius: self.radius });
        }
        Ok(&self.boundary_cycles[k - 1])
    }

    /// Cyclic word of layer `k`: the colour of the triangle of `D_k` on the
    /// right of each boundary edge.
    pub fn boundary_word(&self, k: usize) -> Result<Word> {
        let cycle = self.boundary_cycle(k)?;
        let n = cycle.len();
        let letters = (0..n)
            .map(|i| {
                let t = self.right_triangle(cycle[i], cycle[(i + 1) % n]).expect("boundary edge has an inner triangle");
                self.colors[t]
            })
            .collect();
        Ok(Word::new(letters, true))
    }

    pub fn surface(&self) -> Result<(TriangulatedSurface, Coloring)> {
        let tris: Vec<Vec<VertexId>> = self.triangles.iter().map(|t| t.to_vec()).collect();
        let s = TriangulatedSurface::build(&tris)?;
        Ok((s, Coloring { colors: self.colors.clone() }))
    }

    pub fn black_triangles(&self) -> Vec<usize> {
        (0..self.triangles.len()).filter(|&t| self.colors[t] == Color::Black).collect()
    }

    /// Triangles with every vertex in the set.
    pub fn triangles_within(&self, vertices: &BTreeSet<VertexId>) -> Vec<usize> {
        (0..self.triangles.len()).filter(|&t| self.triangles[t].iter().all(|v| vertices.contains(v))).collect()
    }

    /// Number of triangles on the right of `p → v → n`, if the sector lies in
    /// the ball. A path doubling back (`p == n`) sweeps all eight.
    pub fn right_count(&self, p: VertexId, v: VertexId, n: VertexId) -> Option<usize> {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|x| *x == p)?;
        let j = rot.iter().position(|x| *x == n)?;
        if self.is_complete(v) {
            Some(if i == j { DEGREE } else { (j + DEGREE - i) % DEGREE })
        } else if i < j {
            Some(j - i)
        } else {
            None
        }
    }

    /// Graph distances from a vertex set.
    pub fn distances_from(&self, seed: &[VertexId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        for &s in seed {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &self.rotation[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = BallJson {
            radius: self.radius,
            dimension: 2,
            vertices: (0..self.num_vertices()).collect(),
            simplices: self.triangles.iter().map(|t| t.to_vec()).collect(),
            colors: self.colors.iter().map(|c| c.letter().to_string()).collect(),
            layers: self.layers.clone(),
            boundary_cycles: self.boundary_cycles.clone(),
        };
        serde_json::to_value(doc).expect("ball serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: BallJson = serde_json::from_value(value.clone()).map_err(|e| HyperError::Json(e.to_string()))?;
        let triangles = doc
            .simplices
            .iter()
            .map(|s| <[VertexId; 3]>::try_from(s.as_slice()).map_err(|_| HyperError::Json("simplex arity".into())))
            .collect::<Result<Vec<_>>>()?;
        let colors = doc
            .colors
            .iter()
            .map(|c| Color::from_letter(c).ok_or_else(|| HyperError::Json(format!("colour {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(doc.radius, triangles, colors, doc.layers, doc.boundary_cycles)
    }
}

/// Verdict of a right-convexity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    /// Right-side triangle count at each checked vertex; `None` where the
    /// sector leaves the ball.
    pub counts: Vec<Option<usize>>,
    pub unverified: usize,
    pub convex: bool,
}

/// Checks that the path bounds two or three triangles on its right at every
/// vertex. Open paths are checked at their inner vertices.
pub fn right_convex_check(ball: &HyperbolicBall, path: &[VertexId], closed: bool) -> Result<ConvexityReport> {
    let n = path.len();
    for &v in path {
        if v >= ball.num_vertices() {
            return Err(HyperError::UnknownVertex(v));
        }
    }
    let m = if closed { n } else { n.saturating_sub(1) };
    for i in 0..m {
        if !ball.adjacent(path[i], path[(i + 1) % n]) {
            return Err(HyperError::NotAPath(i));
        }
    }
    let range: Vec<usize> = if closed { (0..n).collect() } else { (1..n.saturating_sub(1)).collect() };
    let counts: Vec<Option<usize>> =
        range.iter().map(|&i| ball.right_count(path[(i + n - 1) % n], path[i], path[(i + 1) % n])).collect();
    let unverified = counts.iter().filter(|c| c.is_none()).count();
    let convex = counts.iter().flatten().all(|&c| c == 2 || c == 3);
    Ok(ConvexityReport { counts, unverified, convex })
}

/// Word of an open or closed path: the colour on the right of each edge.
pub fn path_word(ball: &HyperbolicBall, path: &[VertexId], closed: bool) -> Result<Word> {
    let n = path.len();
    let m = if closed { n } else { n.saturating_sub(1) };
    let mut letters = Vec::with_capacity(m);
    for i in 0..m {
        let t = ball.right_triangle(path[i], path[(i + 1) % n]).ok_or(HyperError::NotAPath(i))?;
        letters.push(ball.colors[t]);
    }
    Ok(Word::new(letters, closed))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    Center,
    /// The black triangle `(0, 1, 2)` at the centre.
    CentralTriangle,
    Vertices(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub seed: Seed,
    pub radius: usize,
}

/// `D_{K,r}` inside an ambient ball.
#[derive(Debug, Clone)]
pub struct Domain {
    pub vertices: BTreeSet<VertexId>,
    pub triangles: Vec<usize>,
}

impl DomainSpec {
    pub fn seed_vertices(&self) -> Vec<VertexId> {
        match &self.seed {
            Seed::Center => vec![0],
            Seed::CentralTriangle => vec![0, 1, 2],
            Seed::Vertices(v) => v.clone(),
        }
    }
}

/// Vertices within `r` edges of the seed, with the triangles they span.
/// The ambient ball must contain every such vertex.
pub fn build_domain(ball: &HyperbolicBall, spec: &DomainSpec) -> Result<Domain> {
    let seed = spec.seed_vertices();
    if seed.is_empty() {
        return Err(HyperError::EmptySeed);
    }
    for &v in &seed {
        if v >= ball.num_vertices() {
            return Err(HyperError::UnknownVertex(v));
        }
    }
    let seed_set: BTreeSet<VertexId> = seed.iter().copied().collect();
    // connectivity through edges inside the seed
    let mut seen = BTreeSet::from([seed[0]]);
    let mut queue = VecDeque::from([seed[0]]);
    while let Some(v) = queue.pop_front() {
        for &u in ball.neighbors(v) {
            if seed_set.contains(&u) && seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    if seen.len() != seed_set.len() {
        return Err(HyperError::DisconnectedSeed);
    }
    let needed = seed.iter().map(|&v| ball.layer(v)).max().unwrap() + spec.radius;
    if needed > ball.radius {
        return Err(HyperError::BallTooSmall { radius: ball.radius, needed });
    }
    let dist = ball.distances_from(&seed);
    let vertices: BTreeSet<VertexId> =
        (0..ball.num_vertices()).filter(|&v| dist[v].is_some_and(|d| d <= spec.radius)).collect();
    let triangles = ball.triangles_within(&vertices);
    Ok(Domain { vertices, triangles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_balls() {
        let b1 = build_ball(1);
        assert_eq!(b1.num_vertices(), 9);
        assert_eq!(b1.triangles.len(), 8);
        assert_eq!(b1.boundary_size(1), 8);
        let b = build_ball(4);
        let sizes: Vec<usize> = (1..=4).map(|k| b.boundary_size(k)).collect();
        assert_eq!(sizes, vec![8, 32, 120, 448]);
        for v in 0..b.num_vertices() {
            if b.is_complete(v) {
                assert_eq!(b.rotation(v).len(), DEGREE);
            }
        }
        let (s, c) = b.surface().unwrap();
        assert!(c.is_valid_for(&s));
        let dist = b.distances_from(&[0]);
        for v in 0..b.num_vertices() {
            assert_eq!(dist[v], Some(b.layer(v)));
        }
    }

    #[test]
    fn words_and_convexity() {
        let b = build_ball(3);
        let w1 = b.boundary_word(1).unwrap();
        assert!(w1.equivalent(&Word::parse("bwbwbwbw", true).unwrap()));
        let w2 = b.boundary_word(2).unwrap();
        assert!(w2.equivalent(&Word::parse(&"bwbwwbwb".repeat(4), true).unwrap()));
        for k in 1..=3 {
            let w = b.boundary_word(k).unwrap();
            assert_eq!(w.count(Color::Black), w.count(Color::White));
            let rep = right_convex_check(&b, b.boundary_cycle(k).unwrap(), true).unwrap();
            if k < 3 {
                assert!(rep.convex && rep.unverified == 0, "{k} {rep:?}");
            }
        }
        let c = b.boundary_cycle(1).unwrap();
        let back = [c[0], c[1], c[0]];
        assert!(!right_convex_check(&b, &back, false).unwrap().convex);
        assert!(matches!(right_convex_check(&b, &[c[0], c[2]], false), Err(HyperError::NotAPath(0))));
    }

    #[test]
    fn json_round_trip() {
        let b = build_ball(2);
        let j = b.to_json();
        let b2 = HyperbolicBall::from_json(&j).unwrap();
        assert_eq!(b2.to_json(), j);
        for v in 0..b.num_vertices() {
            assert_eq!(b.rotation(v), b2.rotation(v));
        }
    }

    #[test]
    fn domains() {
        let b = build_ball(4);
        let d = build_domain(&b, &DomainSpec { seed: Seed::Center, radius: 2 }).unwrap();
        assert_eq!(d.vertices.len(), 41);
        let t = build_domain(&b, &DomainSpec { seed: Seed::CentralTriangle, radius: 0 }).unwrap();
        assert_eq!(t.vertices.len(), 3);
        assert_eq!(t.triangles.len(), 1);
        let k: Vec<VertexId> = build_domain(&b, &DomainSpec { seed: Seed::CentralTriangle, radius: 1 })
            .unwrap()
            .vertices
            .into_iter()
            .collect();
        let a = build_domain(&b, &DomainSpec { seed: Seed::Vertices(k), radius: 1 }).unwrap();
        let c = build_domain(&b, &DomainSpec { seed: Seed::CentralTriangle, radius: 2 }).unwrap();
        assert_eq!(a.vertices, c.vertices);
        assert!(matches!(
            build_domain(&b, &DomainSpec { seed: Seed::Vertices(vec![1, 5]), radius: 1 }),
            Err(HyperError::DisconnectedSeed)
        ));
    }
}
