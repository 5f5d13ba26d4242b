//! Simplicial complexes with black/white structure and discrete connections.
//!
//! A [`TriangulatedSurface`] is a pure n-dimensional pseudomanifold. Top
//! simplices are stored with sorted vertex lists; the orientation, when one
//! exists, is kept as a sign per simplex relative to that sorted order.
//!
//! A [`Connection`] attaches a nonzero coefficient `b_{T:P}` to every vertex
//! of every top simplex. Parallel transport across a thick path solves
//! `Σ_P b_{T:P} ψ(P) = 0` one simplex at a time.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::scalar::Field;

pub type VertexId = usize;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ComplexError {
    #[error("empty simplex list")]
    EmptyInput,
    #[error("simplex {index} has {found} vertices, expected {expected}")]
    NonUniformArity { index: usize, expected: usize, found: usize },
    #[error("simplex {0} repeats a vertex")]
    DegenerateSimplex(usize),
    #[error("simplex {0} appears twice")]
    DuplicateSimplex(usize),
    #[error("face {face:?} lies in {count} simplices")]
    NonManifold { face: Vec<VertexId>, count: usize },
    #[error("vertex {0} belongs to no simplex")]
    IsolatedVertex(VertexId),
    #[error("unknown simplex index {0}")]
    UnknownSimplex(usize),
    #[error("simplices at position {0} and the next one do not share a facet")]
    NotAPath(usize),
    #[error("thick path is not closed")]
    NotClosed,
    #[error("degenerate thick path at position {0}")]
    DegeneratePath(usize),
    #[error("input values do not sit on a facet of the first simplex")]
    DomainMismatch,
    #[error("surface admits no black/white coloring")]
    NotColorable { witness: ThickPath },
    #[error("vertex {0} is on the boundary")]
    BoundaryVertex(VertexId),
    #[error("connection is not flat")]
    NotFlat { witness: Option<ThickPath> },
    #[error("the dual graph of the surface is disconnected")]
    Disconnected,
    #[error("gauge function vanishes at vertex {0}")]
    ZeroGaugeValue(VertexId),
    #[error("connection coefficient vanishes on simplex {simplex}")]
    ZeroCoefficient { simplex: usize },
    #[error("coloring has {found} entries for {expected} simplices")]
    ColoringSize { expected: usize, found: usize },
    #[error("invalid color `{0}`")]
    BadColor(String),
}

pub type Result<T> = std::result::Result<T, ComplexError>;

/// Sign of the permutation that sorts `tuple`.
pub fn sort_sign(tuple: &[VertexId]) -> i8 {
    let mut sign = 1;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn without(simplex: &[VertexId], i: usize) -> Vec<VertexId> {
    simplex.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect()
}

#[derive(Debug, Clone)]
pub struct TriangulatedSurface {
    dimension: usize,
    vertices: Vec<VertexId>,
    simplices: Vec<Vec<VertexId>>,
    orientation: Option<Vec<i8>>,
    facets: HashMap<Vec<VertexId>, Vec<usize>>,
    index: HashMap<Vec<VertexId>, usize>,
    star: BTreeMap<VertexId, Vec<usize>>,
}

impl TriangulatedSurface {
    /// Builds the complex from top simplices. The vertex order of each input
    /// tuple is used as the preferred orientation when the complex is
    /// orientable: the orientation is propagated from simplex 0.
    pub fn build(simplex_list: &[Vec<VertexId>]) -> Result<Self> {
        let first = simplex_list.first().ok_or(ComplexError::EmptyInput)?;
        let arity = first.len();
        if arity < 2 {
            return Err(ComplexError::NonUniformArity { index: 0, expected: 2, found: arity });
        }
        let mut simplices = Vec::with_capacity(simplex_list.len());
        let mut input_sign = Vec::with_capacity(simplex_list.len());
        let mut index = HashMap::new();
        for (i, s) in simplex_list.iter().enumerate() {
            if s.len() != arity {
                return Err(ComplexError::NonUniformArity { index: i, expected: arity, found: s.len() });
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::DegenerateSimplex(i));
            }
            if index.insert(sorted.clone(), i).is_some() {
                return Err(ComplexError::DuplicateSimplex(i));
            }
            input_sign.push(sort_sign(s));
            simplices.push(sorted);
        }
        let mut facets: HashMap<Vec<VertexId>, Vec<usize>> = HashMap::new();
        let mut star: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (t, s) in simplices.iter().enumerate() {
            for i in 0..arity {
                facets.entry(without(s, i)).or_default().push(t);
                star.entry(s[i]).or_default().push(t);
            }
        }
        if let Some((face, ts)) = facets.iter().find(|(_, ts)| ts.len() > 2) {
            let mut face = face.clone();
            face.sort_unstable();
            return Err(ComplexError::NonManifold { face, count: ts.len() });
        }
        let vertices = star.keys().copied().collect();
        let mut surface = Self {
            dimension: arity - 1,
            vertices,
            simplices,
            orientation: None,
            facets,
            index,
            star,
        };
        surface.orientation = surface.orient(&input_sign);
        Ok(surface)
    }

    /// Consistent orientation per dual component, seeded from the input signs.
    fn orient(&self, input_sign: &[i8]) -> Option<Vec<i8>> {
        let mut sign = vec![0i8; self.simplices.len()];
        for root in 0..self.simplices.len() {
            if sign[root] != 0 {
                continue;
            }
            sign[root] = input_sign[root];
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for i in 0..=self.dimension {
                    let face = without(&self.simplices[t], i);
                    let induced = if i % 2 == 0 { sign[t] } else { -sign[t] };
                    for &u in &self.facets[&face] {
                        if u == t {
                            continue;
                        }
                        let j = self.simplices[u].iter().position(|v| !face.contains(v)).unwrap();
                        // u must induce the opposite orientation on the shared face
                        let want = if j % 2 == 0 { -induced } else { induced };
                        if sign[u] == 0 {
                            sign[u] = want;
                            queue.push_back(u);
                        } else if sign[u] != want {
                            return None;
                        }
                    }
                }
            }
        }
        Some(sign)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<VertexId>] {
        &self.simplices
    }

    pub fn simplex(&self, t: usize) -> &[VertexId] {
        &self.simplices[t]
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    /// Orientation signs relative to sorted vertex order, if orientable.
    pub fn orientation(&self) -> Option<&[i8]> {
        self.orientation.as_deref()
    }

    pub fn is_orientable(&self) -> bool {
        self.orientation.is_some()
    }

    /// Vertices of simplex `t` in its oriented order (sorted order when the
    /// surface is not orientable).
    pub fn oriented_simplex(&self, t: usize) -> Vec<VertexId> {
        let mut s = self.simplices[t].clone();
        if self.orientation.as_ref().is_some_and(|o| o[t] < 0) {
            s.swap(0, 1);
        }
        s
    }

    pub fn simplex_index(&self, vertices: &[VertexId]) -> Option<usize> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    /// Simplices containing the sorted (n−1)-face.
    pub fn facet_simplices(&self, face: &[VertexId]) -> &[usize] {
        self.facets.get(face).map_or(&[], |v| v.as_slice())
    }

    /// Facet neighbours of `t` with the shared face.
    pub fn neighbors(&self, t: usize) -> Vec<(usize, Vec<VertexId>)> {
        let mut out = Vec::new();
        for i in 0..=self.dimension {
            let face = without(&self.simplices[t], i);
            for &u in &self.facets[&face] {
                if u != t {
                    out.push((u, face.clone()));
                }
            }
        }
        out
    }

    pub fn shared_face(&self, t: usize, u: usize) -> Option<Vec<VertexId>> {
        let a = &self.simplices[t];
        let b = &self.simplices[u];
        let common: Vec<VertexId> = a.iter().filter(|v| b.contains(v)).copied().collect();
        (t != u && common.len() == self.dimension).then_some(common)
    }

    pub fn boundary_faces(&self) -> Vec<Vec<VertexId>> {
        let mut faces: Vec<Vec<VertexId>> =
            self.facets.iter().filter(|(_, ts)| ts.len() == 1).map(|(f, _)| f.clone()).collect();
        faces.sort();
        faces
    }

    pub fn is_closed(&self) -> bool {
        self.facets.values().all(|ts| ts.len() == 2)
    }

    pub fn star(&self, v: VertexId) -> &[usize] {
        self.star.get(&v).map_or(&[], |s| s.as_slice())
    }

    /// Number of top simplices containing `v` (`m_P`).
    pub fn degree(&self, v: VertexId) -> usize {
        self.star(v).len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.star.contains_key(&v)
    }

    /// Sorted (n−2)-faces containing `v`.
    pub fn codim2_faces_at(&self, v: VertexId) -> Vec<Vec<VertexId>> {
        let mut out = BTreeSet::new();
        for &t in self.star(v) {
            let s = &self.simplices[t];
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    let face: Vec<VertexId> =
                        s.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| *x).collect();
                    if self.dimension < 2 || face.contains(&v) {
                        out.insert(face);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn codim2_faces(&self) -> Vec<Vec<VertexId>> {
        let mut out = BTreeSet::new();
        for s in &self.simplices {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    out.insert(s.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| *x).collect());
                }
            }
        }
        out.into_iter().collect()
    }

    /// The simplices around a sorted (n−2)-face in cyclic order, or `None`
    /// when the link is not a closed cycle.
    pub fn link_cycle(&self, face: &[VertexId]) -> Option<Vec<usize>> {
        let start = *self
            .star(*face.first()?)
            .iter()
            .find(|&&t| face.iter().all(|v| self.simplices[t].contains(v)))?;
        let facet_through = |t: usize, skip: &[VertexId]| -> Vec<Vec<VertexId>> {
            let s = &self.simplices[t];
            s.iter()
                .filter(|v| !face.contains(v))
                .map(|drop| s.iter().filter(|v| *v != drop).copied().collect::<Vec<_>>())
                .filter(|f| f.as_slice() != skip)
                .collect()
        };
        let mut cycle = vec![start];
        let mut prev_face: Vec<VertexId> = Vec::new();
        let mut t = start;
        loop {
            let next_faces = facet_through(t, &prev_face);
            let f = next_faces.into_iter().next()?;
            let u = *self.facets[&f].iter().find(|&&u| u != t)?;
            if u == start {
                return Some(cycle);
            }
            if cycle.contains(&u) {
                return None;
            }
            cycle.push(u);
            prev_face = f;
            t = u;
        }
    }

    /// Connected components of the dual graph.
    pub fn dual_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.simplices.len()];
        let mut comps = Vec::new();
        for root in 0..self.simplices.len() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for (u, _) in self.neighbors(t) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn to_json(&self, coloring: Option<&Coloring>) -> serde_json::Value {
        let doc = SurfaceJson {
            dimension: self.dimension,
            vertices: self.vertices.clone(),
            simplices: self.simplices.clone(),
            colors: coloring.map(|c| c.colors.iter().map(|c| c.letter().to_string()).collect()),
            orientation: self.orientation.clone(),
        };
        serde_json::to_value(doc).expect("surface serializes")
    }

    /// Parses the surface JSON schema; returns the surface and its coloring
    /// if one was present.
    pub fn from_json(value: &serde_json::Value) -> std::result::Result<(Self, Option<Coloring>), SurfaceJsonError> {
        let doc: SurfaceJson = serde_json::from_value(value.clone())?;
        let simplices = match &doc.orientation {
            Some(signs) if signs.len() == doc.simplices.len() => doc
                .simplices
                .iter()
                .zip(signs)
                .map(|(s, &o)| {
                    let mut s = s.clone();
                    s.sort_unstable();
                    if o < 0 {
                        s.swap(0, 1);
                    }
                    s
                })
                .collect(),
            _ => doc.simplices.clone(),
        };
        let surface = Self::build(&simplices)?;
        if surface.dimension != doc.dimension {
            return Err(SurfaceJsonError::Schema(format!(
                "dimension {} does not match simplices of dimension {}",
                doc.dimension, surface.dimension
            )));
        }
        let listed: BTreeSet<VertexId> = doc.vertices.iter().copied().collect();
        if let Some(v) = listed.iter().find(|v| !surface.contains_vertex(**v)) {
            return Err(ComplexError::IsolatedVertex(*v).into());
        }
        let coloring = match doc.colors {
            None => None,
            Some(letters) => {
                if letters.len() != surface.num_simplices() {
                    return Err(ComplexError::ColoringSize {
                        expected: surface.num_simplices(),
                        found: letters.len(),
                    }
                    .into());
                }
                let colors = letters
                    .iter()
                    .map(|s| Color::from_letter(s).ok_or_else(|| ComplexError::BadColor(s.clone())))
                    .collect::<Result<Vec<_>>>()?;
                Some(Coloring { colors })
            }
        };
        Ok((surface, coloring))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SurfaceJson {
    dimension: usize,
    vertices: Vec<VertexId>,
    simplices: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<Vec<i8>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SurfaceJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{0}")]
    Schema(String),
}

/// Convenience wrapper matching the other free-function constructors.
pub fn build_surface(simplex_list: &[Vec<VertexId>]) -> Result<TriangulatedSurface> {
    TriangulatedSurface::build(simplex_list)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn letter(self) -> char {
        match self {
            Color::Black => 'b',
            Color::White => 'w',
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "b" => Some(Color::Black),
            "w" => Some(Color::White),
            _ => None,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<Color>,
}

impl Coloring {
    pub fn color(&self, t: usize) -> Color {
        self.colors[t]
    }

    pub fn of(&self, color: Color) -> Vec<usize> {
        (0..self.colors.len()).filter(|&t| self.colors[t] == color).collect()
    }

    pub fn swapped(&self) -> Self {
        Self { colors: self.colors.iter().map(|c| c.opposite()).collect() }
    }

    /// True iff facet-adjacent simplices carry opposite colors.
    pub fn is_valid_for(&self, surface: &TriangulatedSurface) -> bool {
        self.colors.len() == surface.num_simplices()
            && (0..surface.num_simplices())
                .all(|t| surface.neighbors(t).iter().all(|(u, _)| self.colors[*u] != self.colors[t]))
    }
}

/// Sequence of top simplices, consecutive ones sharing an (n−1)-face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThickPath {
    pub simplices: Vec<usize>,
    pub shared_faces: Vec<Vec<VertexId>>,
}

impl ThickPath {
    /// Backtracking (`T_{j+2} = T_j`) is accepted here because parity is well
    /// defined for such paths; transport rejects it.
    pub fn new(surface: &TriangulatedSurface, simplices: Vec<usize>) -> Result<Self> {
        if simplices.is_empty() {
            return Err(ComplexError::EmptyInput);
        }
        if let Some(&t) = simplices.iter().find(|&&t| t >= surface.num_simplices()) {
            return Err(ComplexError::UnknownSimplex(t));
        }
        let shared_faces = simplices
            .windows(2)
            .enumerate()
            .map(|(j, w)| surface.shared_face(w[0], w[1]).ok_or(ComplexError::NotAPath(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { simplices, shared_faces })
    }

    /// Closed path `T_1 … T_s T_1` through a cyclic list of simplices.
    pub fn closed(surface: &TriangulatedSurface, cycle: &[usize]) -> Result<Self> {
        let mut s = cycle.to_vec();
        s.push(*cycle.first().ok_or(ComplexError::EmptyInput)?);
        Self::new(surface, s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.simplices.first() == self.simplices.last()
    }

    pub fn first(&self) -> usize {
        self.simplices[0]
    }

    /// Rejects the configurations where the simplex equation cannot carry
    /// values forward: repeated consecutive faces, and for closed paths the
    /// arrival face coinciding with the first departure face.
    pub fn check_nondegenerate(&self) -> Result<()> {
        for j in 0..self.shared_faces.len().saturating_sub(1) {
            if self.shared_faces[j] == self.shared_faces[j + 1] {
                return Err(ComplexError::DegeneratePath(j + 1));
            }
        }
        let k = self.shared_faces.len();
        if self.is_closed() && k >= 2 && self.shared_faces[0] == self.shared_faces[k - 1] {
            return Err(ComplexError::DegeneratePath(0));
        }
        Ok(())
    }
}

/// Parity of a closed thick path: number of simplex steps mod 2.
pub fn phi2(path: &ThickPath) -> Result<u8> {
    if !path.is_closed() {
        return Err(ComplexError::NotClosed);
    }
    Ok((path.len() % 2) as u8)
}

/// Two-colors the top simplices so that facet neighbours differ, or returns
/// an odd closed thick path proving that no coloring exists.
pub fn find_bw_coloring(surface: &TriangulatedSurface) -> Result<Coloring> {
    for face in surface.codim2_faces() {
        if let Some(cycle) = surface.link_cycle(&face) {
            if cycle.len() % 2 == 1 {
                return Err(ComplexError::NotColorable { witness: ThickPath::closed(surface, &cycle)? });
            }
        }
    }
    let n = surface.num_simplices();
    let mut color: Vec<Option<Color>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(Color::Black);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            let c = color[t].unwrap();
            for (u, _) in surface.neighbors(t) {
                match color[u] {
                    None => {
                        color[u] = Some(c.opposite());
                        parent[u] = Some(t);
                        queue.push_back(u);
                    }
                    Some(cu) if cu == c => {
                        let cycle = tree_cycle(&parent, t, u);
                        return Err(ComplexError::NotColorable { witness: ThickPath::closed(surface, &cycle)? });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(Coloring { colors: color.into_iter().map(Option::unwrap).collect() })
}

fn ancestors(parent: &[Option<usize>], mut t: usize) -> Vec<usize> {
    let mut out = vec![t];
    while let Some(p) = parent[t] {
        out.push(p);
        t = p;
    }
    out
}

/// Cycle `t → … → lca → … → u` closed by the non-tree edge `u → t`.
fn tree_cycle(parent: &[Option<usize>], t: usize, u: usize) -> Vec<usize> {
    let at = ancestors(parent, t);
    let au = ancestors(parent, u);
    let lca = *at.iter().find(|x| au.contains(x)).expect("same component");
    let mut cycle: Vec<usize> = at.iter().copied().take_while(|&x| x != lca).collect();
    cycle.push(lca);
    let tail: Vec<usize> = au.iter().copied().take_while(|&x| x != lca).collect();
    cycle.extend(tail.into_iter().rev());
    cycle
}

/// A function on vertices with exact or floating scalar values.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction<S> {
    pub values: BTreeMap<VertexId, S>,
}

impl<S> Default for VertexFunction<S> {
    fn default() -> Self {
        Self { values: BTreeMap::new() }
    }
}

impl<S: Clone> VertexFunction<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VertexId) -> Option<&S> {
        self.values.get(&v)
    }

    pub fn set(&mut self, v: VertexId, value: S) {
        self.values.insert(v, value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> VertexFunction<T> {
        VertexFunction { values: self.values.iter().map(|(k, v)| (*k, f(v))).collect() }
    }
}

impl<S: Field> VertexFunction<S> {
    pub fn constant(vertices: &[VertexId], c: S) -> Self {
        vertices.iter().map(|&v| (v, c.clone())).collect()
    }

    /// Value at `v`, with missing entries read as zero.
    pub fn at(&self, v: VertexId) -> S {
        self.values.get(&v).cloned().unwrap_or_else(S::zero)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.values {
            let cur = out.at(*k);
            out.values.insert(*k, cur + v.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
}

impl<S> FromIterator<(VertexId, S)> for VertexFunction<S> {
    fn from_iter<I: IntoIterator<Item = (VertexId, S)>>(iter: I) -> Self {
        Self { values: iter.into_iter().collect() }
    }
}

/// Coefficients `b_{T:P}`, aligned with each simplex's sorted vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<S> {
    simplices: Vec<Vec<VertexId>>,
    coeffs: Vec<Vec<S>>,
}

impl<S: Field> Connection<S> {
    /// All coefficients equal to one.
    pub fn canonical(surface: &TriangulatedSurface) -> Self {
        let simplices = surface.simplices().to_vec();
        let coeffs = simplices.iter().map(|s| vec![S::one(); s.len()]).collect();
        Self { simplices, coeffs }
    }

    pub fn from_coefficients(surface: &TriangulatedSurface, coeffs: Vec<Vec<S>>) -> Result<Self> {
        if coeffs.len() != surface.num_simplices() {
            return Err(ComplexError::ColoringSize { expected: surface.num_simplices(), found: coeffs.len() });
        }
        for (t, row) in coeffs.iter().enumerate() {
            if row.len() != surface.dimension() + 1 || row.iter().any(|b| b.is_zero()) {
                return Err(ComplexError::ZeroCoefficient { simplex: t });
            }
        }
        Ok(Self { simplices: surface.simplices().to_vec(), coeffs })
    }

    pub fn coefficients(&self, t: usize) -> &[S] {
        &self.coeffs[t]
    }

    pub fn coefficient(&self, t: usize, v: VertexId) -> Option<&S> {
        let i = self.simplices.get(t)?.iter().position(|&x| x == v)?;
        Some(&self.coeffs[t][i])
    }

    /// `μ^T_{PP'} = b_{T:P} / b_{T:P'}`.
    pub fn ratio(&self, t: usize, p: VertexId, p2: VertexId) -> Option<S> {
        Some(self.coefficient(t, p)?.clone() / self.coefficient(t, p2)?.clone())
    }

    pub fn is_canonical(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|b| b.is_one()))
    }

    /// Value at the one vertex of `t` missing from `known`, from the simplex
    /// equation `Σ b_{T:P} ψ(P) = 0`.
    fn solve_simplex(&self, t: usize, known: &BTreeMap<VertexId, S>) -> (VertexId, S) {
        let s = &self.simplices[t];
        let mut missing = None;
        let mut acc = S::zero();
        for (i, v) in s.iter().enumerate() {
            match known.get(v) {
                Some(x) => acc = acc + self.coeffs[t][i].clone() * x.clone(),
                None => missing = Some(i),
            }
        }
        let i = missing.expect("exactly one unknown vertex");
        (s[i], -acc / self.coeffs[t][i].clone())
    }

    /// Residual `Σ_P b_{T:P} ψ(P)` on simplex `t`.
    pub fn residual(&self, t: usize, psi: &VertexFunction<S>) -> S {
        self.simplices[t]
            .iter()
            .zip(&self.coeffs[t])
            .fold(S::zero(), |acc, (v, b)| acc + b.clone() * psi.at(*v))
    }
}

/// Values on every simplex of the path, starting from `in_values` on a facet
/// of the first simplex.
fn transport_all<S: Field>(
    conn: &Connection<S>,
    path: &ThickPath,
    in_values: &VertexFunction<S>,
) -> Result<Vec<BTreeMap<VertexId, S>>> {
    path.check_nondegenerate()?;
    let first = &conn.simplices[path.first()];
    let n = first.len() - 1;
    let in_face: Vec<VertexId> = in_values.values.keys().copied().collect();
    if in_face.len() != n || !in_face.iter().all(|v| first.contains(v)) {
        return Err(ComplexError::DomainMismatch);
    }
    if path.shared_faces.first() == Some(&in_face) {
        return Err(ComplexError::DegeneratePath(0));
    }
    let mut out = Vec::with_capacity(path.simplices.len());
    let mut current = in_values.values.clone();
    for (j, &t) in path.simplices.iter().enumerate() {
        let (v, x) = conn.solve_simplex(t, &current);
        let mut full = current.clone();
        full.insert(v, x);
        out.push(full.clone());
        if let Some(face) = path.shared_faces.get(j) {
            current = face.iter().map(|v| (*v, full[v].clone())).collect();
        }
    }
    Ok(out)
}

/// Parallel transport along a thick path.
///
/// `in_values` lives on a facet of `T_1`. The result lives on the arrival
/// face `Δ_{k−1}` of the last simplex; a single-simplex path returns the
/// input unchanged.
pub fn parallel_transport<S: Field>(
    conn: &Connection<S>,
    path: &ThickPath,
    in_values: &VertexFunction<S>,
) -> Result<VertexFunction<S>> {
    if path.is_empty() {
        let first = &conn.simplices[path.first()];
        if in_values.len() + 1 != first.len() || !in_values.values.keys().all(|v| first.contains(v)) {
            return Err(ComplexError::DomainMismatch);
        }
        return Ok(in_values.clone());
    }
    let all = transport_all(conn, path, in_values)?;
    let face = path.shared_faces.last().unwrap();
    let last = &all[all.len() - 2];
    Ok(face.iter().map(|v| (*v, last[v].clone())).collect())
}

/// Linear holonomy of a closed thick path, acting on its arrival face.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyElement<S> {
    pub face: Vec<VertexId>,
    pub matrix: Matrix<S>,
    /// For the canonical connection: `perm[i] = j` when the value starting
    /// at the i-th vertex of `T_1` returns at the j-th vertex.
    pub permutation: Option<Vec<usize>>,
}

impl<S: Field> HolonomyElement<S> {
    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// Parity of a permutation given as an image vector: 0 even, 1 odd.
pub fn permutation_parity(perm: &[usize]) -> u8 {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for i in 0..perm.len() {
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    (transpositions % 2) as u8
}

pub fn holonomy<S: Field>(conn: &Connection<S>, path: &ThickPath) -> Result<HolonomyElement<S>> {
    if !path.is_closed() {
        return Err(ComplexError::NotClosed);
    }
    let first = conn.simplices[path.first()].clone();
    let n = first.len() - 1;
    if path.is_empty() {
        return Ok(HolonomyElement {
            face: first[..n].to_vec(),
            matrix: Matrix::identity(n),
            permutation: conn.is_canonical().then(|| (0..=n).collect()),
        });
    }
    let face = path.shared_faces.last().unwrap().clone();
    let mut columns = Vec::with_capacity(n);
    for i in 0..n {
        let e: VertexFunction<S> =
            face.iter().enumerate().map(|(j, v)| (*v, if i == j { S::one() } else { S::zero() })).collect();
        let out = parallel_transport(conn, path, &e)?;
        columns.push(face.iter().map(|v| out.values[v].clone()).collect());
    }
    let matrix = Matrix::from_columns(&columns);
    let permutation = if conn.is_canonical() {
        // Distinct values summing to zero, so they solve the canonical equation on T_1.
        let start: Vec<S> = (0..=n).map(|j| S::from_i64(2 * j as i64 - n as i64)).collect();
        let seed: VertexFunction<S> =
            face.iter().map(|v| (*v, start[first.iter().position(|x| x == v).unwrap()].clone())).collect();
        let all = transport_all(conn, path, &seed)?;
        let end = all.last().unwrap();
        let perm: Option<Vec<usize>> = (0..=n)
            .map(|i| first.iter().position(|v| end[v] == start[i]))
            .collect();
        perm
    } else {
        None
    };
    Ok(HolonomyElement { face, matrix, permutation })
}

/// Holonomies around every (n−2)-face in the star of `vertex`.
pub fn vertex_curvature<S: Field>(
    surface: &TriangulatedSurface,
    conn: &Connection<S>,
    vertex: VertexId,
) -> Result<Vec<HolonomyElement<S>>> {
    if !surface.contains_vertex(vertex) {
        return Err(ComplexError::DomainMismatch);
    }
    let mut out = Vec::new();
    for face in surface.codim2_faces_at(vertex) {
        let cycle = surface.link_cycle(&face).ok_or(ComplexError::BoundaryVertex(vertex))?;
        out.push(holonomy(conn, &ThickPath::closed(surface, &cycle)?)?);
    }
    Ok(out)
}

/// Drops immediate backtracks and trims matching ends of a closed walk.
fn reduce_closed_walk(walk: &[usize]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::new();
    for &t in walk {
        if stack.len() >= 2 && stack[stack.len() - 2] == t {
            stack.pop();
        } else {
            stack.push(t);
        }
    }
    while stack.len() >= 3 && stack[1] == stack[stack.len() - 2] {
        stack.pop();
        stack.remove(0);
    }
    stack
}

/// Basis of covariant constants (`Qψ = 0` on every simplex) of a flat
/// connection on a connected surface.
pub fn covariant_constant_basis<S: Field>(
    surface: &TriangulatedSurface,
    conn: &Connection<S>,
) -> Result<Vec<VertexFunction<S>>> {
    for face in surface.codim2_faces() {
        if let Some(cycle) = surface.link_cycle(&face) {
            let path = ThickPath::closed(surface, &cycle)?;
            if !holonomy(conn, &path)?.is_identity() {
                return Err(ComplexError::NotFlat { witness: Some(path) });
            }
        }
    }
    let count = surface.num_simplices();
    let mut parent: Vec<Option<usize>> = vec![None; count];
    let mut order = vec![0usize];
    let mut seen = vec![false; count];
    seen[0] = true;
    let mut k = 0;
    while k < order.len() {
        let t = order[k];
        k += 1;
        for (u, _) in surface.neighbors(t) {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some(t);
                order.push(u);
            }
        }
    }
    if order.len() != count {
        return Err(ComplexError::Disconnected);
    }
    let root = surface.simplex(0);
    let n = surface.dimension();
    let mut basis = Vec::with_capacity(n);
    for i in 0..n {
        let mut values: BTreeMap<VertexId, S> =
            root[..n].iter().enumerate().map(|(j, v)| (*v, if i == j { S::one() } else { S::zero() })).collect();
        for &t in &order {
            let s = surface.simplex(t);
            if s.iter().all(|v| values.contains_key(v)) {
                continue;
            }
            let known: BTreeMap<VertexId, S> =
                s.iter().filter_map(|v| values.get(v).map(|x| (*v, x.clone()))).collect();
            let (v, x) = conn.solve_simplex(t, &known);
            values.insert(v, x);
        }
        basis.push(VertexFunction { values });
    }
    let consistent =
        basis.iter().all(|psi| (0..count).all(|t| conn.residual(t, psi).is_zero()));
    if consistent {
        return Ok(basis);
    }
    for t in 0..count {
        for (u, _) in surface.neighbors(t) {
            if parent[u] == Some(t) || parent[t] == Some(u) || t > u {
                continue;
            }
            let mut walk: Vec<usize> = ancestors(&parent, t).into_iter().rev().collect();
            walk.extend(ancestors(&parent, u));
            let reduced = reduce_closed_walk(&walk);
            if reduced.len() < 2 {
                continue;
            }
            let path = ThickPath::new(surface, reduced)?;
            if path.check_nondegenerate().is_err() {
                continue;
            }
            if !holonomy(conn, &path)?.is_identity() {
                return Err(ComplexError::NotFlat { witness: Some(path) });
            }
        }
    }
    Err(ComplexError::NotFlat { witness: None })
}

/// Gauge transform `b'_{T:P} = b_{T:P} f(P)`; covariant constants of the new
/// connection are `ψ / f`.
pub fn gauge_conjugate<S: Field>(
    surface: &TriangulatedSurface,
    conn: &Connection<S>,
    f: &VertexFunction<S>,
) -> Result<Connection<S>> {
    for &v in surface.vertices() {
        match f.get(v) {
            Some(x) if !x.is_zero() => {}
            _ => return Err(ComplexError::ZeroGaugeValue(v)),
        }
    }
    let coeffs = (0..surface.num_simplices())
        .map(|t| {
            surface.simplex(t).iter().zip(conn.coefficients(t)).map(|(v, b)| b.clone() * f.at(*v)).collect()
        })
        .collect();
    Ok(Connection { simplices: surface.simplices().to_vec(), coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    pub(crate) fn octahedron() -> Vec<Vec<VertexId>> {
        // ±x = 0/1, ±y = 2/3, ±z = 4/5, oriented outward
        let mut out = Vec::new();
        for &(x, sx) in &[(0usize, 1i32), (1, -1)] {
            for &(y, sy) in &[(2usize, 1i32), (3, -1)] {
                for &(z, sz) in &[(4usize, 1i32), (5, -1)] {
                    if sx * sy * sz > 0 {
                        out.push(vec![x, y, z]);
                    } else {
                        out.push(vec![x, z, y]);
                    }
                }
            }
        }
        out
    }

    fn cone(s: usize) -> Vec<Vec<VertexId>> {
        (0..s).map(|i| vec![0, 1 + i, 1 + (i + 1) % s]).collect()
    }

    #[test]
    fn single_triangle_has_three_boundary_faces() {
        let s = build_surface(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(s.num_simplices(), 1);
        assert_eq!(s.boundary_faces().len(), 3);
        assert!(!s.is_closed());
    }

    #[test]
    fn octahedron_is_closed_and_orientable() {
        let s = build_surface(&octahedron()).unwrap();
        assert!(s.is_closed());
        assert!(s.is_orientable());
        assert!(s.vertices().iter().all(|&v| s.degree(v) == 4));
    }

    #[test]
    fn three_triangles_on_one_edge_is_non_manifold() {
        let err = build_surface(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap_err();
        assert!(matches!(err, ComplexError::NonManifold { count: 3, .. }));
        assert!(matches!(build_surface(&[]), Err(ComplexError::EmptyInput)));
    }

    #[test]
    fn odd_cone_is_not_colorable() {
        let s = build_surface(&cone(5)).unwrap();
        match find_bw_coloring(&s) {
            Err(ComplexError::NotColorable { witness }) => {
                assert_eq!(phi2(&witness).unwrap(), 1);
                assert_eq!(witness.len(), 5);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn even_cone_colors_and_has_trivial_curvature() {
        let s = build_surface(&cone(6)).unwrap();
        let c = find_bw_coloring(&s).unwrap();
        assert!(c.is_valid_for(&s));
        let conn = Connection::<Q>::canonical(&s);
        let hol = vertex_curvature(&s, &conn, 0).unwrap();
        assert_eq!(hol.len(), 1);
        assert!(hol[0].is_identity());
        assert!(matches!(vertex_curvature(&s, &conn, 1), Err(ComplexError::BoundaryVertex(1))));
    }

    #[test]
    fn odd_star_holonomy_is_a_transposition() {
        for s in [3usize, 5] {
            let surf = build_surface(&cone(s)).unwrap();
            let conn = Connection::<Q>::canonical(&surf);
            let h = &vertex_curvature(&surf, &conn, 0).unwrap()[0];
            assert!(!h.is_identity());
            assert!(h.matrix.mul(&h.matrix).is_identity());
            assert_eq!(permutation_parity(h.permutation.as_ref().unwrap()), 1);
        }
    }

    #[test]
    fn one_step_transport_solves_the_triangle() {
        let s = build_surface(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let conn = Connection::<Q>::canonical(&s);
        let path = ThickPath::new(&s, vec![0, 1]).unwrap();
        let input: VertexFunction<Q> = [(0, q(3)), (1, q(5))].into_iter().collect();
        let out = parallel_transport(&conn, &path, &input).unwrap();
        // ψ(2) = −8, carried on the shared face {1,2}
        assert_eq!(out, [(1, q(5)), (2, q(-8))].into_iter().collect());
        let same = ThickPath::new(&s, vec![0]).unwrap();
        assert_eq!(parallel_transport(&conn, &same, &input).unwrap(), input);
    }

    #[test]
    fn backtracking_path_is_even_but_not_transportable() {
        let s = build_surface(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let p = ThickPath::new(&s, vec![0, 1, 0]).unwrap();
        assert_eq!(phi2(&p).unwrap(), 0);
        let conn = Connection::<Q>::canonical(&s);
        assert!(matches!(holonomy(&conn, &p), Err(ComplexError::DegeneratePath(_))));
        let open = ThickPath::new(&s, vec![0, 1]).unwrap();
        assert!(matches!(phi2(&open), Err(ComplexError::NotClosed)));
    }

    #[test]
    fn octahedron_covariant_constants() {
        let s = build_surface(&octahedron()).unwrap();
        let conn = Connection::<Q>::canonical(&s);
        let basis = covariant_constant_basis(&s, &conn).unwrap();
        assert_eq!(basis.len(), 2);
        for psi in &basis {
            assert!((0..s.num_simplices()).all(|t| conn.residual(t, psi) == q(0)));
        }
    }

    #[test]
    fn gauge_rejects_zero_and_identity_is_noop() {
        let s = build_surface(&octahedron()).unwrap();
        let conn = Connection::<Q>::canonical(&s);
        let one = VertexFunction::constant(s.vertices(), q(1));
        assert_eq!(gauge_conjugate(&s, &conn, &one).unwrap(), conn);
        let mut f = one.clone();
        f.set(3, q(0));
        assert!(matches!(gauge_conjugate(&s, &conn, &f), Err(ComplexError::ZeroGaugeValue(3))));
    }

    #[test]
    fn json_round_trip_keeps_orientation_and_colors() {
        let s = build_surface(&octahedron()).unwrap();
        let c = find_bw_coloring(&s).unwrap();
        let v = s.to_json(Some(&c));
        let (back, colors) = TriangulatedSurface::from_json(&v).unwrap();
        assert_eq!(back.simplices(), s.simplices());
        assert_eq!(back.orientation(), s.orientation());
        assert_eq!(colors.unwrap(), c);
    }
}
