use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, VertexId};
use crate::cusped::CuspedComplex;

use super::strip::{Strip, StripEdge, StripVertex, TriangleId};
use super::ExcisionError;

/// Simplicial map from a strip into a cusped complex, given on vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripMap {
    pub strip: Strip,
    /// Indexed by strip vertex.
    pub images: Vec<VertexId>,
}

/// Whether three images span a vertex, an edge, or a triangular face.
pub(crate) fn simplex_ok(c: &Complex2, imgs: &[VertexId]) -> bool {
    let distinct: BTreeSet<VertexId> = imgs.iter().copied().collect();
    let d: Vec<VertexId> = distinct.into_iter().collect();
    for a in 0..d.len() {
        for b in a + 1..d.len() {
            if c.edge_between(d[a], d[b]).is_none() {
                return false;
            }
        }
    }
    if d.len() < 3 {
        return true;
    }
    let edges: Vec<_> = [(0, 1), (1, 2), (0, 2)]
        .iter()
        .map(|&(a, b)| c.edge_between(d[a], d[b]).expect("checked above"))
        .collect();
    c.faces_containing(&edges, None)
        .into_iter()
        .any(|f| c.face(f).boundary.len() == 3)
}

impl StripMap {
    pub fn new(strip: Strip, images: Vec<VertexId>) -> Self {
        Self { strip, images }
    }

    /// Map sending every vertex to `v`.
    pub fn constant(strip: Strip, v: VertexId) -> Self {
        let n = strip.vertex_count();
        Self::new(strip, vec![v; n])
    }

    pub fn image(&self, v: StripVertex) -> VertexId {
        self.images[v.0]
    }

    pub fn set(&mut self, v: StripVertex, to: VertexId) {
        self.images[v.0] = to;
    }

    pub fn triangle_images(&self, t: TriangleId) -> [VertexId; 3] {
        self.strip.triangle_vertices(t).map(|v| self.image(v))
    }

    /// Checks every simplex incident to `v`.
    pub(crate) fn locally_valid(&self, x: &CuspedComplex, v: StripVertex) -> bool {
        if self.strip.on_rows(v) && !x.is_y_vertex(self.image(v)) {
            return false;
        }
        self.strip
            .triangles_at(v)
            .into_iter()
            .all(|t| simplex_ok(&x.complex, &self.triangle_images(t)))
    }

    /// Simpliciality, and rows mapping into Y.
    pub fn validate(&self, x: &CuspedComplex) -> Result<(), ExcisionError> {
        if self.images.len() != self.strip.vertex_count() {
            return Err(ExcisionError::InvalidStripMap(format!(
                "{} images for {} strip vertices",
                self.images.len(),
                self.strip.vertex_count()
            )));
        }
        for v in self.strip.vertices() {
            if !x.complex.contains_vertex(self.image(v)) {
                return Err(ExcisionError::InvalidStripMap(format!("unknown vertex {}", self.image(v))));
            }
            if self.strip.on_rows(v) && !x.is_y_vertex(self.image(v)) {
                let (i, j) = self.strip.coords(v);
                return Err(ExcisionError::InvalidStripMap(format!("row vertex ({i},{j}) maps outside Y")));
            }
        }
        for t in self.strip.triangles() {
            if !simplex_ok(&x.complex, &self.triangle_images(t)) {
                let [a, b, c] = self.strip.triangle_vertices(t).map(|v| self.strip.coords(v));
                return Err(ExcisionError::InvalidStripMap(format!(
                    "triangle {a:?} {b:?} {c:?} does not map to a simplex"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Blue,
    Green,
}

/// Color of a point of X relative to coset `i`: blue on the coset, red strictly inside
/// its horoball, green elsewhere.
fn point_color(x: &CuspedComplex, members: &HashSet<VertexId>, coset: usize, v: VertexId) -> Color {
    if members.contains(&v) {
        Color::Blue
    } else if x.horoball_of(v) == Some(coset) {
        Color::Red
    } else {
        Color::Green
    }
}

/// Color of a simplex of X spanned by `imgs`: blue if it lies in `Z_i` (the full
/// subcomplex on the coset), red if it meets the horoball's depth ≥ 1 part.
fn simplex_color(x: &CuspedComplex, members: &HashSet<VertexId>, coset: usize, imgs: &[VertexId]) -> Color {
    let cs: Vec<Color> = imgs.iter().map(|&v| point_color(x, members, coset, v)).collect();
    if cs.iter().all(|&c| c == Color::Blue) {
        Color::Blue
    } else if imgs.iter().any(|&v| x.horoball_of(v) == Some(coset)) {
        Color::Red
    } else {
        Color::Green
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Coloring {
    pub coset: usize,
    pub vertices: Vec<Color>,
    pub edges: Vec<(StripEdge, Color)>,
    pub triangles: Vec<Color>,
}

impl Coloring {
    pub fn vertex(&self, v: StripVertex) -> Color {
        self.vertices[v.0]
    }

    pub fn triangle(&self, t: TriangleId) -> Color {
        self.triangles[t.0]
    }

    pub fn edge(&self, e: StripEdge) -> Color {
        let k = self.edges.binary_search_by(|(f, _)| f.cmp(&e)).expect("strip edge");
        self.edges[k].1
    }

    pub fn has_red(&self) -> bool {
        self.vertices.contains(&Color::Red)
    }

    /// Checks the two structural observations; returns every failure.
    pub fn observation_failures(&self, strip: &Strip) -> Vec<String> {
        let mut out = Vec::new();
        let col = |v: StripVertex| self.vertex(v);
        for &(e, c) in &self.edges {
            let (a, b) = (col(e.0), col(e.1));
            if (c == Color::Blue) != (a == Color::Blue && b == Color::Blue) {
                out.push(format!("edge {e:?}: blue iff both ends blue"));
            }
            if (c == Color::Red) != (a == Color::Red || b == Color::Red) {
                out.push(format!("edge {e:?}: red iff it has a red end"));
            }
            if c == Color::Red && (a == Color::Green || b == Color::Green) {
                out.push(format!("edge {e:?}: red edge with a green end"));
            }
        }
        for t in strip.triangles() {
            let vs = strip.triangle_vertices(t);
            let cs = vs.map(col);
            let c = self.triangle(t);
            if (c == Color::Blue) != cs.iter().all(|&x| x == Color::Blue) {
                out.push(format!("{t:?}: blue iff three blue vertices"));
            }
            if (c == Color::Red) != cs.contains(&Color::Red) {
                out.push(format!("{t:?}: red iff a red vertex"));
            }
            if c == Color::Red {
                if cs.contains(&Color::Green) {
                    out.push(format!("{t:?}: red triangle with a green vertex"));
                }
                let reds = cs.iter().filter(|&&x| x == Color::Red).count();
                let red_edges = strip.triangle_edges(t).iter().filter(|&&e| self.edge(e) == Color::Red).count();
                if red_edges < 2 {
                    out.push(format!("{t:?}: red triangle with fewer than two red edges"));
                }
                if reds == 1 {
                    let k = cs.iter().position(|&x| x == Color::Red).unwrap();
                    let opposite = StripEdge::new(vs[(k + 1) % 3], vs[(k + 2) % 3]);
                    if self.edge(opposite) != Color::Blue {
                        out.push(format!("{t:?}: edge opposite the single red vertex is not blue"));
                    }
                }
            }
        }
        out
    }
}

/// Colors the strip by the images of its simplices, relative to coset `coset`.
pub fn color(x: &CuspedComplex, m: &StripMap, coset: usize) -> Result<Coloring, ExcisionError> {
    let info = x.cosets.get(coset).ok_or(ExcisionError::UnknownCoset(coset))?;
    let members: HashSet<VertexId> = info.members.iter().copied().collect();
    let s = &m.strip;
    let vertices = s.vertices().map(|v| point_color(x, &members, coset, m.image(v))).collect();
    let mut edges: Vec<(StripEdge, Color)> = s
        .edges()
        .into_iter()
        .map(|e| (e, simplex_color(x, &members, coset, &[m.image(e.0), m.image(e.1)])))
        .collect();
    edges.sort();
    let triangles = s
        .triangles()
        .map(|t| simplex_color(x, &members, coset, &m.triangle_images(t)))
        .collect();
    let coloring = Coloring {
        coset,
        vertices,
        edges,
        triangles,
    };
    let failures = coloring.observation_failures(s);
    if let Some(first) = failures.into_iter().next() {
        return Err(ExcisionError::Observation { coset, detail: first });
    }
    Ok(coloring)
}

/// Certified answer of the separation oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Separated,
    NotSeparated,
    /// The search met a frontier vertex of Y, so missing cells might reconnect.
    Uncertified,
}

/// Whether every edge path from `v` to Y meets `z`: a BFS from `v` that never enters `z`
/// and stops on reaching Y. Reaching Y is always certified. Exhausting the search is
/// certified unless it visited a frontier vertex whose missing cells could lead around
/// `z`. Missing cells at a horoball frontier vertex stay in that horoball, so they are
/// harmless when `z` is the horoball's own coset.
pub fn separation_oracle(x: &CuspedComplex, v: VertexId, z: &HashSet<VertexId>) -> Separation {
    if z.contains(&v) {
        return Separation::Uncertified;
    }
    if x.is_y_vertex(v) {
        return Separation::NotSeparated;
    }
    // The untruncated coset lies in z only if z is that coset, or if the coset never
    // reaches the frontier.
    let sealed = |u: VertexId| match x.horoball_of(u) {
        Some(k) => {
            let members = &x.cosets[k].members;
            members.iter().all(|m| z.contains(m))
                && (members.len() == z.len() || members.iter().all(|&m| !x.complex.is_frontier(m)))
        }
        None => false,
    };
    let mut seen: HashSet<VertexId> = HashSet::from([v]);
    let mut queue = VecDeque::from([v]);
    let mut certified = true;
    while let Some(u) = queue.pop_front() {
        if x.complex.is_frontier(u) && !sealed(u) {
            certified = false;
        }
        for &w in x.complex.neighbors(u) {
            if z.contains(&w) || !seen.insert(w) {
                continue;
            }
            if x.is_y_vertex(w) {
                return Separation::NotSeparated;
            }
            queue.push_back(w);
        }
    }
    if certified {
        Separation::Separated
    } else {
        Separation::Uncertified
    }
}

/// Vertex set of coset `i`'s subcomplex `Z_i`.
pub fn coset_vertices(x: &CuspedComplex, coset: usize) -> HashSet<VertexId> {
    x.cosets[coset].members.iter().copied().collect()
}

/// Red triangles, grouped by sharing red edges. Classes are sorted and listed by
/// their least triangle.
pub fn red_classes(m: &StripMap, coloring: &Coloring) -> Vec<Vec<TriangleId>> {
    let s = &m.strip;
    let mut class: Vec<Option<usize>> = vec![None; s.triangle_count()];
    let mut out: Vec<Vec<TriangleId>> = Vec::new();
    for t in s.triangles() {
        if coloring.triangle(t) != Color::Red || class[t.0].is_some() {
            continue;
        }
        let k = out.len();
        let mut members = vec![t];
        class[t.0] = Some(k);
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            for (w, e) in s.adjacent_triangles(u) {
                if coloring.edge(e) == Color::Red && class[w.0].is_none() {
                    class[w.0] = Some(k);
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out
}
