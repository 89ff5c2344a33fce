//! Locally finite 2-complexes with typed cells and truncation frontiers.

mod validate;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::Word;

pub use validate::{pentagon_is_excluded, validate_complex, Violation};

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(FaceId, "f");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// Group element, labelled by its normal form.
    Cayley { word: Word },
    /// Horoball vertex `(base, depth)` over a peripheral coset, depth ≥ 1.
    Horo { coset: usize, base: VertexId, depth: u32 },
    /// Unlabelled vertex (base graphs, strips, tests).
    Abstract { label: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    pub frontier: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    /// `endpoints[1] = endpoints[0] · generator`.
    Cayley { generator: usize },
    HorizontalB1,
    HorizontalB2 { level: u32 },
    VerticalB3,
    Abstract,
}

impl EdgeKind {
    pub fn is_vertical(self) -> bool {
        matches!(self, EdgeKind::VerticalB3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub endpoints: [VertexId; 2],
    pub kind: EdgeKind,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if self.endpoints[0] == v {
            Some(self.endpoints[1])
        } else if self.endpoints[1] == v {
            Some(self.endpoints[0])
        } else {
            None
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.endpoints.contains(&v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceKind {
    Relator { relator: usize },
    HorizontalTriangle,
    VerticalSquare,
    VerticalPentagon,
    Abstract,
}

/// A polygonal 2-cell. `vertices[i]` is where `boundary[i]` starts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub boundary: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
    pub kind: FaceKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("dangling reference to {0}")]
    DanglingVertex(VertexId),
    #[error("dangling reference to {0}")]
    DanglingEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("boundary not closed: {0}")]
    BoundaryNotClosed(String),
}

/// Sequential builder; [`ComplexBuilder::finish`] yields an immutable [`Complex2`].
#[derive(Clone, Debug, Default)]
pub struct ComplexBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    vertex_edges: Vec<Vec<EdgeId>>,
    pairs: HashMap<(VertexId, VertexId), Vec<EdgeId>>,
}

fn pair(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Walks a closed edge cycle, returning the vertex where each edge starts.
pub(crate) fn trace_cycle(edges: &[Edge], boundary: &[EdgeId]) -> Result<Vec<VertexId>, String> {
    let n = boundary.len();
    if n == 0 {
        return Err("empty boundary".into());
    }
    let e0 = &edges[boundary[0].0];
    'start: for &start in &e0.endpoints {
        let mut verts = Vec::with_capacity(n);
        let mut cur = start;
        for &e in boundary {
            let Some(next) = edges[e.0].other(cur) else {
                continue 'start;
            };
            verts.push(cur);
            cur = next;
        }
        if cur == start {
            return Ok(verts);
        }
    }
    Err(format!(
        "edges {:?} do not form a cycle",
        boundary.iter().map(|e| e.0).collect::<Vec<_>>()
    ))
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_vertex(&mut self, kind: VertexKind, frontier: bool) -> VertexId {
        self.vertices.push(Vertex { kind, frontier });
        self.vertex_edges.push(Vec::new());
        VertexId(self.vertices.len() - 1)
    }

    pub fn set_frontier(&mut self, v: VertexId, frontier: bool) {
        self.vertices[v.0].frontier = frontier;
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId, kind: EdgeKind) -> Result<EdgeId, ComplexError> {
        for v in [a, b] {
            if v.0 >= self.vertices.len() {
                return Err(ComplexError::DanglingVertex(v));
            }
        }
        let key = pair(a, b);
        if let Some(es) = self.pairs.get(&key) {
            if es.iter().any(|e| self.edges[e.0].kind == kind) {
                return Err(ComplexError::DuplicateEdge(a, b));
            }
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { endpoints: [a, b], kind });
        self.vertex_edges[a.0].push(id);
        if a != b {
            self.vertex_edges[b.0].push(id);
        }
        self.pairs.entry(key).or_default().push(id);
        Ok(id)
    }

    pub fn edges_between(&self, a: VertexId, b: VertexId) -> &[EdgeId] {
        self.pairs.get(&pair(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn add_face(&mut self, boundary: Vec<EdgeId>, kind: FaceKind) -> Result<FaceId, ComplexError> {
        for &e in &boundary {
            if e.0 >= self.edges.len() {
                return Err(ComplexError::DanglingEdge(e));
            }
        }
        let vertices = trace_cycle(&self.edges, &boundary).map_err(ComplexError::BoundaryNotClosed)?;
        self.faces.push(Face {
            boundary,
            vertices,
            kind,
        });
        Ok(FaceId(self.faces.len() - 1))
    }

    pub fn finish(self) -> Complex2 {
        let mut edge_faces = vec![Vec::new(); self.edges.len()];
        for (i, f) in self.faces.iter().enumerate() {
            for &e in &f.boundary {
                if !edge_faces[e.0].contains(&FaceId(i)) {
                    edge_faces[e.0].push(FaceId(i));
                }
            }
        }
        let mut neighbors: Vec<Vec<VertexId>> = Vec::with_capacity(self.vertices.len());
        for (i, es) in self.vertex_edges.iter().enumerate() {
            let mut ns: Vec<VertexId> = es
                .iter()
                .filter_map(|e| self.edges[e.0].other(VertexId(i)))
                .collect();
            ns.sort_unstable();
            ns.dedup();
            neighbors.push(ns);
        }
        Complex2 {
            vertices: self.vertices,
            edges: self.edges,
            faces: self.faces,
            vertex_edges: self.vertex_edges,
            edge_faces,
            neighbors,
            pairs: self.pairs,
        }
    }
}

/// Immutable 2-complex with adjacency maps.
#[derive(Clone, Debug)]
pub struct Complex2 {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    vertex_edges: Vec<Vec<EdgeId>>,
    edge_faces: Vec<Vec<FaceId>>,
    neighbors: Vec<Vec<VertexId>>,
    pairs: HashMap<(VertexId, VertexId), Vec<EdgeId>>,
}

/// Cells containing a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
    /// Set on frontier vertices: the true star may have more cells.
    pub possibly_incomplete: bool,
}

/// A set of cells closed under taking faces of cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubComplex {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub faces: BTreeSet<FaceId>,
}

impl SubComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

impl Complex2 {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().enumerate().map(|(i, v)| (VertexId(i), v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn faces(&self) -> impl Iterator<Item = (FaceId, &Face)> {
        self.faces.iter().enumerate().map(|(i, f)| (FaceId(i), f))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.0 < self.vertices.len()
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.vertices[v.0].frontier
    }

    /// Sorted, deduplicated neighbours.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v.0]
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v.0]
    }

    pub fn edge_faces(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e.0]
    }

    pub fn edges_between(&self, a: VertexId, b: VertexId) -> &[EdgeId] {
        self.pairs.get(&pair(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Lowest-id edge joining `a` and `b`.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edges_between(a, b).iter().copied().min()
    }

    /// 0 for non-horoball vertices.
    pub fn depth(&self, v: VertexId) -> u32 {
        match self.vertices[v.0].kind {
            VertexKind::Horo { depth, .. } => depth,
            _ => 0,
        }
    }

    pub fn is_horizontal(&self, e: EdgeId) -> bool {
        !self.edges[e.0].kind.is_vertical()
    }

    /// Faces of `kind` whose boundary contains every edge in `edges`.
    pub fn faces_containing(&self, edges: &[EdgeId], kind: Option<FaceKind>) -> Vec<FaceId> {
        let Some(&first) = edges.first() else {
            return Vec::new();
        };
        self.edge_faces[first.0]
            .iter()
            .copied()
            .filter(|&f| {
                let face = &self.faces[f.0];
                kind.is_none_or(|k| face.kind == k) && edges.iter().all(|e| face.boundary.contains(e))
            })
            .collect()
    }

    pub fn star(&self, v: VertexId) -> Result<Star, ComplexError> {
        if !self.contains_vertex(v) {
            return Err(ComplexError::UnknownVertex(v));
        }
        let edges = self.vertex_edges[v.0].clone();
        let mut faces: Vec<FaceId> = edges.iter().flat_map(|e| self.edge_faces[e.0].iter().copied()).collect();
        faces.sort_unstable();
        faces.dedup();
        Ok(Star {
            edges,
            faces,
            possibly_incomplete: self.vertices[v.0].frontier,
        })
    }

    /// Full subcomplex spanned by a vertex set.
    pub fn full_subcomplex(&self, vertices: impl IntoIterator<Item = VertexId>) -> SubComplex {
        let vs: BTreeSet<VertexId> = vertices.into_iter().collect();
        let edges: BTreeSet<EdgeId> = vs
            .iter()
            .flat_map(|v| self.vertex_edges[v.0].iter().copied())
            .filter(|e| self.edges[e.0].endpoints.iter().all(|x| vs.contains(x)))
            .collect();
        let faces: BTreeSet<FaceId> = edges
            .iter()
            .flat_map(|e| self.edge_faces[e.0].iter().copied())
            .filter(|f| self.faces[f.0].boundary.iter().all(|e| edges.contains(e)))
            .collect();
        SubComplex {
            vertices: vs,
            edges,
            faces,
        }
    }

    pub fn whole(&self) -> SubComplex {
        self.full_subcomplex((0..self.vertices.len()).map(VertexId))
    }

    pub(crate) fn raw_edges(&self) -> &[Edge] {
        &self.edges
    }
}
