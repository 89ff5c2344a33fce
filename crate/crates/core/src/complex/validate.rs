use std::collections::HashSet;
use std::fmt;

use super::{trace_cycle, Complex2, EdgeId, EdgeKind, FaceId, FaceKind, VertexId, VertexKind};

/// One broken invariant found by [`validate_complex`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Adjacency(String),
    BoundaryNotClosed(FaceId),
    DuplicateEdge(EdgeId, EdgeId),
    HoroDepthZero(VertexId),
    B1Depth(EdgeId),
    B2UnequalDepth(EdgeId),
    B2AtLevelZero(EdgeId),
    B3NotVertical(EdgeId),
    FaceShape(FaceId, String),
    PentagonExcluded(FaceId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Adjacency(m) => write!(f, "adjacency mismatch: {m}"),
            Violation::BoundaryNotClosed(x) => write!(f, "{x}: boundary not closed"),
            Violation::DuplicateEdge(a, b) => write!(f, "{a} and {b}: duplicate edge of one kind"),
            Violation::HoroDepthZero(v) => write!(f, "{v}: horoball vertex with depth 0"),
            Violation::B1Depth(e) => write!(f, "{e}: B1 edge off level 0"),
            Violation::B2UnequalDepth(e) => write!(f, "{e}: B2 endpoints at unequal depth"),
            Violation::B2AtLevelZero(e) => write!(f, "{e}: B2 edge at level 0"),
            Violation::B3NotVertical(e) => write!(f, "{e}: B3 edge does not join (v,k) to (v,k+1)"),
            Violation::FaceShape(x, m) => write!(f, "{x}: {m}"),
            Violation::PentagonExcluded(x) => write!(f, "{x}: pentagon is a square plus triangle (C3 exclusion)"),
        }
    }
}

/// Base vertex of a horoball vertex; depth-0 vertices are their own base.
fn base_of(c: &Complex2, v: VertexId) -> VertexId {
    match c.vertex(v).kind {
        VertexKind::Horo { base, .. } => base,
        _ => v,
    }
}

/// Lists every invariant violation; empty iff the complex is well formed.
pub fn validate_complex(c: &Complex2) -> Vec<Violation> {
    let mut out = Vec::new();
    for (id, v) in c.vertices() {
        if let VertexKind::Horo { depth: 0, .. } = v.kind {
            out.push(Violation::HoroDepthZero(id));
        }
        for &e in c.incident_edges(id) {
            if !c.edge(e).touches(id) {
                out.push(Violation::Adjacency(format!("{id} lists {e} which does not touch it")));
            }
        }
    }
    let mut kinds: HashSet<(VertexId, VertexId, String)> = HashSet::new();
    for (id, e) in c.edges() {
        let [a, b] = e.endpoints;
        for x in [a, b] {
            if !c.incident_edges(x).contains(&id) {
                out.push(Violation::Adjacency(format!("{x} does not list incident {id}")));
            }
        }
        let key = (a.min(b), a.max(b), format!("{:?}", e.kind));
        if !kinds.insert(key) {
            let other = c
                .edges_between(a, b)
                .iter()
                .copied()
                .find(|&o| o != id && c.edge(o).kind == e.kind)
                .unwrap_or(id);
            out.push(Violation::DuplicateEdge(other, id));
        }
        let (da, db) = (c.depth(a), c.depth(b));
        match e.kind {
            EdgeKind::HorizontalB1 if da != 0 || db != 0 => out.push(Violation::B1Depth(id)),
            EdgeKind::HorizontalB2 { level } => {
                if da != db || da != level {
                    out.push(Violation::B2UnequalDepth(id));
                } else if level == 0 {
                    out.push(Violation::B2AtLevelZero(id));
                }
            }
            EdgeKind::VerticalB3 => {
                if base_of(c, a) != base_of(c, b) || da.abs_diff(db) != 1 {
                    out.push(Violation::B3NotVertical(id));
                }
            }
            _ => {}
        }
    }
    for (id, f) in c.faces() {
        for &e in &f.boundary {
            if !c.edge_faces(e).contains(&id) {
                out.push(Violation::Adjacency(format!("{e} does not list face {id}")));
            }
        }
        if trace_cycle(c.raw_edges(), &f.boundary).is_err() {
            out.push(Violation::BoundaryNotClosed(id));
            continue;
        }
        let vertical = f.boundary.iter().filter(|&&e| c.edge(e).kind.is_vertical()).count();
        let horizontal = f.boundary.len() - vertical;
        let shape = |want_h: usize, want_v: usize, name: &str| {
            (horizontal != want_h || vertical != want_v).then(|| {
                Violation::FaceShape(
                    id,
                    format!("{name} needs {want_h} horizontal and {want_v} vertical edges, has {horizontal} and {vertical}"),
                )
            })
        };
        let bad = match f.kind {
            FaceKind::HorizontalTriangle => shape(3, 0, "triangle"),
            FaceKind::VerticalSquare => shape(2, 2, "square"),
            FaceKind::VerticalPentagon => shape(3, 2, "pentagon"),
            _ => None,
        };
        if let Some(v) = bad {
            out.push(v);
        } else if f.kind == FaceKind::VerticalPentagon && pentagon_is_excluded(c, id) {
            out.push(Violation::PentagonExcluded(id));
        }
    }
    out
}

/// A pentagon is excluded when two consecutive horizontal boundary edges
/// `p_i p_{i+1}`, `p_{i+1} p_{i+2}` have a horizontal chord `p_i p_{i+2}`:
/// the chord splits it into a horizontal triangle and a vertical square.
pub fn pentagon_is_excluded(c: &Complex2, f: FaceId) -> bool {
    let face = c.face(f);
    let n = face.boundary.len();
    (0..n).any(|i| {
        let e1 = face.boundary[i];
        let e2 = face.boundary[(i + 1) % n];
        if !c.is_horizontal(e1) || !c.is_horizontal(e2) {
            return false;
        }
        let a = face.vertices[i];
        let b = face.vertices[(i + 2) % n];
        a != b && c.edges_between(a, b).iter().any(|&e| c.is_horizontal(e))
    })
}
