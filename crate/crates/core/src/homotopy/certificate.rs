use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, EdgeId, FaceId, VertexId};
use crate::metric::{BfsRow, UNREACHABLE};
use crate::path::EdgePath;

use super::HomotopyError;

/// One step of a combinatorial homotopy. Positions are vertex indices into the current path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryMove {
    /// Replaces the sub-path starting at `at` by the rest of the face boundary.
    FaceCross {
        at: usize,
        face: FaceId,
        replaced: EdgePath,
        replacement: EdgePath,
    },
    /// Inserts `edge` followed by its reverse at vertex `at`.
    BacktrackInsert { at: usize, edge: EdgeId },
    /// Deletes `edge, edge⁻¹` starting at vertex `at`.
    BacktrackDelete { at: usize, edge: EdgeId },
}

impl ElementaryMove {
    fn shifted(&self, by: usize) -> Self {
        let mut m = self.clone();
        match &mut m {
            Self::FaceCross { at, .. } | Self::BacktrackInsert { at, .. } | Self::BacktrackDelete { at, .. } => {
                *at += by
            }
        }
        m
    }

    pub fn face(&self) -> Option<FaceId> {
        match self {
            Self::FaceCross { face, .. } => Some(*face),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    pub start: EdgePath,
    pub moves: Vec<ElementaryMove>,
    pub end: EdgePath,
    /// Every vertex of every intermediate path.
    pub region: BTreeSet<VertexId>,
}

impl HomotopyCertificate {
    pub fn identity(p: EdgePath) -> Self {
        Self {
            region: p.vertices.iter().copied().collect(),
            start: p.clone(),
            moves: Vec::new(),
            end: p,
        }
    }

    /// This homotopy followed by `next`.
    pub fn then(&self, next: &HomotopyCertificate) -> Option<HomotopyCertificate> {
        (self.end == next.start).then(|| HomotopyCertificate {
            start: self.start.clone(),
            moves: self.moves.iter().chain(&next.moves).cloned().collect(),
            end: next.end.clone(),
            region: self.region.union(&next.region).copied().collect(),
        })
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.moves.iter().filter_map(ElementaryMove::face)
    }

    /// Largest distance from `center` to the region (`UNREACHABLE` if some vertex is not reachable).
    pub fn radius_from(&self, c: &Complex2, center: VertexId) -> u32 {
        let row = BfsRow::new(c, center);
        self.region.iter().map(|v| row.dist[v.0]).max().unwrap_or(0)
    }

    /// Smallest distance from `center` to the region.
    pub fn clearance_from(&self, c: &Complex2, center: VertexId) -> u32 {
        let row = BfsRow::new(c, center);
        self.region.iter().map(|v| row.dist[v.0]).min().unwrap_or(UNREACHABLE)
    }
}

/// `region ⊆ B(center, bound)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadiusBound {
    pub center: VertexId,
    pub bound: u64,
    /// Largest distance from `center` to the region.
    pub achieved: u32,
    pub satisfied: bool,
}

impl RadiusBound {
    pub fn check(c: &Complex2, cert: &HomotopyCertificate, center: VertexId, bound: u64) -> Self {
        let achieved = cert.radius_from(c, center);
        Self {
            center,
            bound,
            achieved,
            satisfied: achieved != UNREACHABLE && achieved as u64 <= bound,
        }
    }

    /// One bound per distinct vertex of `path`.
    pub fn for_path(c: &Complex2, cert: &HomotopyCertificate, path: &EdgePath, bound: u64) -> Vec<Self> {
        let centers: BTreeSet<VertexId> = path.vertices.iter().copied().collect();
        centers.into_iter().map(|v| Self::check(c, cert, v, bound)).collect()
    }
}

/// Whether `walk` (closed) traverses the boundary of `face` once, in either direction.
fn walk_is_boundary(c: &Complex2, face: FaceId, walk: &EdgePath) -> bool {
    let f = c.face(face);
    let n = f.boundary.len();
    if walk.len() != n || !walk.is_closed() {
        return false;
    }
    let fwd_edges = &f.boundary;
    let fwd_verts = &f.vertices;
    let rev_edges: Vec<EdgeId> = fwd_edges.iter().rev().copied().collect();
    // Reversed traversal starts at the end of the last edge, which is vertices[0].
    let rev_verts: Vec<VertexId> = (0..n).map(|i| fwd_verts[(n - i) % n]).collect();
    let matches = |edges: &[EdgeId], verts: &[VertexId]| {
        (0..n).any(|r| (0..n).all(|i| edges[(r + i) % n] == walk.edges[i] && verts[(r + i) % n] == walk.vertices[i]))
    };
    matches(fwd_edges, fwd_verts) || matches(&rev_edges, &rev_verts)
}

/// Applies one move to `path`, or explains why it does not apply.
pub fn apply_move(c: &Complex2, path: &EdgePath, m: &ElementaryMove) -> Result<EdgePath, String> {
    match m {
        ElementaryMove::FaceCross {
            at,
            face,
            replaced,
            replacement,
        } => {
            let end = at + replaced.len();
            if end > path.len() {
                return Err("replaced sub-path runs past the end".into());
            }
            if path.slice(*at, end) != *replaced {
                return Err("replaced sub-path differs from the current path".into());
            }
            if !replacement.is_valid(c) || !replaced.is_valid(c) {
                return Err("invalid edge path".into());
            }
            if replacement.start() != replaced.start() || replacement.end() != replaced.end() {
                return Err("replacement endpoints differ".into());
            }
            if face.0 >= c.face_count() {
                return Err(format!("unknown face {face}"));
            }
            if !walk_is_boundary(c, *face, &replaced.concat(&replacement.reversed())) {
                return Err(format!("sub-paths do not make up the boundary of {face}"));
            }
            Ok(path.slice(0, *at).concat(replacement).concat(&path.slice(end, path.len())))
        }
        ElementaryMove::BacktrackInsert { at, edge } => {
            if *at > path.len() {
                return Err("position past the end".into());
            }
            let v = path.vertices[*at];
            let w = c.edge(*edge).other(v).ok_or_else(|| format!("{edge} does not touch {v}"))?;
            let mut p = path.slice(0, *at);
            p.edges.extend([*edge, *edge]);
            p.vertices.extend([w, v]);
            Ok(p.concat(&path.slice(*at, path.len())))
        }
        ElementaryMove::BacktrackDelete { at, edge } => {
            if at + 2 > path.len() {
                return Err("position past the end".into());
            }
            if path.edges[*at] != *edge || path.edges[at + 1] != *edge || path.vertices[*at] != path.vertices[at + 2] {
                return Err(format!("no backtrack along {edge}"));
            }
            Ok(path.slice(0, *at).concat(&path.slice(at + 2, path.len())))
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub errors: Vec<String>,
    /// Forbidden vertices met by the homotopy.
    pub forbidden_hits: Vec<VertexId>,
}

/// Replays `cert` and checks its end path and region.
pub fn verify_certificate(c: &Complex2, cert: &HomotopyCertificate, forbidden: Option<&BTreeSet<VertexId>>) -> VerificationReport {
    let mut errors = Vec::new();
    if !cert.start.is_valid(c) {
        errors.push("start is not an edge path".to_string());
    }
    let mut path = cert.start.clone();
    let mut region: BTreeSet<VertexId> = path.vertices.iter().copied().collect();
    for (k, m) in cert.moves.iter().enumerate() {
        match apply_move(c, &path, m) {
            Ok(p) => {
                path = p;
                region.extend(path.vertices.iter().copied());
            }
            Err(why) => {
                errors.push(format!("replay mismatch at move {k}: {why}"));
                break;
            }
        }
    }
    if errors.is_empty() {
        if path != cert.end {
            errors.push("replay does not end at the recorded end path".into());
        }
        if region != cert.region {
            errors.push("recorded region differs from the replayed one".into());
        }
    }
    let forbidden_hits: Vec<VertexId> = match forbidden {
        Some(f) => region.intersection(f).copied().collect(),
        None => Vec::new(),
    };
    if !forbidden_hits.is_empty() {
        errors.push(format!("region meets {} forbidden vertices", forbidden_hits.len()));
    }
    VerificationReport {
        valid: errors.is_empty(),
        errors,
        forbidden_hits,
    }
}

/// Records moves while keeping the current path.
pub struct CertificateBuilder<'a> {
    complex: &'a Complex2,
    start: EdgePath,
    current: EdgePath,
    moves: Vec<ElementaryMove>,
    region: BTreeSet<VertexId>,
}

impl<'a> CertificateBuilder<'a> {
    pub fn new(complex: &'a Complex2, start: EdgePath) -> Self {
        Self {
            complex,
            region: start.vertices.iter().copied().collect(),
            current: start.clone(),
            start,
            moves: Vec::new(),
        }
    }

    pub fn complex(&self) -> &'a Complex2 {
        self.complex
    }

    pub fn current(&self) -> &EdgePath {
        &self.current
    }

    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    pub fn push(&mut self, m: ElementaryMove) -> Result<(), HomotopyError> {
        let next = apply_move(self.complex, &self.current, &m).map_err(|why| HomotopyError::BadMove {
            index: self.moves.len(),
            why,
        })?;
        self.region.extend(next.vertices.iter().copied());
        self.current = next;
        self.moves.push(m);
        Ok(())
    }

    /// Crosses `face`, replacing `len` edges from `at` by the rest of its boundary.
    pub fn face_cross(&mut self, at: usize, len: usize, face: FaceId) -> Result<(), HomotopyError> {
        let replaced = self.current.slice(at, at + len);
        let replacement = complement(self.complex, face, &replaced).ok_or_else(|| HomotopyError::BadMove {
            index: self.moves.len(),
            why: format!("sub-path at {at} is not a boundary arc of {face}"),
        })?;
        self.push(ElementaryMove::FaceCross {
            at,
            face,
            replaced,
            replacement,
        })
    }

    pub fn insert_backtrack(&mut self, at: usize, edge: EdgeId) -> Result<(), HomotopyError> {
        self.push(ElementaryMove::BacktrackInsert { at, edge })
    }

    pub fn delete_backtrack(&mut self, at: usize) -> Result<(), HomotopyError> {
        let edge = self.current.edges[at];
        self.push(ElementaryMove::BacktrackDelete { at, edge })
    }

    /// Inserts `p` followed by its reverse at vertex `at`; `p` must start there.
    pub fn insert_whisker(&mut self, at: usize, p: &EdgePath) -> Result<(), HomotopyError> {
        for (i, &e) in p.edges.iter().enumerate() {
            self.insert_backtrack(at + i, e)?;
        }
        Ok(())
    }

    /// Deletes backtracks inside edges `from..to` until none is left; returns the new `to`.
    pub fn free_reduce_range(&mut self, from: usize, mut to: usize) -> Result<usize, HomotopyError> {
        let mut i = from;
        while i + 1 < to {
            let p = &self.current;
            if p.edges[i] == p.edges[i + 1] && p.vertices[i] == p.vertices[i + 2] {
                self.delete_backtrack(i)?;
                to -= 2;
                i = i.saturating_sub(1).max(from);
            } else {
                i += 1;
            }
        }
        Ok(to)
    }

    pub fn free_reduce(&mut self) -> Result<(), HomotopyError> {
        let n = self.current.len();
        self.free_reduce_range(0, n).map(|_| ())
    }

    /// Replays `sub` on the sub-path starting at vertex `at`.
    pub fn apply_at(&mut self, at: usize, sub: &HomotopyCertificate) -> Result<(), HomotopyError> {
        let end = at + sub.start.len();
        if end > self.current.len() || self.current.slice(at, end) != sub.start {
            return Err(HomotopyError::BadMove {
                index: self.moves.len(),
                why: format!("sub-certificate start does not match the path at {at}"),
            });
        }
        for m in &sub.moves {
            self.push(m.shifted(at))?;
        }
        Ok(())
    }

    pub fn finish(self) -> HomotopyCertificate {
        HomotopyCertificate {
            start: self.start,
            moves: self.moves,
            end: self.current,
            region: self.region,
        }
    }
}

/// The rest of `face`'s boundary, from `arc.start()` to `arc.end()` the other way round.
pub fn complement(c: &Complex2, face: FaceId, arc: &EdgePath) -> Option<EdgePath> {
    let f = c.face(face);
    let n = f.boundary.len();
    if arc.len() > n {
        return None;
    }
    let rev_edges: Vec<EdgeId> = f.boundary.iter().rev().copied().collect();
    let rev_verts: Vec<VertexId> = (0..n).map(|i| f.vertices[(n - i) % n]).collect();
    for (edges, verts) in [(&f.boundary, &f.vertices), (&rev_edges, &rev_verts)] {
        for r in 0..n {
            let fits = (0..arc.len()).all(|i| edges[(r + i) % n] == arc.edges[i] && verts[(r + i) % n] == arc.vertices[i])
                && verts[(r + arc.len()) % n] == arc.end();
            if fits {
                // Walk the remaining edges backwards from arc.start().
                let mut p = EdgePath::point(arc.start());
                for i in 1..=n - arc.len() {
                    let e = edges[(r + n - i) % n];
                    p.push(c, e).ok()?;
                }
                return (p.end() == arc.end()).then_some(p);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ComplexBuilder, EdgeKind, FaceKind, VertexKind};

    fn triangle() -> (Complex2, Vec<VertexId>) {
        let mut b = ComplexBuilder::new();
        let v: Vec<_> = (0..3).map(|i| b.add_vertex(VertexKind::Abstract { label: i }, false)).collect();
        let e: Vec<_> = (0..3).map(|i| b.add_edge(v[i], v[(i + 1) % 3], EdgeKind::Abstract).unwrap()).collect();
        b.add_face(e, FaceKind::Abstract).unwrap();
        (b.finish(), v)
    }

    #[test]
    fn empty_certificate_is_valid() {
        let (c, v) = triangle();
        let cert = HomotopyCertificate::identity(EdgePath::point(v[0]));
        assert!(verify_certificate(&c, &cert, None).valid);
    }

    #[test]
    fn crossing_a_triangle() {
        let (c, v) = triangle();
        let start = EdgePath::from_vertices(&c, &[v[0], v[2]]).unwrap();
        let mut b = CertificateBuilder::new(&c, start);
        b.face_cross(0, 1, FaceId(0)).unwrap();
        let cert = b.finish();
        assert_eq!(cert.end.vertices, vec![v[0], v[1], v[2]]);
        assert_eq!(cert.region.len(), 3);
        let r = verify_certificate(&c, &cert, None);
        assert!(r.valid, "{:?}", r.errors);
    }

    #[test]
    fn tampered_replacement_is_caught() {
        let (c, v) = triangle();
        let start = EdgePath::from_vertices(&c, &[v[0], v[2]]).unwrap();
        let mut b = CertificateBuilder::new(&c, start);
        b.face_cross(0, 1, FaceId(0)).unwrap();
        let mut cert = b.finish();
        if let ElementaryMove::FaceCross { replacement, .. } = &mut cert.moves[0] {
            *replacement = EdgePath::from_vertices(&c, &[v[0], v[2]]).unwrap();
        }
        let r = verify_certificate(&c, &cert, None);
        assert!(!r.valid);
        assert!(r.errors[0].starts_with("replay mismatch at move 0"));
    }

    #[test]
    fn whole_boundary_contracts_to_a_point() {
        let (c, v) = triangle();
        let start = EdgePath::from_vertices(&c, &[v[0], v[1], v[2], v[0]]).unwrap();
        let mut b = CertificateBuilder::new(&c, start);
        b.face_cross(0, 2, FaceId(0)).unwrap();
        b.free_reduce().unwrap();
        let cert = b.finish();
        assert_eq!(cert.end, EdgePath::point(v[0]));
        assert!(verify_certificate(&c, &cert, None).valid);
        let forbidden: BTreeSet<_> = [v[1]].into();
        let r = verify_certificate(&c, &cert, Some(&forbidden));
        assert_eq!(r.forbidden_hits, vec![v[1]]);
    }

    #[test]
    fn whiskers_and_sub_certificates() {
        let (c, v) = triangle();
        let e01 = c.edge_between(v[0], v[1]).unwrap();
        let mut b = CertificateBuilder::new(&c, EdgePath::point(v[0]));
        b.insert_whisker(0, &EdgePath::from_vertices(&c, &[v[0], v[1], v[2]]).unwrap()).unwrap();
        assert_eq!(b.current().len(), 4);
        // Sub-certificate: the loop v1 v2 v1 collapses.
        let sub_start = b.current().slice(1, 3);
        let mut sb = CertificateBuilder::new(&c, sub_start);
        sb.free_reduce().unwrap();
        let sub = sb.finish();
        b.apply_at(1, &sub).unwrap();
        assert_eq!(b.current().edges, vec![e01, e01]);
        b.free_reduce().unwrap();
        let cert = b.finish();
        assert!(cert.end.is_empty());
        assert!(verify_certificate(&c, &cert, None).valid);
    }
}
