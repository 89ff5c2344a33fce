//! The truncated cusped space: a Cayley 2-complex ball with horoballs glued over
//! every peripheral coset that meets it.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    Complex2, ComplexBuilder, ComplexError, EdgeId, EdgeKind, FaceKind, SubComplex, VertexId, VertexKind,
};
use crate::horoball::{BaseEdges, BaseGraph, Horoball, HoroballError};
use crate::presentation::{ElementKey, GroupPresentation, Letter, PresentationError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CuspedError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Horoball(#[from] HoroballError),
    #[error("resource cap exceeded: more than {limit} {what}")]
    ResourceCap { what: &'static str, limit: usize },
    #[error("radius must be at least 1")]
    BadRadius,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

/// Upper limits on the size of a build.
#[derive(Clone, Copy, Debug)]
pub struct ResourceCaps {
    pub max_vertices: usize,
    pub max_faces: usize,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        Self {
            max_vertices: 2_000_000,
            max_faces: 20_000_000,
        }
    }
}

/// A peripheral coset `gP_i` as seen inside the ball.
#[derive(Clone, Debug)]
pub struct PeripheralCoset {
    pub peripheral: usize,
    /// Least member by (length, letters); also the least vertex id.
    pub representative: VertexId,
    /// Sorted by id; `members[j]` is base vertex `j` of the horoball.
    pub members: Vec<VertexId>,
    pub subgraph: BaseGraph,
}

#[derive(Clone, Debug)]
pub struct CuspedComplex {
    pub presentation: GroupPresentation,
    pub radius: u32,
    pub depth_cap: u32,
    pub complex: Complex2,
    /// Cayley vertices are exactly ids `0..y_vertices`, in (length, letters) order.
    pub y_vertices: usize,
    pub cosets: Vec<PeripheralCoset>,
    /// Parallel to `cosets`.
    pub horoballs: Vec<Horoball>,
    coset_index: Vec<Vec<usize>>,
    mult: Vec<Vec<Option<VertexId>>>,
}

/// Counts reported by `build-cusped`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Summary {
    pub radius: u32,
    pub depth_cap: u32,
    pub vertices: BTreeMap<String, usize>,
    pub edges: BTreeMap<String, usize>,
    pub faces: BTreeMap<String, usize>,
    pub frontier_vertices: usize,
    pub cosets_per_peripheral: BTreeMap<String, usize>,
}

/// Column of letter `l` in the multiplication table.
fn letter_slot(l: Letter) -> usize {
    2 * l.generator + usize::from(l.inverse)
}

struct ElementIndex {
    exact: HashMap<Word, usize>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl ElementIndex {
    fn find(&self, p: &GroupPresentation, labels: &[Word], w: &Word) -> Result<Option<usize>, PresentationError> {
        Ok(match p.provider.element_key(w)? {
            ElementKey::Exact(nf) => self.exact.get(&nf).copied(),
            ElementKey::Bucket(key) => {
                let mut hit = None;
                for &i in self.buckets.get(&key).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if p.provider.equal(&labels[i], w)? {
                        hit = Some(i);
                        break;
                    }
                }
                hit
            }
        })
    }

    fn insert(&mut self, p: &GroupPresentation, w: &Word, i: usize) -> Result<Word, PresentationError> {
        Ok(match p.provider.element_key(w)? {
            ElementKey::Exact(nf) => {
                self.exact.insert(nf.clone(), i);
                nf
            }
            ElementKey::Bucket(key) => {
                self.buckets.entry(key).or_default().push(i);
                w.clone()
            }
        })
    }
}

/// Smallest rotation of the cycle or its reversal, for deduplicating faces.
fn canonical_cycle(edges: &[EdgeId]) -> Vec<EdgeId> {
    let n = edges.len();
    let rev: Vec<EdgeId> = edges.iter().rev().copied().collect();
    let mut best: Option<Vec<EdgeId>> = None;
    for seq in [edges, rev.as_slice()] {
        for r in 0..n {
            let cand: Vec<EdgeId> = (0..n).map(|i| seq[(i + r) % n]).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Builds the cusped space over the radius-`radius` ball with horoballs of depth ≤ `dmax`.
pub fn build_cusped_space(
    p: &GroupPresentation,
    radius: u32,
    dmax: u32,
    caps: &ResourceCaps,
) -> Result<CuspedComplex, CuspedError> {
    if radius == 0 {
        return Err(CuspedError::BadRadius);
    }
    let ngen = p.generators.len();
    let letters: Vec<Letter> = (0..ngen).flat_map(|g| [Letter::gen(g), Letter::new(g, true)]).collect();

    // Breadth-first enumeration in shortlex order; labels are the first words found.
    let mut labels: Vec<Word> = Vec::new();
    let mut layer: Vec<u32> = Vec::new();
    let mut index = ElementIndex {
        exact: HashMap::new(),
        buckets: HashMap::new(),
    };
    let id = index.insert(p, &Word::identity(), 0)?;
    labels.push(id);
    layer.push(0);
    let mut mult: Vec<Vec<Option<usize>>> = Vec::new();
    let mut next = 0;
    while next < labels.len() {
        let g = next;
        next += 1;
        let mut row = vec![None; 2 * ngen];
        for &l in &letters {
            let mut w = labels[g].clone();
            w.push(l);
            let found = index.find(p, &labels, &w)?;
            let h = match found {
                Some(h) => Some(h),
                None if layer[g] < radius => {
                    let h = labels.len();
                    if h >= caps.max_vertices {
                        return Err(CuspedError::ResourceCap {
                            what: "vertices",
                            limit: caps.max_vertices,
                        });
                    }
                    let label = index.insert(p, &w, h)?;
                    labels.push(label);
                    layer.push(layer[g] + 1);
                    Some(h)
                }
                None => None,
            };
            row[letter_slot(l)] = h;
        }
        mult.push(row);
    }

    // Renumber by (length, label).
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&x, &y| (layer[x], &labels[x]).cmp(&(layer[y], &labels[y])));
    let mut rank = vec![0usize; labels.len()];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    let n = labels.len();
    let has_peripherals = !p.peripherals.is_empty();
    let mut b = ComplexBuilder::new();
    for &x in &order {
        let frontier = layer[x] == radius || (has_peripherals && dmax == 0);
        b.add_vertex(
            VertexKind::Cayley {
                word: labels[x].clone(),
            },
            frontier,
        );
    }
    let mult: Vec<Vec<Option<VertexId>>> = order
        .iter()
        .map(|&x| mult[x].iter().map(|h| h.map(|h| VertexId(rank[h]))).collect())
        .collect();

    // Cayley edges g → g·s.
    for g in 0..n {
        for s in 0..ngen {
            let Some(h) = mult[g][letter_slot(Letter::gen(s))] else {
                continue;
            };
            let g = VertexId(g);
            if h == g {
                continue;
            }
            let kind = EdgeKind::Cayley { generator: s };
            if b.edges_between(g, h).iter().any(|&e| b_edge_kind(&b, e) == kind) {
                continue;
            }
            b.add_edge(g, h, kind)?;
        }
    }
    let cayley_edge = |b: &ComplexBuilder, g: VertexId, l: Letter| -> Option<EdgeId> {
        let h = mult[g.0][letter_slot(l)]?;
        b.edges_between(g, h)
            .iter()
            .copied()
            .find(|&e| b_edge_kind(b, e) == EdgeKind::Cayley { generator: l.generator })
    };

    // Relator faces, one per boundary cycle.
    let mut seen: HashSet<(usize, Vec<EdgeId>)> = HashSet::new();
    for g in 0..n {
        for (ri, r) in p.relators.iter().enumerate() {
            let mut cur = VertexId(g);
            let mut cycle = Vec::with_capacity(r.len());
            let mut ok = true;
            for &l in r.letters() {
                match (cayley_edge(&b, cur, l), mult[cur.0][letter_slot(l)]) {
                    (Some(e), Some(h)) => {
                        cycle.push(e);
                        cur = h;
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || cur != VertexId(g) || cycle.is_empty() {
                continue;
            }
            if seen.insert((ri, canonical_cycle(&cycle))) {
                if seen.len() > caps.max_faces {
                    return Err(CuspedError::ResourceCap {
                        what: "faces",
                        limit: caps.max_faces,
                    });
                }
                b.add_face(cycle, FaceKind::Relator { relator: ri })?;
            }
        }
    }

    // Peripheral cosets.
    let nfs: Vec<Word> = (0..n)
        .map(|g| p.normal_form(&labels[order[g]]))
        .collect::<Result<_, _>>()?;
    let inverses: Vec<Word> = nfs.iter().map(|w| w.inverse()).collect();
    let mut cosets: Vec<PeripheralCoset> = Vec::new();
    let mut coset_index = vec![vec![usize::MAX; n]; p.peripherals.len()];
    let mut cuts: Vec<Vec<usize>> = Vec::new();
    for (pi, spec) in p.peripherals.iter().enumerate() {
        for g in 0..n {
            if coset_index[pi][g] != usize::MAX {
                continue;
            }
            let mut members = Vec::new();
            for h in g..n {
                if coset_index[pi][h] != usize::MAX {
                    continue;
                }
                let q = p.normal_form(&inverses[g].concat(&nfs[h]))?;
                if p.in_peripheral(pi, &q) {
                    members.push(VertexId(h));
                    coset_index[pi][h] = cosets.len();
                }
            }
            let local: HashMap<VertexId, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut edges = Vec::new();
            let mut cut = Vec::new();
            for (i, &v) in members.iter().enumerate() {
                for &s in &spec.generators {
                    for l in [Letter::gen(s), Letter::new(s, true)] {
                        match mult[v.0][letter_slot(l)] {
                            Some(w) => {
                                if let Some(&j) = local.get(&w) {
                                    if i < j {
                                        edges.push((i, j));
                                    }
                                }
                            }
                            None => cut.push(i),
                        }
                    }
                }
            }
            for (i, &v) in members.iter().enumerate() {
                for &w in &members[i + 1..] {
                    if !b.edges_between(v, w).is_empty() {
                        edges.push((i, local[&w]));
                    }
                }
            }
            cut.sort_unstable();
            cut.dedup();
            let subgraph = BaseGraph::new(members.len(), &edges)?;
            cosets.push(PeripheralCoset {
                peripheral: pi,
                representative: members[0],
                members,
                subgraph,
            });
            cuts.push(cut);
        }
    }

    // Horoballs.
    let mut horoballs = Vec::with_capacity(cosets.len());
    for (ci, coset) in cosets.iter().enumerate() {
        let added = coset.members.len() * dmax as usize;
        if b.vertex_count() + added > caps.max_vertices {
            return Err(CuspedError::ResourceCap {
                what: "vertices",
                limit: caps.max_vertices,
            });
        }
        let mut base_edges = Vec::new();
        for (i, &v) in coset.members.iter().enumerate() {
            for (j, &w) in coset.members.iter().enumerate().skip(i + 1) {
                for &e in b.edges_between(v, w) {
                    base_edges.push((i, j, e));
                }
            }
        }
        horoballs.push(Horoball::build_into(
            &mut b,
            ci,
            coset.subgraph.clone(),
            coset.members.clone(),
            BaseEdges::Existing(base_edges),
            dmax,
            &cuts[ci],
        )?);
    }

    Ok(CuspedComplex {
        presentation: p.clone(),
        radius,
        depth_cap: dmax,
        complex: b.finish(),
        y_vertices: n,
        cosets,
        horoballs,
        coset_index,
        mult,
    })
}

fn b_edge_kind(b: &ComplexBuilder, e: EdgeId) -> EdgeKind {
    b.edge(e).kind
}

impl CuspedComplex {
    pub fn basepoint(&self) -> VertexId {
        VertexId(0)
    }

    pub fn is_y_vertex(&self, v: VertexId) -> bool {
        v.0 < self.y_vertices
    }

    pub fn word(&self, v: VertexId) -> Option<&Word> {
        match &self.complex.vertex(v).kind {
            VertexKind::Cayley { word } => Some(word),
            _ => None,
        }
    }

    /// Y vertex for a word, if the element lies in the ball.
    pub fn find_word(&self, w: &Word) -> Option<VertexId> {
        let mut cur = self.basepoint();
        for &l in w.letters() {
            cur = self.mult.get(cur.0)?[letter_slot(l)]?;
        }
        Some(cur)
    }

    /// `g · l` inside the ball.
    pub fn multiply(&self, g: VertexId, l: Letter) -> Option<VertexId> {
        self.mult.get(g.0)?[letter_slot(l)]
    }

    /// The coset of peripheral `i` containing Y vertex `v`.
    pub fn coset_of(&self, v: VertexId, i: usize) -> Option<&PeripheralCoset> {
        let c = *self.coset_index.get(i)?.get(v.0)?;
        self.cosets.get(c)
    }

    pub fn coset_index_of(&self, v: VertexId, i: usize) -> Option<usize> {
        self.coset_index.get(i)?.get(v.0).copied()
    }

    pub fn depth_function(&self, v: VertexId) -> Result<u32, CuspedError> {
        if !self.complex.contains_vertex(v) {
            return Err(CuspedError::UnknownVertex(v));
        }
        Ok(self.complex.depth(v))
    }

    /// Coset whose horoball contains `v` at depth ≥ 1.
    pub fn horoball_of(&self, v: VertexId) -> Option<usize> {
        match self.complex.vertex(v).kind {
            VertexKind::Horo { coset, .. } => Some(coset),
            _ => None,
        }
    }

    /// The Cayley 2-complex part, as the depth-0 full subcomplex.
    pub fn y_subcomplex(&self) -> SubComplex {
        self.complex.full_subcomplex((0..self.y_vertices).map(VertexId))
    }

    pub fn summary(&self) -> Summary {
        let mut vertices = BTreeMap::new();
        let mut frontier = 0;
        for (_, v) in self.complex.vertices() {
            let k = match v.kind {
                VertexKind::Cayley { .. } => "cayley",
                VertexKind::Horo { .. } => "horo",
                VertexKind::Abstract { .. } => "abstract",
            };
            *vertices.entry(k.to_string()).or_insert(0) += 1;
            frontier += usize::from(v.frontier);
        }
        let mut edges = BTreeMap::new();
        for (_, e) in self.complex.edges() {
            let k = match e.kind {
                EdgeKind::Cayley { .. } => "cayley",
                EdgeKind::HorizontalB1 => "b1",
                EdgeKind::HorizontalB2 { .. } => "b2",
                EdgeKind::VerticalB3 => "b3",
                EdgeKind::Abstract => "abstract",
            };
            *edges.entry(k.to_string()).or_insert(0) += 1;
        }
        let mut faces = BTreeMap::new();
        for (_, f) in self.complex.faces() {
            let k = match f.kind {
                FaceKind::Relator { .. } => "relator",
                FaceKind::HorizontalTriangle => "triangle",
                FaceKind::VerticalSquare => "square",
                FaceKind::VerticalPentagon => "pentagon",
                FaceKind::Abstract => "abstract",
            };
            *faces.entry(k.to_string()).or_insert(0) += 1;
        }
        let mut cosets_per_peripheral = BTreeMap::new();
        for spec in &self.presentation.peripherals {
            cosets_per_peripheral.insert(spec.name.clone(), 0);
        }
        for c in &self.cosets {
            *cosets_per_peripheral
                .entry(self.presentation.peripherals[c.peripheral].name.clone())
                .or_insert(0) += 1;
        }
        Summary {
            radius: self.radius,
            depth_cap: self.depth_cap,
            vertices,
            edges,
            faces,
            frontier_vertices: frontier,
            cosets_per_peripheral,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;
    use crate::presentation::parse_presentation;

    fn build(text: &str, r: u32, d: u32) -> CuspedComplex {
        build_cusped_space(&parse_presentation(text).unwrap(), r, d, &ResourceCaps::default()).unwrap()
    }

    #[test]
    fn free_group_ball_counts() {
        let c = build("gens a,b; rels ; periph P: a [free]", 2, 1);
        assert_eq!(c.y_vertices, 17);
        assert!(validate_complex(&c.complex).is_empty());
        // Cosets of <a>: every vertex in exactly one.
        let total: usize = c.cosets.iter().map(|k| k.members.len()).sum();
        assert_eq!(total, 17);
    }

    #[test]
    fn no_peripherals_means_no_horoballs() {
        let c = build("gens a,b; rels", 1, 3);
        assert_eq!(c.complex.vertex_count(), c.y_vertices);
        assert!(c.complex.vertices().all(|(v, _)| c.depth_function(v).unwrap() == 0));
    }

    #[test]
    fn z2_is_one_coset() {
        let c = build("gens a,b; rels [a,b]; periph P: a,b [free-abelian]", 2, 2);
        assert_eq!(c.cosets.len(), 1);
        assert_eq!(c.cosets[0].members.len(), 13);
        assert_eq!(c.complex.vertex_count(), 13 * 3);
        assert!(validate_complex(&c.complex).is_empty());
        // 4 unit squares fit in the radius-2 ball.
        assert_eq!(c.summary().faces["relator"], 4);
    }

    #[test]
    fn coset_of_b_has_representative_b() {
        let c = build("gens a,b; rels ; periph P: a [free]", 2, 1);
        let p = &c.presentation;
        let bv = c.find_word(&p.parse_word("b").unwrap()).unwrap();
        let ba = c.find_word(&p.parse_word("ba").unwrap()).unwrap();
        let k = c.coset_of(bv, 0).unwrap();
        assert_eq!(k.representative, bv);
        assert_eq!(c.coset_index_of(bv, 0), c.coset_index_of(ba, 0));
        assert_eq!(c.coset_of(c.basepoint(), 0).unwrap().representative, c.basepoint());
    }
}
