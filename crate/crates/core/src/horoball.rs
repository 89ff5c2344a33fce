//! Combinatorial horoballs over finite base graphs, truncated at a depth cap.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::complex::{
    Complex2, ComplexBuilder, ComplexError, EdgeId, EdgeKind, FaceKind, SubComplex, VertexId, VertexKind,
};

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HoroballError {
    #[error("base graph is disconnected")]
    Disconnected,
    #[error("base graph edge ({0}, {1}) is out of range")]
    BadEdge(usize, usize),
    #[error("{0} is not in the horoball")]
    NotInHoroball(VertexId),
    #[error("level {m} is out of range 0..={dmax}")]
    OutOfRange { m: u32, dmax: u32 },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Finite simple graph with an all-pairs distance table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    adjacency: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

impl BaseGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, HoroballError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(HoroballError::BadEdge(a, b));
            }
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let dist = (0..n).map(|s| bfs(&adjacency, s)).collect();
        Ok(Self { adjacency, dist })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are in range")
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.dist[a][b]
    }

    pub fn is_connected(&self) -> bool {
        self.dist.first().is_none_or(|row| row.iter().all(|&d| d != UNREACHABLE))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adjacency.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Geodesic from `a` to `b`, always stepping to the smallest-index neighbour closer to `b`.
    pub fn geodesic(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if self.dist[a][b] == UNREACHABLE {
            return None;
        }
        let mut out = vec![a];
        let mut cur = a;
        while cur != b {
            let d = self.dist[cur][b];
            cur = *self.adjacency[cur].iter().find(|&&n| self.dist[n][b] == d - 1)?;
            out.push(cur);
        }
        Some(out)
    }
}

fn bfs(adjacency: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![UNREACHABLE; adjacency.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adjacency[x] {
            if d[y] == UNREACHABLE {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// `2^k`, saturating.
pub fn pow2(k: u32) -> u64 {
    if k >= 63 {
        u64::MAX
    } else {
        1u64 << k
    }
}

/// Whether `(i,k)` and `(j,k)` are joined by a horizontal edge.
fn joined(base: &BaseGraph, k: u32, i: usize, j: usize) -> bool {
    let d = base.distance(i, j);
    if k == 0 {
        d == 1
    } else {
        d != 0 && d != UNREACHABLE && (d as u64) <= pow2(k)
    }
}

/// Index of one horoball inside a larger complex.
#[derive(Clone, Debug)]
pub struct Horoball {
    pub coset: usize,
    pub base: BaseGraph,
    pub depth_cap: u32,
    levels: Vec<Vec<VertexId>>,
    locate: HashMap<VertexId, (usize, u32)>,
    horizontal: Vec<HashMap<(usize, usize), EdgeId>>,
    vertical: Vec<Vec<EdgeId>>,
    level0: HashSet<EdgeId>,
}

/// How level-0 edges are supplied to [`Horoball::build_into`].
pub enum BaseEdges {
    /// Create fresh B1 edges from the base graph.
    Create,
    /// Reuse existing edges `(i, j, id)` between base vertices.
    Existing(Vec<(usize, usize, EdgeId)>),
}

impl Horoball {
    /// Adds levels `1..=dmax`, their edges and all C1–C3 faces to `builder`.
    ///
    /// A vertex `(i,k)` with `k ≥ 1` is marked frontier when `k = dmax` or when
    /// `i` is closer than `2^k` to a `cut` vertex (one whose base neighbourhood was truncated).
    pub fn build_into(
        builder: &mut ComplexBuilder,
        coset: usize,
        base: BaseGraph,
        base_ids: Vec<VertexId>,
        base_edges: BaseEdges,
        dmax: u32,
        cut: &[usize],
    ) -> Result<Self, HoroballError> {
        let n = base.len();
        let mut cut_dist = vec![UNREACHABLE; n];
        for &c in cut {
            for (i, d) in cut_dist.iter_mut().enumerate() {
                *d = (*d).min(base.distance(i, c));
            }
        }
        let mut levels = vec![base_ids];
        let mut locate = HashMap::new();
        for (i, &v) in levels[0].iter().enumerate() {
            locate.insert(v, (i, 0));
        }
        for k in 1..=dmax {
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                let frontier = k == dmax || (cut_dist[i] as u64) < pow2(k);
                let v = builder.add_vertex(
                    VertexKind::Horo {
                        coset,
                        base: levels[0][i],
                        depth: k,
                    },
                    frontier,
                );
                locate.insert(v, (i, k));
                row.push(v);
            }
            levels.push(row);
        }

        let mut horizontal: Vec<HashMap<(usize, usize), EdgeId>> = vec![HashMap::new(); dmax as usize + 1];
        let mut level0: Vec<(usize, usize, EdgeId)> = Vec::new();
        match base_edges {
            BaseEdges::Create => {
                for (i, j) in base.edges() {
                    let e = builder.add_edge(levels[0][i], levels[0][j], EdgeKind::HorizontalB1)?;
                    level0.push((i, j, e));
                }
            }
            BaseEdges::Existing(list) => level0 = list,
        }
        for &(i, j, e) in &level0 {
            let key = (i.min(j), i.max(j));
            let slot = horizontal[0].entry(key).or_insert(e);
            *slot = (*slot).min(e);
        }
        for k in 1..=dmax {
            for i in 0..n {
                for j in i + 1..n {
                    if joined(&base, k, i, j) {
                        let e = builder.add_edge(
                            levels[k as usize][i],
                            levels[k as usize][j],
                            EdgeKind::HorizontalB2 { level: k },
                        )?;
                        horizontal[k as usize].insert((i, j), e);
                    }
                }
            }
        }
        let mut vertical = Vec::with_capacity(dmax as usize);
        for k in 0..dmax as usize {
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                row.push(builder.add_edge(levels[k][i], levels[k + 1][i], EdgeKind::VerticalB3)?);
            }
            vertical.push(row);
        }
        let h = |k: usize, i: usize, j: usize| horizontal[k].get(&(i.min(j), i.max(j))).copied();

        // C1: horizontal triangles at every level.
        for k in 0..=dmax as usize {
            let mut tris = Vec::new();
            for (&(i, j), &eij) in &horizontal[k] {
                for l in j + 1..n {
                    if let (Some(ejl), Some(eil)) = (h(k, j, l), h(k, i, l)) {
                        tris.push((i, j, l, [eij, ejl, eil]));
                    }
                }
            }
            tris.sort_unstable();
            for (_, _, _, b) in tris {
                builder.add_face(b.to_vec(), FaceKind::HorizontalTriangle)?;
            }
        }
        // C2: a square over every horizontal edge below the cap.
        for k in 0..dmax as usize {
            let mut list: Vec<(usize, usize, EdgeId)> = if k == 0 {
                level0.clone()
            } else {
                horizontal[k].iter().map(|(&(i, j), &e)| (i, j, e)).collect()
            };
            list.sort_unstable_by_key(|x| (x.0.min(x.1), x.0.max(x.1), x.2));
            for (i, j, e) in list {
                let top = h(k + 1, i, j).expect("upper level contains every lower edge");
                builder.add_face(vec![e, vertical[k][j], top, vertical[k][i]], FaceKind::VerticalSquare)?;
            }
        }
        // C3: pentagons with two lower edges v-u-w, no lower chord v-w, one upper edge v-w.
        for k in 0..dmax as usize {
            for v in 0..n {
                for w in v + 1..n {
                    if h(k, v, w).is_some() {
                        continue;
                    }
                    let Some(top) = h(k + 1, v, w) else {
                        continue;
                    };
                    for u in 0..n {
                        if let (Some(vu), Some(uw)) = (h(k, v, u), h(k, u, w)) {
                            builder.add_face(
                                vec![vu, uw, vertical[k][w], top, vertical[k][v]],
                                FaceKind::VerticalPentagon,
                            )?;
                        }
                    }
                }
            }
        }
        Ok(Self {
            coset,
            base,
            depth_cap: dmax,
            levels,
            locate,
            horizontal,
            vertical,
            level0: level0.iter().map(|x| x.2).collect(),
        })
    }

    pub fn vertex(&self, i: usize, k: u32) -> VertexId {
        self.levels[k as usize][i]
    }

    pub fn level(&self, k: u32) -> &[VertexId] {
        &self.levels[k as usize]
    }

    /// `(base index, level)` of a vertex of this horoball.
    pub fn locate(&self, v: VertexId) -> Option<(usize, u32)> {
        self.locate.get(&v).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.locate.contains_key(&v)
    }

    pub fn horizontal_edge(&self, k: u32, i: usize, j: usize) -> Option<EdgeId> {
        self.horizontal
            .get(k as usize)?
            .get(&(i.min(j), i.max(j)))
            .copied()
    }

    /// Edge `(i,k)–(i,k+1)`.
    pub fn vertical_edge(&self, k: u32, i: usize) -> Option<EdgeId> {
        self.vertical.get(k as usize).map(|row| row[i])
    }

    /// Whether `e` is one of this horoball's edges (level 0 included).
    pub fn contains_edge(&self, c: &Complex2, e: EdgeId) -> bool {
        let [a, b] = c.edge(e).endpoints;
        match (self.locate(a), self.locate(b)) {
            (Some((i, k)), Some((j, l))) if k == l => {
                if k == 0 {
                    self.level0.contains(&e)
                } else {
                    self.horizontal_edge(k, i, j) == Some(e)
                }
            }
            (Some((i, k)), Some((j, l))) => i == j && self.vertical_edge(k.min(l), i) == Some(e),
            _ => false,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.levels.iter().flatten().copied()
    }

    pub fn depth(&self, v: VertexId) -> Result<u32, HoroballError> {
        self.locate(v).map(|x| x.1).ok_or(HoroballError::NotInHoroball(v))
    }

    fn levels_between(&self, c: &Complex2, lo: u32, hi: u32) -> Result<SubComplex, HoroballError> {
        for m in [lo, hi] {
            if m > self.depth_cap {
                return Err(HoroballError::OutOfRange { m, dmax: self.depth_cap });
            }
        }
        Ok(c.full_subcomplex((lo..=hi).flat_map(|k| self.level(k).iter().copied())))
    }

    /// `H(m)`: the level-`m` slice.
    pub fn slice(&self, c: &Complex2, m: u32) -> Result<SubComplex, HoroballError> {
        self.levels_between(c, m, m)
    }

    /// `H_m`: levels `0..=m`.
    pub fn below(&self, c: &Complex2, m: u32) -> Result<SubComplex, HoroballError> {
        self.levels_between(c, 0, m)
    }

    /// `H^m`: levels `m..=dmax`.
    pub fn above(&self, c: &Complex2, m: u32) -> Result<SubComplex, HoroballError> {
        self.levels_between(c, m, self.depth_cap)
    }
}

/// A standalone horoball with its own complex.
#[derive(Clone, Debug)]
pub struct HoroballComplex {
    pub horoball: Horoball,
    pub complex: Complex2,
}

/// Builds the horoball over a connected base graph, truncated at `dmax`.
pub fn build_horoball(gamma: &BaseGraph, dmax: u32) -> Result<HoroballComplex, HoroballError> {
    if !gamma.is_connected() {
        return Err(HoroballError::Disconnected);
    }
    let mut b = ComplexBuilder::new();
    let ids: Vec<VertexId> = (0..gamma.len())
        .map(|i| b.add_vertex(VertexKind::Abstract { label: i }, dmax == 0))
        .collect();
    let horoball = Horoball::build_into(&mut b, 0, gamma.clone(), ids, BaseEdges::Create, dmax, &[])?;
    Ok(HoroballComplex {
        horoball,
        complex: b.finish(),
    })
}

impl HoroballComplex {
    pub fn depth(&self, v: VertexId) -> Result<u32, HoroballError> {
        self.horoball.depth(v)
    }

    pub fn slice(&self, m: u32) -> Result<SubComplex, HoroballError> {
        self.horoball.slice(&self.complex, m)
    }

    pub fn below(&self, m: u32) -> Result<SubComplex, HoroballError> {
        self.horoball.below(&self.complex, m)
    }

    pub fn above(&self, m: u32) -> Result<SubComplex, HoroballError> {
        self.horoball.above(&self.complex, m)
    }

    pub fn vertex(&self, i: usize, k: u32) -> VertexId {
        self.horoball.vertex(i, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;

    #[test]
    fn single_vertex_is_a_vertical_path() {
        let h = build_horoball(&BaseGraph::new(1, &[]).unwrap(), 3).unwrap();
        assert_eq!(h.complex.vertex_count(), 4);
        assert_eq!(h.complex.edge_count(), 3);
        assert_eq!(h.complex.face_count(), 0);
    }

    #[test]
    fn depth_reads_levels() {
        let h = build_horoball(&BaseGraph::path(2), 5).unwrap();
        assert_eq!(h.depth(h.vertex(0, 0)).unwrap(), 0);
        assert_eq!(h.depth(h.vertex(1, 5)).unwrap(), 5);
        assert!(matches!(h.depth(VertexId(999)), Err(HoroballError::NotInHoroball(_))));
    }

    #[test]
    fn path_of_three_gains_level_one_shortcut() {
        let h = build_horoball(&BaseGraph::path(3), 1).unwrap();
        assert!(h.horoball.horizontal_edge(1, 0, 2).is_some());
        assert!(h.horoball.horizontal_edge(0, 0, 2).is_none());
        assert!(validate_complex(&h.complex).is_empty());
    }

    #[test]
    fn disconnected_base_is_rejected() {
        let g = BaseGraph::new(2, &[]).unwrap();
        assert_eq!(build_horoball(&g, 1).unwrap_err(), HoroballError::Disconnected);
    }

    #[test]
    fn slices_and_ranges() {
        let h = build_horoball(&BaseGraph::path(2), 2).unwrap();
        let s0 = h.slice(0).unwrap();
        assert_eq!((s0.vertices.len(), s0.edges.len()), (2, 1));
        assert_eq!(h.below(2).unwrap(), h.complex.whole());
        assert!(matches!(h.slice(3), Err(HoroballError::OutOfRange { .. })));
    }

    #[test]
    fn top_level_is_frontier() {
        let h = build_horoball(&BaseGraph::path(4), 2).unwrap();
        for i in 0..4 {
            assert!(h.complex.is_frontier(h.vertex(i, 2)));
            assert!(!h.complex.is_frontier(h.vertex(i, 1)));
            assert!(!h.complex.is_frontier(h.vertex(i, 0)));
        }
    }

    #[test]
    fn lexicographic_base_geodesic() {
        // 4-cycle 0-1-2-3-0: from 0 to 2 both 1 and 3 work; 1 is chosen.
        let g = BaseGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(g.geodesic(0, 2).unwrap(), vec![0, 1, 2]);
    }
}
