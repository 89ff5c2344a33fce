use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Vertex `(i, j)` of a strip, with `0 ≤ i ≤ width` and `0 ≤ j ≤ height`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StripVertex(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriangleId(pub usize);

/// Unordered strip edge, smaller vertex first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StripEdge(pub StripVertex, pub StripVertex);

impl StripEdge {
    pub fn new(a: StripVertex, b: StripVertex) -> Self {
        if a <= b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn touches(self, v: StripVertex) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(self, v: StripVertex) -> StripVertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

/// `[0, width] × [0, height]` cut into unit squares, each split by the diagonal
/// from `(i, j)` to `(i+1, j+1)`. Rows `j = 0` and `j = height` are the strip's
/// long sides; columns `0` and `width` are its ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strip {
    pub width: usize,
    pub height: usize,
}

impl Strip {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "strip dimensions must be positive");
        Self { width, height }
    }

    pub fn vertex_count(&self) -> usize {
        (self.width + 1) * (self.height + 1)
    }

    pub fn triangle_count(&self) -> usize {
        2 * self.width * self.height
    }

    pub fn vertex(&self, i: usize, j: usize) -> StripVertex {
        debug_assert!(i <= self.width && j <= self.height);
        StripVertex(i * (self.height + 1) + j)
    }

    pub fn coords(&self, v: StripVertex) -> (usize, usize) {
        (v.0 / (self.height + 1), v.0 % (self.height + 1))
    }

    pub fn vertices(&self) -> impl Iterator<Item = StripVertex> {
        (0..self.vertex_count()).map(StripVertex)
    }

    pub fn triangles(&self) -> impl Iterator<Item = TriangleId> {
        (0..self.triangle_count()).map(TriangleId)
    }

    /// Lower triangle of square `(i, j)` is `2(iH + j)`, the upper one follows it.
    pub fn triangle_vertices(&self, t: TriangleId) -> [StripVertex; 3] {
        let sq = t.0 / 2;
        let (i, j) = (sq / self.height, sq % self.height);
        if t.0 % 2 == 0 {
            [self.vertex(i, j), self.vertex(i + 1, j), self.vertex(i + 1, j + 1)]
        } else {
            [self.vertex(i, j), self.vertex(i + 1, j + 1), self.vertex(i, j + 1)]
        }
    }

    pub fn triangle_edges(&self, t: TriangleId) -> [StripEdge; 3] {
        let [a, b, c] = self.triangle_vertices(t);
        [StripEdge::new(a, b), StripEdge::new(b, c), StripEdge::new(c, a)]
    }

    /// Leftmost column of the square holding `t`.
    pub fn triangle_column(&self, t: TriangleId) -> usize {
        t.0 / 2 / self.height
    }

    pub fn neighbors(&self, v: StripVertex) -> Vec<StripVertex> {
        let (i, j) = self.coords(v);
        let (i, j) = (i as isize, j as isize);
        [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)]
            .into_iter()
            .map(|(di, dj)| (i + di, j + dj))
            .filter(|&(a, b)| a >= 0 && b >= 0 && a as usize <= self.width && b as usize <= self.height)
            .map(|(a, b)| self.vertex(a as usize, b as usize))
            .collect()
    }

    pub fn edges(&self) -> Vec<StripEdge> {
        let mut out = Vec::new();
        for v in self.vertices() {
            for w in self.neighbors(v) {
                if v < w {
                    out.push(StripEdge(v, w));
                }
            }
        }
        out
    }

    pub fn triangles_at(&self, v: StripVertex) -> Vec<TriangleId> {
        let (i, j) = self.coords(v);
        let mut out = Vec::new();
        for si in i.saturating_sub(1)..=i.min(self.width - 1) {
            for sj in j.saturating_sub(1)..=j.min(self.height - 1) {
                for t in [TriangleId(2 * (si * self.height + sj)), TriangleId(2 * (si * self.height + sj) + 1)] {
                    if self.triangle_vertices(t).contains(&v) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// The one or two triangles containing `e`.
    pub fn edge_triangles(&self, e: StripEdge) -> Vec<TriangleId> {
        let mut out: Vec<TriangleId> = self
            .triangles_at(e.0)
            .into_iter()
            .filter(|&t| self.triangle_vertices(t).contains(&e.1))
            .collect();
        out.sort();
        out
    }

    /// Triangles sharing an edge with `t`, with the shared edge.
    pub fn adjacent_triangles(&self, t: TriangleId) -> Vec<(TriangleId, StripEdge)> {
        let mut out = Vec::new();
        for e in self.triangle_edges(t) {
            for u in self.edge_triangles(e) {
                if u != t {
                    out.push((u, e));
                }
            }
        }
        out.sort();
        out
    }

    pub fn on_rows(&self, v: StripVertex) -> bool {
        let (_, j) = self.coords(v);
        j == 0 || j == self.height
    }

    pub fn on_ends(&self, v: StripVertex) -> bool {
        let (i, _) = self.coords(v);
        i == 0 || i == self.width
    }

    pub fn on_boundary(&self, v: StripVertex) -> bool {
        self.on_rows(v) || self.on_ends(v)
    }

    /// Edge lying along the strip boundary (one triangle only).
    pub fn is_boundary_edge(&self, e: StripEdge) -> bool {
        self.edge_triangles(e).len() == 1
    }

    /// Boundary edge along one of the ends.
    pub fn is_end_edge(&self, e: StripEdge) -> bool {
        let (a, _) = self.coords(e.0);
        let (b, _) = self.coords(e.1);
        a == b && (a == 0 || a == self.width)
    }

    pub fn is_row_edge(&self, e: StripEdge) -> bool {
        let (_, a) = self.coords(e.0);
        let (_, b) = self.coords(e.1);
        a == b && (a == 0 || a == self.height)
    }

    /// Whether the centroid of `t` lies inside the closed loop `lp` (vertex cycle).
    pub fn encloses(&self, lp: &[StripVertex], t: TriangleId) -> bool {
        let vs = self.triangle_vertices(t);
        // Scaled by 3 so the centroid has integer coordinates off the lattice.
        let (cx, cy) = vs.iter().fold((0i64, 0i64), |(x, y), &v| {
            let (i, j) = self.coords(v);
            (x + i as i64, y + j as i64)
        });
        let mut inside = false;
        for k in 0..lp.len() {
            let (x1, y1) = self.coords(lp[k]);
            let (x2, y2) = self.coords(lp[(k + 1) % lp.len()]);
            let (x1, y1, x2, y2) = (3 * x1 as i64, 3 * y1 as i64, 3 * x2 as i64, 3 * y2 as i64);
            if (y1 > cy) != (y2 > cy) {
                // x of the crossing, compared without division.
                let lhs = (x1 - cx) * (y2 - y1) + (cy - y1) * (x2 - x1);
                if (lhs > 0) == (y2 > y1) {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Boundary edges of a triangle set: edges with exactly one side in the set.
pub fn boundary_edges(strip: &Strip, tris: &std::collections::BTreeSet<TriangleId>) -> Vec<StripEdge> {
    let mut count: BTreeMap<StripEdge, usize> = BTreeMap::new();
    for &t in tris {
        for e in strip.triangle_edges(t) {
            *count.entry(e).or_default() += 1;
        }
    }
    count.into_iter().filter(|&(_, n)| n == 1).map(|(e, _)| e).collect()
}

/// Orders `edges` into one closed vertex cycle, starting at the least vertex and
/// continuing to its lesser neighbour. `None` unless they form a single embedded loop.
pub fn edge_cycle(edges: &[StripEdge]) -> Option<Vec<StripVertex>> {
    let mut adj: BTreeMap<StripVertex, Vec<StripVertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    if adj.is_empty() || adj.values().any(|n| n.len() != 2) {
        return None;
    }
    let start = *adj.keys().next()?;
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = *adj[&start].iter().min()?;
    while cur != start {
        cycle.push(cur);
        let n = &adj[&cur];
        let next = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = next;
    }
    (cycle.len() == adj.len()).then_some(cycle)
}
