//! Breadth-first metric queries with truncation certificates.

mod convexity;
mod delta;
mod horo;
mod triangle;

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{Complex2, SubComplex, VertexId};
use crate::path::EdgePath;

pub use convexity::{convexity_check, ConvexityConfig, ConvexityReport, ConvexityViolation};
pub use delta::{delta_estimate, DeltaConfig, DeltaReport, DeltaWitness, TripleSource};
pub use horo::{geodesic_hausdorff_spread, horoball_geodesic};
pub use triangle::{internal_points, GeodesicTriangle, HalfInt, PathPoint};

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("{0} and {1} are disconnected within the truncation (uncertified)")]
    Disconnected(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("{0} is not in the horoball")]
    NotInHoroball(VertexId),
    #[error("normal form needs level {required} but the depth cap is {cap} (uncertified)")]
    ExceedsDepthCap { required: u32, cap: u32 },
    #[error("side {side} does not run between the expected corners")]
    SideMismatch { side: usize },
    #[error("side lengths {0:?} violate the triangle inequality")]
    TriangleInequality([usize; 3]),
    #[error("no certified triangle in the sample")]
    NoCertifiedTriangle,
}

/// A truncated distance with its certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedDistance {
    pub value: u32,
    /// True when `value` is the distance in the untruncated space.
    pub exact: bool,
}

/// Whether a truncated distance `d` between vertices at frontier distances `fu` and `fv`
/// is exact.
///
/// Anything missing from the truncation hangs off frontier vertices, so a shortcut
/// through it has length at least `fu + fv + 1`.
pub fn is_exact(d: u32, fu: u32, fv: u32) -> bool {
    d as u64 <= fu as u64 + fv as u64 + 1
}

/// Whether every geodesic of the untruncated space between the two vertices is
/// visible in the truncation.
pub fn geodesics_visible(d: u32, fu: u32, fv: u32) -> bool {
    (d as u64) < fu as u64 + fv as u64 + 1
}

/// Distance from each vertex to the nearest frontier vertex.
pub fn frontier_distances(c: &Complex2) -> Vec<u32> {
    let frontier: Vec<VertexId> = c.vertices().filter(|(_, v)| v.frontier).map(|(id, _)| id).collect();
    multi_source(c, &frontier)
}

/// Breadth-first distances from one source.
#[derive(Clone, Debug)]
pub struct BfsRow {
    pub source: VertexId,
    pub dist: Vec<u32>,
}

impl BfsRow {
    pub fn new(c: &Complex2, source: VertexId) -> Self {
        let mut dist = vec![UNREACHABLE; c.vertex_count()];
        dist[source.0] = 0;
        let mut q = VecDeque::from([source]);
        while let Some(x) = q.pop_front() {
            let d = dist[x.0];
            for &y in c.neighbors(x) {
                if dist[y.0] == UNREACHABLE {
                    dist[y.0] = d + 1;
                    q.push_back(y);
                }
            }
        }
        Self { source, dist }
    }
}

/// Lazily filled table of BFS rows, shareable across threads.
pub struct DistanceCache<'a> {
    complex: &'a Complex2,
    frontier: Vec<u32>,
    rows: Vec<OnceLock<BfsRow>>,
}

impl<'a> DistanceCache<'a> {
    pub fn new(complex: &'a Complex2) -> Self {
        Self {
            complex,
            frontier: frontier_distances(complex),
            rows: (0..complex.vertex_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn complex(&self) -> &'a Complex2 {
        self.complex
    }

    pub fn row(&self, v: VertexId) -> &BfsRow {
        self.rows[v.0].get_or_init(|| BfsRow::new(self.complex, v))
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> u32 {
        self.row(u).dist[v.0]
    }

    pub fn frontier_distance(&self, v: VertexId) -> u32 {
        self.frontier[v.0]
    }

    pub fn is_exact(&self, u: VertexId, v: VertexId, d: u32) -> bool {
        is_exact(d, self.frontier[u.0], self.frontier[v.0])
    }

    pub fn certified(&self, u: VertexId, v: VertexId) -> Option<CertifiedDistance> {
        let value = self.dist(u, v);
        (value != UNREACHABLE).then(|| CertifiedDistance {
            value,
            exact: self.is_exact(u, v, value),
        })
    }

    /// Certified distance with every geodesic present in the truncation.
    pub fn all_geodesics_visible(&self, u: VertexId, v: VertexId) -> bool {
        let d = self.dist(u, v);
        d != UNREACHABLE && geodesics_visible(d, self.frontier[u.0], self.frontier[v.0])
    }
}

fn check(c: &Complex2, v: VertexId) -> Result<(), MetricError> {
    if c.contains_vertex(v) {
        Ok(())
    } else {
        Err(MetricError::UnknownVertex(v))
    }
}

pub fn bfs_distance(c: &Complex2, u: VertexId, v: VertexId) -> Result<CertifiedDistance, MetricError> {
    check(c, u)?;
    check(c, v)?;
    let value = BfsRow::new(c, u).dist[v.0];
    if value == UNREACHABLE {
        return Err(MetricError::Disconnected(u, v));
    }
    let f = frontier_distances(c);
    Ok(CertifiedDistance {
        value,
        exact: is_exact(value, f[u.0], f[v.0]),
    })
}

/// Walks from `u` to `row.source`, always to the smallest-id neighbour one step closer.
pub fn descend(c: &Complex2, row: &BfsRow, u: VertexId) -> Option<EdgePath> {
    if row.dist[u.0] == UNREACHABLE {
        return None;
    }
    let mut verts = vec![u];
    let mut cur = u;
    while row.dist[cur.0] > 0 {
        let d = row.dist[cur.0];
        cur = *c.neighbors(cur).iter().find(|w| row.dist[w.0] == d - 1)?;
        verts.push(cur);
    }
    EdgePath::from_vertices(c, &verts).ok()
}

/// Shortest path from `u` to `v` with lexicographic tie-breaking.
pub fn bfs_geodesic(c: &Complex2, u: VertexId, v: VertexId) -> Result<EdgePath, MetricError> {
    check(c, u)?;
    check(c, v)?;
    let row = BfsRow::new(c, v);
    descend(c, &row, u).ok_or(MetricError::Disconnected(u, v))
}

/// `B(v, K)`: vertices within `K` and every cell spanned by them.
#[derive(Clone, Debug)]
pub struct Ball {
    pub cells: SubComplex,
    /// No frontier vertex lies within distance `K`, so the ball is complete.
    pub exact: bool,
}

pub fn ball(c: &Complex2, v: VertexId, k: u32) -> Result<Ball, MetricError> {
    check(c, v)?;
    let row = BfsRow::new(c, v);
    let cells = c.full_subcomplex(
        row.dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= k)
            .map(|(i, _)| VertexId(i)),
    );
    Ok(Ball {
        cells,
        exact: k == 0 || frontier_distances(c)[v.0] > k,
    })
}

/// Vertex-resolution Hausdorff distance between two vertex sets.
pub fn hausdorff_distance(c: &Complex2, p: &EdgePath, q: &EdgePath) -> u32 {
    let one_way = |a: &EdgePath, b: &EdgePath| -> u32 {
        let d = multi_source(c, &b.vertices);
        a.vertices.iter().map(|v| d[v.0]).max().unwrap_or(0)
    };
    one_way(p, q).max(one_way(q, p))
}

pub(crate) fn multi_source(c: &Complex2, sources: &[VertexId]) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; c.vertex_count()];
    let mut q = VecDeque::new();
    for &s in sources {
        if dist[s.0] != 0 {
            dist[s.0] = 0;
            q.push_back(s);
        }
    }
    while let Some(x) = q.pop_front() {
        for &y in c.neighbors(x) {
            if dist[y.0] == UNREACHABLE {
                dist[y.0] = dist[x.0] + 1;
                q.push_back(y);
            }
        }
    }
    dist
}
