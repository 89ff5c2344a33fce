use crate::complex::{Complex2, VertexId};
use crate::horoball::{pow2, Horoball, UNREACHABLE as BASE_UNREACHABLE};
use crate::path::EdgePath;

use super::{DistanceCache, MetricError, UNREACHABLE};

/// Geodesic in normal form: straight up, at most three horizontal steps, straight down.
///
/// The turning level `L` is the largest minimiser of `(L-k1) + (L-k2) + ⌈n/2^L⌉`
/// over `L ≥ max(k1,k2)`, with `n` the base distance. Horizontal vertices are
/// taken every `2^L` steps along the lexicographic base geodesic.
pub fn horoball_geodesic(c: &Complex2, h: &Horoball, u: VertexId, v: VertexId) -> Result<EdgePath, MetricError> {
    let (i, k1) = h.locate(u).ok_or(MetricError::NotInHoroball(u))?;
    let (j, k2) = h.locate(v).ok_or(MetricError::NotInHoroball(v))?;
    let n = h.base.distance(i, j);
    if n == BASE_UNREACHABLE {
        return Err(MetricError::Disconnected(u, v));
    }
    let n = n as u64;
    let lo = k1.max(k2);
    let cost = |l: u32| -> u64 { (l - k1) as u64 + (l - k2) as u64 + n.div_ceil(pow2(l)) };
    let mut best = lo;
    let mut l = lo;
    // Beyond the first level with 2^L ≥ n the cost only grows.
    loop {
        if cost(l) <= cost(best) {
            best = l;
        }
        if pow2(l) >= n || l >= 62 {
            break;
        }
        l += 1;
    }
    if best > h.depth_cap {
        return Err(MetricError::ExceedsDepthCap {
            required: best,
            cap: h.depth_cap,
        });
    }
    let mut verts: Vec<VertexId> = (k1..best).map(|k| h.vertex(i, k)).collect();
    if n > 0 {
        let g = h.base.geodesic(i, j).expect("reachable");
        let step = pow2(best);
        let hops = n.div_ceil(step);
        for t in 0..=hops {
            let idx = (t * step).min(n) as usize;
            verts.push(h.vertex(g[idx], best));
        }
    } else {
        verts.push(h.vertex(i, best));
    }
    verts.extend((k2..best).rev().map(|k| h.vertex(j, k)));
    Ok(EdgePath::from_vertices(c, &verts).expect("normal-form vertices are adjacent"))
}

/// Largest Hausdorff distance between `reference` and any geodesic with the same
/// endpoints, using the shortest-path DAG (vertex resolution).
///
/// One direction is the farthest DAG vertex from `reference`; the other is, for each
/// reference vertex, the best worst-case route through the DAG (a widest-path sweep).
pub fn geodesic_hausdorff_spread(cache: &DistanceCache<'_>, reference: &EdgePath) -> Result<u32, MetricError> {
    let c = cache.complex();
    let (u, v) = (reference.start(), reference.end());
    let du = cache.row(u);
    let dv = cache.row(v);
    let total = du.dist[v.0];
    if total == UNREACHABLE {
        return Err(MetricError::Disconnected(u, v));
    }
    let mut layers: Vec<Vec<VertexId>> = vec![Vec::new(); total as usize + 1];
    for (x, &d) in du.dist.iter().enumerate() {
        if d != UNREACHABLE && dv.dist[x] != UNREACHABLE && d + dv.dist[x] == total {
            layers[d as usize].push(VertexId(x));
        }
    }
    let mut spread = 0;
    for layer in &layers {
        for &w in layer {
            let near = reference.vertices.iter().map(|&p| cache.dist(p, w)).min().unwrap_or(0);
            spread = spread.max(near);
        }
    }
    for &p in &reference.vertices {
        let row = cache.row(p);
        // best[w]: over DAG routes from u to w, the largest possible min distance to p.
        let mut best = vec![0u32; c.vertex_count()];
        best[u.0] = row.dist[u.0];
        for d in 1..layers.len() {
            for &w in &layers[d] {
                let mut b = 0;
                for &x in c.neighbors(w) {
                    if du.dist[x.0] == d as u32 - 1 && dv.dist[x.0] == total - d as u32 + 1 {
                        b = b.max(best[x.0].min(row.dist[w.0]));
                    }
                }
                best[w.0] = b;
            }
        }
        spread = spread.max(best[v.0]);
    }
    Ok(spread)
}
