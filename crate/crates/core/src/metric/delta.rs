use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Complex2, VertexId};
use crate::path::EdgePath;

use super::triangle::{internal_points, GeodesicTriangle};
use super::{descend, DistanceCache, MetricError, UNREACHABLE};

/// Where the triangles come from.
#[derive(Clone, Debug)]
pub enum TripleSource {
    /// `samples` seeded triples: a non-frontier first corner, and two more corners
    /// at certified distance from it.
    Sampled { samples: usize, seed: u64 },
    /// Every unordered triple of the given vertices.
    Exhaustive(Vec<VertexId>),
    Explicit(Vec<[VertexId; 3]>),
}

#[derive(Clone, Debug)]
pub struct DeltaConfig {
    pub source: TripleSource,
}

/// The pair of points realising δ̂.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaWitness {
    pub triangle: GeodesicTriangle,
    /// Corner index whose adjacent sides carry the two points.
    pub corner: usize,
    /// Common distance of both points from that corner.
    pub parameter: u32,
    pub points: [VertexId; 2],
    pub distance: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    /// Lower bound for δ of the untruncated space.
    pub delta: u32,
    pub witness: DeltaWitness,
    pub triangles_tried: usize,
    pub triangles_certified: usize,
}

struct Local {
    delta: u32,
    index: usize,
    corner: usize,
    parameter: u32,
    points: [VertexId; 2],
}

/// Geodesic from `a` to `b` through `via`.
fn geodesic_through(cache: &DistanceCache<'_>, a: VertexId, via: VertexId, b: VertexId) -> EdgePath {
    let c = cache.complex();
    let first = descend(c, cache.row(a), via).expect("certified").reversed();
    let second = descend(c, cache.row(b), via).expect("certified");
    first.concat(&second)
}

/// Vertices at distance `r` from `a` on some geodesic from `a` to `b`.
fn layer(c: &Complex2, cache: &DistanceCache<'_>, a: VertexId, b: VertexId, r: u32) -> Vec<VertexId> {
    let ra = cache.row(a);
    let rb = cache.row(b);
    let total = ra.dist[b.0];
    (0..c.vertex_count())
        .map(VertexId)
        .filter(|w| ra.dist[w.0] == r && rb.dist[w.0] != UNREACHABLE && rb.dist[w.0] == total - r)
        .collect()
}

/// Thinness of every geodesic triangle on these corners, or `None` if a side is uncertified.
///
/// All geodesic choices are covered at once: for a corner and parameter `r`, the points
/// at distance `r` along the geodesics to each neighbour form one BFS layer per side.
fn evaluate(cache: &DistanceCache<'_>, idx: usize, x: [VertexId; 3]) -> Option<Local> {
    let c = cache.complex();
    let mut d = [[0u32; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let cd = cache.certified(x[i], x[j])?;
                if !cd.exact {
                    return None;
                }
                d[i][j] = cd.value;
            }
        }
    }
    let mut best = Local {
        delta: 0,
        index: idx,
        corner: 0,
        parameter: 0,
        points: [x[0], x[0]],
    };
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let twice = d[i][j] + d[i][k] - d[j][k];
        for r in 0..=twice / 2 {
            let lj = layer(c, cache, x[i], x[j], r);
            let lk = layer(c, cache, x[i], x[k], r);
            for &t in &lj {
                let row = cache.row(t);
                for &s in &lk {
                    let dts = row.dist[s.0];
                    if dts > best.delta && cache.is_exact(t, s, dts) {
                        best = Local {
                            delta: dts,
                            index: idx,
                            corner: i,
                            parameter: r,
                            points: [t, s],
                        };
                    }
                }
            }
        }
    }
    Some(best)
}

fn sample_triples(cache: &DistanceCache<'_>, samples: usize, seed: u64) -> Vec<[VertexId; 3]> {
    let c = cache.complex();
    let pool: Vec<VertexId> = c.vertices().filter(|(_, v)| !v.frontier).map(|(id, _)| id).collect();
    if pool.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x1 = pool[rng.gen_range(0..pool.len())];
        let row = cache.row(x1);
        let near: Vec<VertexId> = row
            .dist
            .iter()
            .enumerate()
            .filter(|&(w, &d)| d != UNREACHABLE && cache.is_exact(x1, VertexId(w), d))
            .map(|(i, _)| VertexId(i))
            .collect();
        let x2 = near[rng.gen_range(0..near.len())];
        let x3 = near[rng.gen_range(0..near.len())];
        out.push([x1, x2, x3]);
    }
    out
}

/// Lower bound δ̂ for the thin-triangle constant from certified triangles.
///
/// Triple lists are generated before evaluation, so a larger sample extends a smaller
/// one and δ̂ never decreases with sample size. Evaluation runs in parallel; ties are
/// broken by triple order, so the witness is deterministic.
pub fn delta_estimate(c: &Complex2, config: &DeltaConfig) -> Result<DeltaReport, MetricError> {
    let cache = DistanceCache::new(c);
    let triples: Vec<[VertexId; 3]> = match &config.source {
        TripleSource::Sampled { samples, seed } => sample_triples(&cache, *samples, *seed),
        TripleSource::Explicit(list) => list.clone(),
        TripleSource::Exhaustive(vs) => {
            let mut out = Vec::new();
            for a in 0..vs.len() {
                for b in a + 1..vs.len() {
                    for c3 in b + 1..vs.len() {
                        out.push([vs[a], vs[b], vs[c3]]);
                    }
                }
            }
            out
        }
    };
    for t in &triples {
        for &v in t {
            if !c.contains_vertex(v) {
                return Err(MetricError::UnknownVertex(v));
            }
        }
    }
    let results: Vec<Option<Local>> = triples
        .par_iter()
        .enumerate()
        .map(|(i, &t)| evaluate(&cache, i, t))
        .collect();
    let certified = results.iter().filter(|r| r.is_some()).count();
    let best = results
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.delta > a.delta { b } else { a })
        .ok_or(MetricError::NoCertifiedTriangle)?;
    let x = triples[best.index];
    let (i, j, k) = (best.corner, (best.corner + 1) % 3, (best.corner + 2) % 3);
    // Sides through the witness points; the third side is the lexicographic geodesic.
    let mut sides: [Option<EdgePath>; 3] = [None, None, None];
    // sides[m] runs x[m+1] → x[m+2]; side x[i]→x[j] is sides[k], side x[k]→x[i] is sides[j].
    sides[k] = Some(geodesic_through(&cache, x[i], best.points[0], x[j]));
    sides[j] = Some(geodesic_through(&cache, x[i], best.points[1], x[k]).reversed());
    sides[i] = Some(descend(c, cache.row(x[k]), x[j]).expect("certified"));
    let triangle = internal_points(x, sides.map(|s| s.expect("all sides set")))?;
    Ok(DeltaReport {
        delta: best.delta,
        witness: DeltaWitness {
            triangle,
            corner: best.corner,
            parameter: best.parameter,
            points: best.points,
            distance: best.delta,
        },
        triangles_tried: triples.len(),
        triangles_certified: certified,
    })
}
