use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Complex2, VertexId};
use crate::horoball::Horoball;

use super::{DistanceCache, UNREACHABLE};

#[derive(Clone, Debug)]
pub struct ConvexityConfig {
    pub samples: usize,
    pub seed: u64,
}

/// A geodesic from `u` to `v` passes through `vertex`, outside the `m`-horoball.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConvexityViolation {
    pub u: VertexId,
    pub v: VertexId,
    pub vertex: VertexId,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub m: u32,
    /// Depth 0 puts every horoball vertex in range, so nothing is checked.
    pub vacuous: bool,
    pub pairs_sampled: usize,
    pub pairs_certified: usize,
    pub violations: Vec<ConvexityViolation>,
    /// Pairs with a possible geodesic through the truncated part.
    pub uncertified: Vec<(VertexId, VertexId)>,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

enum Outcome {
    Uncertified,
    Checked(Vec<ConvexityViolation>),
}

fn check_pair(cache: &DistanceCache<'_>, h: &Horoball, m: u32, u: VertexId, v: VertexId) -> Outcome {
    if !cache.all_geodesics_visible(u, v) {
        return Outcome::Uncertified;
    }
    let (du, dv) = (cache.row(u), cache.row(v));
    let total = du.dist[v.0];
    let mut bad = Vec::new();
    for (w, &a) in du.dist.iter().enumerate() {
        let b = dv.dist[w];
        if a == UNREACHABLE || b == UNREACHABLE || a + b != total {
            continue;
        }
        let w = VertexId(w);
        let inside = h.locate(w).is_some_and(|(_, k)| k >= m);
        if !inside {
            bad.push(ConvexityViolation { u, v, vertex: w });
        }
    }
    Outcome::Checked(bad)
}

/// Samples pairs at depth ≥ `m` in a common horoball and looks for a geodesic that leaves
/// the `m`-horoball, checking every vertex of the shortest-path DAG.
pub fn convexity_check(c: &Complex2, horoballs: &[Horoball], m: u32, config: &ConvexityConfig) -> ConvexityReport {
    let mut report = ConvexityReport {
        m,
        vacuous: m == 0,
        pairs_sampled: 0,
        pairs_certified: 0,
        violations: Vec::new(),
        uncertified: Vec::new(),
    };
    if m == 0 {
        return report;
    }
    let pools: Vec<Vec<VertexId>> = horoballs
        .iter()
        .map(|h| h.vertices().filter(|&v| h.locate(v).is_some_and(|(_, k)| k >= m)).collect())
        .collect();
    let weighted: Vec<(usize, usize)> = pools
        .iter()
        .enumerate()
        .flat_map(|(hi, p)| (0..p.len()).map(move |j| (hi, j)))
        .collect();
    if weighted.is_empty() {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pairs: Vec<(usize, VertexId, VertexId)> = (0..config.samples)
        .map(|_| {
            let (hi, j) = weighted[rng.gen_range(0..weighted.len())];
            let pool = &pools[hi];
            (hi, pool[j], pool[rng.gen_range(0..pool.len())])
        })
        .collect();
    let cache = DistanceCache::new(c);
    let outcomes: Vec<Outcome> = pairs
        .par_iter()
        .map(|&(hi, u, v)| check_pair(&cache, &horoballs[hi], m, u, v))
        .collect();
    report.pairs_sampled = pairs.len();
    for (&(_, u, v), o) in pairs.iter().zip(outcomes) {
        match o {
            Outcome::Uncertified => report.uncertified.push((u, v)),
            Outcome::Checked(bad) => {
                report.pairs_certified += 1;
                report.violations.extend(bad);
            }
        }
    }
    report.violations.sort();
    report.violations.dedup();
    report.uncertified.sort();
    report.uncertified.dedup();
    report
}
