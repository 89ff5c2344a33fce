use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::VertexId;
use crate::cusped::CuspedComplex;

use super::color::StripMap;
use super::strip::Strip;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripMapParams {
    pub width: usize,
    pub height: usize,
    /// Local moves attempted after the initial column map.
    pub steps: usize,
    pub seed: u64,
    /// Share of image moves restricted to deeper neighbours, in `[0, 1]`.
    pub descend: f64,
}

/// Random strip map by a Markov chain on valid maps.
///
/// Column 0 goes to the basepoint and each later column to one vertex of a lazy random
/// walk in Y. Each step then picks a vertex off column 0 and proposes either the image of
/// a strip neighbour or a neighbour of its current image (a deeper one with probability
/// `descend`), keeping the move only if every
/// incident simplex stays valid and rows stay in Y.
pub fn random_strip_map(x: &CuspedComplex, p: &StripMapParams) -> StripMap {
    let strip = Strip::new(p.width, p.height);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut m = StripMap::constant(strip.clone(), x.basepoint());
    let mut cur = x.basepoint();
    for i in 1..=strip.width {
        if rng.gen_bool(0.5) {
            let ys: Vec<VertexId> = x.complex.neighbors(cur).iter().copied().filter(|&w| x.is_y_vertex(w)).collect();
            if let Some(&w) = ys.choose(&mut rng) {
                cur = w;
            }
        }
        for j in 0..=strip.height {
            m.set(strip.vertex(i, j), cur);
        }
    }
    for _ in 0..p.steps {
        let v = strip.vertex(rng.gen_range(1..=strip.width), rng.gen_range(0..=strip.height));
        let old = m.image(v);
        let roll: f64 = rng.gen();
        let proposal = if roll < 0.5 {
            let ns = strip.neighbors(v);
            m.image(*ns.choose(&mut rng).expect("strip vertices have neighbours"))
        } else {
            let deeper = roll < 0.5 + p.descend / 2.0;
            let depth = x.complex.depth(old);
            let options: Vec<VertexId> = x
                .complex
                .neighbors(old)
                .iter()
                .copied()
                .filter(|&w| !deeper || x.complex.depth(w) > depth)
                .collect();
            match options.choose(&mut rng) {
                Some(&w) => w,
                None => continue,
            }
        };
        if proposal == old {
            continue;
        }
        m.set(v, proposal);
        if !m.locally_valid(x, v) {
            m.set(v, old);
        }
    }
    m
}
