//! Simplicial strip maps into a cusped space, their per-coset colorings, and the
//! excision of disk pairs covering everything mapped outside Y.

mod color;
mod disk;
mod excise;
mod generate;
mod strip;

use thiserror::Error;

pub use color::{color, coset_vertices, red_classes, separation_oracle, Color, Coloring, Separation, StripMap};
pub use disk::{disk_pair_induction, disk_pair_region_grow, green_row_vertex, DiskPair};
pub use excise::{colorings, excise, red_cosets, validate_excision, CosetClasses, Excision, ExcisionReport};
pub use generate::{random_strip_map, StripMapParams};
pub use strip::{boundary_edges, edge_cycle, Strip, StripEdge, StripVertex, TriangleId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExcisionError {
    #[error("invalid strip map: {0}")]
    InvalidStripMap(String),
    #[error("no coset {0}")]
    UnknownCoset(usize),
    #[error("coloring of coset {coset} breaks an observation: {detail}")]
    Observation { coset: usize, detail: String },
    #[error("empty class")]
    EmptyClass,
    #[error("class at {class_root:?} contains a triangle that is not red")]
    NotRed { class_root: TriangleId },
    #[error("class at {class_root:?} is not reachable from the rows")]
    Unreachable { class_root: TriangleId },
    #[error("disk for class at {class_root:?} is not bounded by an embedded loop")]
    NotADisk { class_root: TriangleId },
    #[error("class at {class_root:?}: pocket split leaves the entry edge on the wrong side (reported truncated)")]
    AmbiguousSplit { class_root: TriangleId },
    #[error("class at {class_root:?}: {detail}")]
    InductionFailed { class_root: TriangleId, detail: String },
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::complex::VertexId;
    use crate::cusped::{build_cusped_space, CuspedComplex, ResourceCaps};
    use crate::presentation::parse_presentation;

    struct Fixture {
        x: CuspedComplex,
        /// Cosets of the identity for `⟨a⟩` and `⟨b⟩`.
        p: usize,
        q: usize,
    }

    impl Fixture {
        fn new() -> Self {
            let text = "gens a,b; rels; periph P: a [free]; periph Q: b [free]";
            let x = build_cusped_space(&parse_presentation(text).unwrap(), 3, 3, &ResourceCaps::default()).unwrap();
            let p = x.coset_index_of(x.basepoint(), 0).unwrap();
            let q = x.coset_index_of(x.basepoint(), 1).unwrap();
            Self { x, p, q }
        }

        fn one(&self) -> VertexId {
            self.x.basepoint()
        }

        fn word(&self, w: &str) -> VertexId {
            self.x.find_word(&self.x.presentation.parse_word(w).unwrap()).unwrap()
        }

        /// Vertex above the identity at depth `k` in coset `c`'s horoball.
        fn above_one(&self, c: usize, k: u32) -> VertexId {
            let h = &self.x.horoballs[c];
            h.vertex(h.locate(self.one()).unwrap().0, k)
        }

        /// Everything at the identity, except `b` at the bottom-left and `a` at the
        /// top-left corner so both cosets see a green row vertex.
        fn base_map(&self, width: usize, height: usize) -> StripMap {
            let s = Strip::new(width, height);
            let mut m = StripMap::constant(s.clone(), self.one());
            m.set(s.vertex(0, 0), self.word("b"));
            m.set(s.vertex(0, height), self.word("a"));
            m
        }
    }

    fn star(s: &Strip, v: StripVertex) -> BTreeSet<TriangleId> {
        s.triangles_at(v).into_iter().collect()
    }

    #[test]
    fn vertex_colors() {
        let f = Fixture::new();
        let mut m = f.base_map(6, 6);
        let s = m.strip.clone();
        let centre = s.vertex(3, 3);
        for w in s.neighbors(centre) {
            m.set(w, f.above_one(f.p, 1));
        }
        m.set(centre, f.above_one(f.p, 2));
        m.validate(&f.x).unwrap();
        let c = color(&f.x, &m, f.p).unwrap();
        assert_eq!(c.vertex(centre), Color::Red);
        assert_eq!(c.vertex(s.vertex(5, 5)), Color::Blue);
        assert_eq!(c.vertex(s.vertex(0, 0)), Color::Green);
    }

    #[test]
    fn invalid_map_breaks_an_observation() {
        let f = Fixture::new();
        let mut m = f.base_map(4, 4);
        let s = m.strip.clone();
        m.set(s.vertex(2, 2), f.above_one(f.p, 1));
        m.set(s.vertex(3, 2), f.word("b"));
        assert!(m.validate(&f.x).is_err());
        assert!(matches!(color(&f.x, &m, f.p), Err(ExcisionError::Observation { .. })));
    }

    #[test]
    fn separation_examples() {
        let f = Fixture::new();
        let zp = coset_vertices(&f.x, f.p);
        let zq = coset_vertices(&f.x, f.q);
        assert_eq!(separation_oracle(&f.x, f.above_one(f.p, 1), &zp), Separation::Separated);
        assert_eq!(separation_oracle(&f.x, f.word("b"), &zp), Separation::NotSeparated);
        assert_eq!(separation_oracle(&f.x, f.above_one(f.p, 1), &zq), Separation::NotSeparated);
    }

    #[test]
    fn foreign_horoball_over_a_frontier_member_is_not_sealed() {
        let f = Fixture::new();
        // `abb` is the only member of its ⟨a⟩-coset inside the ball, and it lies in
        // the ⟨b⟩-coset of `a`; the untruncated ⟨a⟩-coset leaves that set.
        let abb = f.word("abb");
        let qa = f.x.coset_index_of(f.word("a"), 1).unwrap();
        let pabb = f.x.coset_index_of(abb, 0).unwrap();
        assert_eq!(f.x.cosets[pabb].members, vec![abb]);
        let h = &f.x.horoballs[pabb];
        let up = h.vertex(0, 1);
        assert_eq!(separation_oracle(&f.x, up, &coset_vertices(&f.x, qa)), Separation::Uncertified);
        assert_eq!(separation_oracle(&f.x, up, &coset_vertices(&f.x, pabb)), Separation::Separated);
    }

    #[test]
    fn partial_coset_is_uncertified() {
        let f = Fixture::new();
        let z: std::collections::HashSet<VertexId> = [f.one()].into_iter().collect();
        let deep = f.above_one(f.p, 3);
        // Only part of the coset: the BFS can walk down to another member.
        assert_eq!(separation_oracle(&f.x, deep, &z), Separation::NotSeparated);
    }

    #[test]
    fn no_red_no_classes() {
        let f = Fixture::new();
        let m = f.base_map(4, 3);
        let c = color(&f.x, &m, f.p).unwrap();
        assert!(red_classes(&m, &c).is_empty());
        assert!(excise(&f.x, &m).unwrap().pairs.is_empty());
    }

    #[test]
    fn interior_red_vertex_gives_its_star() {
        let f = Fixture::new();
        let mut m = f.base_map(6, 4);
        let s = m.strip.clone();
        let v = s.vertex(3, 2);
        m.set(v, f.above_one(f.p, 1));
        let c = color(&f.x, &m, f.p).unwrap();
        let classes = red_classes(&m, &c);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].len(), 6);
        let a = disk_pair_induction(&m, &c, &classes[0]).unwrap();
        let b = disk_pair_region_grow(&m, &c, &classes[0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.triangles, star(&s, v));
        assert_eq!(a.boundary.len(), 6);
        assert!(a.boundary_edges().iter().all(|&e| c.edge(e) == Color::Blue));
        assert!(!a.truncated && !a.full_interior);
    }

    #[test]
    fn stars_sharing_a_blue_edge_are_two_classes() {
        let f = Fixture::new();
        let mut m = f.base_map(6, 4);
        let s = m.strip.clone();
        m.set(s.vertex(2, 2), f.above_one(f.p, 1));
        m.set(s.vertex(3, 1), f.above_one(f.p, 1));
        let c = color(&f.x, &m, f.p).unwrap();
        let classes = red_classes(&m, &c);
        assert_eq!(classes.len(), 2);
        let shared = StripEdge::new(s.vertex(2, 1), s.vertex(3, 2));
        assert_eq!(c.edge(shared), Color::Blue);
        for cl in &classes {
            assert_eq!(disk_pair_induction(&m, &c, cl).unwrap(), disk_pair_region_grow(&m, &c, cl).unwrap());
        }
        let ex = excise(&f.x, &m).unwrap();
        assert_eq!(ex.pairs.len(), 2);
        assert!(validate_excision(&f.x, &m, &ex.pairs).passed());
    }

    #[test]
    fn blue_rows_give_the_whole_interior() {
        let f = Fixture::new();
        let s = Strip::new(6, 4);
        let mut m = StripMap::constant(s.clone(), f.one());
        m.set(s.vertex(3, 2), f.above_one(f.p, 1));
        let c = color(&f.x, &m, f.p).unwrap();
        let cl = &red_classes(&m, &c)[0];
        let pair = disk_pair_induction(&m, &c, cl).unwrap();
        assert!(pair.full_interior);
        assert_eq!(pair.triangles.len(), s.triangle_count());
        assert_eq!(pair, disk_pair_region_grow(&m, &c, cl).unwrap());
    }

    /// Red `⟨b⟩` vertex at the centre, surrounded by a ring of red `⟨a⟩` vertices.
    fn nested_map(f: &Fixture) -> (StripMap, StripVertex) {
        let mut m = f.base_map(10, 8);
        let s = m.strip.clone();
        let centre = s.vertex(5, 4);
        m.set(centre, f.above_one(f.q, 1));
        for w in s.neighbors(centre).into_iter().flat_map(|n| s.neighbors(n)) {
            if w != centre && !s.neighbors(centre).contains(&w) {
                m.set(w, f.above_one(f.p, 1));
            }
        }
        m.validate(&f.x).unwrap();
        (m, centre)
    }

    #[test]
    fn outer_ring_encloses_the_inner_class() {
        let f = Fixture::new();
        let (m, centre) = nested_map(&f);
        let cp = color(&f.x, &m, f.p).unwrap();
        let outer = red_classes(&m, &cp);
        assert_eq!(outer.len(), 1);
        let pair = disk_pair_induction(&m, &cp, &outer[0]).unwrap();
        assert_eq!(pair, disk_pair_region_grow(&m, &cp, &outer[0]).unwrap());
        let cq = color(&f.x, &m, f.q).unwrap();
        let inner = &red_classes(&m, &cq)[0];
        assert!(inner.iter().all(|t| pair.triangles.contains(t)));
        assert!(pair.interior_vertices(&m.strip).contains(&centre));
    }

    #[test]
    fn nested_pair_is_dropped() {
        let f = Fixture::new();
        let (m, _) = nested_map(&f);
        let ex = excise(&f.x, &m).unwrap();
        assert_eq!(ex.pairs.len(), 1);
        assert_eq!(ex.pairs[0].coset, f.p);
        assert_eq!(ex.nested.len(), 1);
        assert_eq!(ex.nested[0].coset, f.q);
        assert!(validate_excision(&f.x, &m, &ex.pairs).passed());
    }

    #[test]
    fn one_blob_per_coset() {
        let f = Fixture::new();
        let mut m = f.base_map(9, 4);
        let s = m.strip.clone();
        m.set(s.vertex(2, 2), f.above_one(f.p, 1));
        m.set(s.vertex(6, 2), f.above_one(f.q, 1));
        let ex = excise(&f.x, &m).unwrap();
        let cosets: Vec<usize> = ex.pairs.iter().map(|p| p.coset).collect();
        assert_eq!(cosets, vec![f.p, f.q]);
        assert!(validate_excision(&f.x, &m, &ex.pairs).passed());
    }

    fn star_pair(f: &Fixture, m: &StripMap, v: StripVertex) -> DiskPair {
        let tris = star(&m.strip, v);
        DiskPair {
            coset: f.p,
            class_root: *tris.iter().next().unwrap(),
            boundary: edge_cycle(&boundary_edges(&m.strip, &tris)).unwrap(),
            triangles: tris,
            truncated: false,
            full_interior: false,
        }
    }

    #[test]
    fn crossing_boundaries_are_reported() {
        let f = Fixture::new();
        let m = f.base_map(6, 4);
        let s = &m.strip;
        let pairs = [star_pair(&f, &m, s.vertex(2, 2)), star_pair(&f, &m, s.vertex(3, 2))];
        let r = validate_excision(&f.x, &m, &pairs);
        assert!(r.violations.iter().any(|v| v.contains("crossing at edge")), "{:?}", r.violations);
    }

    #[test]
    fn green_boundary_is_reported() {
        let f = Fixture::new();
        let m = f.base_map(6, 4);
        let pairs = [star_pair(&f, &m, m.strip.vertex(1, 1))];
        let r = validate_excision(&f.x, &m, &pairs);
        assert!(r.violations.iter().any(|v| v.contains("non-blue boundary")), "{:?}", r.violations);
    }

    #[test]
    fn random_blobs_agree_across_methods() {
        let f = Fixture::new();
        let params = StripMapParams {
            width: 20,
            height: 4,
            steps: 4000,
            seed: 4,
            descend: 0.5,
        };
        let m = random_strip_map(&f.x, &params);
        m.validate(&f.x).unwrap();
        let mut seen = 0;
        for c in colorings(&f.x, &m).unwrap() {
            for cl in red_classes(&m, &c) {
                let a = disk_pair_induction(&m, &c, &cl).unwrap();
                assert_eq!(a, disk_pair_region_grow(&m, &c, &cl).unwrap());
                assert!(cl.iter().all(|t| a.triangles.contains(t)));
                seen += 1;
            }
        }
        assert!(seen >= 3, "only {seen} classes");
        assert!(validate_excision(&f.x, &m, &excise(&f.x, &m).unwrap().pairs).passed());
    }

    #[test]
    fn generator_is_deterministic() {
        let f = Fixture::new();
        let p = StripMapParams {
            width: 8,
            height: 3,
            steps: 500,
            seed: 3,
            descend: 0.5,
        };
        assert_eq!(random_strip_map(&f.x, &p), random_strip_map(&f.x, &p));
    }
}
