use std::cmp::Reverse;

use crate::complex::{Complex2, EdgeKind, FaceId, FaceKind, VertexId, VertexKind};
use crate::path::EdgePath;
use crate::presentation::Letter;

use super::certificate::{complement, CertificateBuilder, HomotopyCertificate};
use super::HomotopyError;

pub const DEFAULT_BUDGET: usize = 10_000;

/// Generator letter read when crossing `e` from `from`.
fn letter(c: &Complex2, e: crate::complex::EdgeId, from: VertexId) -> Letter {
    let edge = c.edge(e);
    match edge.kind {
        EdgeKind::Cayley { generator } if edge.endpoints[0] == from => Letter::gen(generator),
        EdgeKind::Cayley { generator } => Letter::gen(generator).inv(),
        _ => Letter::gen(usize::MAX),
    }
}

fn labels(c: &Complex2, p: &EdgePath) -> Vec<Letter> {
    p.edges.iter().zip(&p.vertices).map(|(&e, &v)| letter(c, e, v)).collect()
}

struct RelatorMove {
    start: usize,
    run: usize,
    face: FaceId,
    gain: isize,
}

/// Best relator move on the closed loop `p`: the longest boundary arc of a relator face
/// that the loop follows, if it covers more than half the face (or exactly half, when
/// the other half reads lexicographically smaller). Arcs may wrap past the basepoint.
fn best_move(c: &Complex2, p: &EdgePath) -> Option<RelatorMove> {
    let len = p.len();
    let mut best: Option<RelatorMove> = None;
    let mut consider = |m: RelatorMove| {
        let better = match &best {
            None => true,
            Some(b) => (m.gain, Reverse(m.start)) > (b.gain, Reverse(b.start)),
        };
        if better {
            best = Some(m);
        }
    };
    for s in 0..len {
        for &f in c.edge_faces(p.edges[s]) {
            let face = c.face(f);
            if !matches!(face.kind, FaceKind::Relator { .. }) {
                continue;
            }
            let n = face.boundary.len();
            let rev_edges: Vec<_> = face.boundary.iter().rev().copied().collect();
            let rev_verts: Vec<_> = (0..n).map(|i| face.vertices[(n - i) % n]).collect();
            for (fe, fv) in [(&face.boundary, &face.vertices), (&rev_edges, &rev_verts)] {
                for r in 0..n {
                    if fe[r] != p.edges[s] || fv[r] != p.vertices[s] {
                        continue;
                    }
                    let mut run = 1;
                    while run < n
                        && run < len
                        && fe[(r + run) % n] == p.edges[(s + run) % len]
                        && fv[(r + run) % n] == p.vertices[(s + run) % len]
                    {
                        run += 1;
                    }
                    let gain = 2 * run as isize - n as isize;
                    if gain < 0 {
                        continue;
                    }
                    if gain == 0 {
                        // Half-swap only towards a smaller word.
                        let arc: Vec<_> = (0..run).map(|i| p.edges[(s + i) % len]).collect();
                        let mut arc_path = EdgePath::point(p.vertices[s]);
                        for e in arc {
                            if arc_path.push(c, e).is_err() {
                                break;
                            }
                        }
                        let Some(other) = complement(c, f, &arc_path) else {
                            continue;
                        };
                        if labels(c, &other) >= labels(c, &arc_path) {
                            continue;
                        }
                    }
                    consider(RelatorMove {
                        start: s,
                        run,
                        face: f,
                        gain,
                    });
                }
            }
        }
    }
    best
}

/// Contracts the closed sub-path `[off, off+len]` with relator faces and backtracks.
fn contract_range(b: &mut CertificateBuilder<'_>, off: usize, len: usize, budget: &mut usize, limit: usize) -> Result<(), HomotopyError> {
    let mut len = b.free_reduce_range(off, off + len)? - off;
    while len > 0 {
        if *budget == 0 {
            return Err(HomotopyError::BudgetExhausted { budget: limit });
        }
        *budget -= 1;
        let p = b.current();
        // A backtrack around the basepoint: contract inside it first.
        if len >= 2 && p.edges[off] == p.edges[off + len - 1] && p.vertices[off + 1] == p.vertices[off + len - 1] {
            contract_range(b, off + 1, len - 2, budget, limit)?;
            b.delete_backtrack(off)?;
            return Ok(());
        }
        let lp = p.slice(off, off + len);
        let m = best_move(b.complex(), &lp).ok_or(HomotopyError::Stuck { length: len })?;
        if m.start + m.run <= len {
            let before = b.current().len();
            b.face_cross(off + m.start, m.run, m.face)?;
            let after = b.current().len();
            len = b.free_reduce_range(off, off + len + after - before)? - off;
        } else {
            // Rotate the loop so the arc does not wrap: conjugate by its first edges.
            let head = lp.slice(0, m.start);
            b.insert_whisker(off + len, &head)?;
            contract_range(b, off + m.start, len, budget, limit)?;
            b.free_reduce_range(off, off + 2 * m.start)?;
            return Ok(());
        }
    }
    Ok(())
}

/// Contracts a loop in the Cayley complex by a bounded search over relator faces.
///
/// Free reduction first, then any relator arc longer than half its face is replaced by the
/// shorter side, and half arcs are swapped towards the lexicographically smaller side.
/// Failure (budget spent or no move left) is inconclusive, not a proof of non-triviality.
pub fn contract_y_loop(c: &Complex2, lp: &EdgePath, budget: usize) -> Result<HomotopyCertificate, HomotopyError> {
    if !lp.is_closed() {
        return Err(HomotopyError::NotClosed);
    }
    for &v in &lp.vertices {
        if !matches!(c.vertex(v).kind, VertexKind::Cayley { .. }) {
            return Err(HomotopyError::NotInY(v));
        }
    }
    for (i, &e) in lp.edges.iter().enumerate() {
        if !matches!(c.edge(e).kind, EdgeKind::Cayley { .. }) {
            return Err(HomotopyError::NotInY(lp.vertices[i]));
        }
    }
    let mut b = CertificateBuilder::new(c, lp.clone());
    let mut left = budget;
    contract_range(&mut b, 0, lp.len(), &mut left, budget)?;
    b.free_reduce()?;
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusped::{build_cusped_space, CuspedComplex, ResourceCaps};
    use crate::homotopy::verify_certificate;
    use crate::presentation::{parse_presentation, Word};

    fn build(text: &str, r: u32) -> CuspedComplex {
        build_cusped_space(&parse_presentation(text).unwrap(), r, 0, &ResourceCaps::default()).unwrap()
    }

    /// Loop reading `word` from the identity.
    fn word_loop(x: &CuspedComplex, word: &str) -> EdgePath {
        let w: Word = x.presentation.parse_word(word).unwrap();
        let mut v = x.basepoint();
        let mut vs = vec![v];
        for &l in w.letters() {
            v = x.multiply(v, l).unwrap();
            vs.push(v);
        }
        EdgePath::from_vertices(&x.complex, &vs).unwrap()
    }

    #[test]
    fn backtrack_is_one_deletion() {
        let x = build("gens a,b; rels [a,b]", 2);
        let lp = word_loop(&x, "a a'");
        let cert = contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.moves.len(), 1);
    }

    #[test]
    fn relator_boundary_crosses_one_face() {
        let x = build("gens a,b; rels [a,b]", 2);
        let lp = word_loop(&x, "a b a' b'");
        let cert = contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap();
        assert!(verify_certificate(&x.complex, &cert, None).valid);
        assert_eq!(cert.faces().count(), 1);
        assert!(cert.end.is_empty());
    }

    #[test]
    fn larger_commutator_loop() {
        let x = build("gens a,b; rels [a,b]", 4);
        let lp = word_loop(&x, "a a b a' a' b'");
        let cert = contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap();
        assert!(verify_certificate(&x.complex, &cert, None).valid);
        assert_eq!(cert.faces().count(), 2);
    }

    #[test]
    fn wrapping_arcs_are_rotated() {
        let x = build("gens a,b; rels [a,b]", 3);
        // Cyclic rotation of a commutator: b a' b' a.
        let lp = word_loop(&x, "b a' b' a");
        let cert = contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap();
        assert!(verify_certificate(&x.complex, &cert, None).valid);
        assert!(cert.end.is_empty());
    }

    #[test]
    fn surface_relator() {
        let x = build("gens a,b,c,d; rels [a,b][c,d]; group [surface(2)]", 4);
        let lp = word_loop(&x, "c d c' d' a b a' b'");
        let cert = contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap();
        assert!(verify_certificate(&x.complex, &cert, None).valid);
    }

    #[test]
    fn free_group_has_nothing_to_cross() {
        let x = build("gens a,b; rels", 3);
        let lp = word_loop(&x, "a b b' a'");
        assert!(contract_y_loop(&x.complex, &lp, DEFAULT_BUDGET).unwrap().end.is_empty());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let x = build("gens a,b; rels [a,b]", 4);
        let lp = word_loop(&x, "a a b a' a' b'");
        assert!(matches!(
            contract_y_loop(&x.complex, &lp, 1),
            Err(HomotopyError::BudgetExhausted { budget: 1 })
        ));
    }
}
