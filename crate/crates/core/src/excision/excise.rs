use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cusped::CuspedComplex;

use super::color::{color, red_classes, Color, Coloring, StripMap};
use super::disk::{disk_pair_induction, DiskPair};
use super::strip::StripEdge;
use super::ExcisionError;

/// Cosets whose horoball receives some strip vertex.
pub fn red_cosets(x: &CuspedComplex, m: &StripMap) -> Vec<usize> {
    let set: BTreeSet<usize> = m.images.iter().filter_map(|&v| x.horoball_of(v)).collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetClasses {
    pub coset: usize,
    pub classes: Vec<Vec<super::strip::TriangleId>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Excision {
    /// The selected pairs, ordered by the first column they meet.
    pub pairs: Vec<DiskPair>,
    /// Pairs dropped because another selected pair contains them.
    pub nested: Vec<DiskPair>,
    pub classes: Vec<CosetClasses>,
}

/// Colorings for every coset with a red vertex, in coset order.
pub fn colorings(x: &CuspedComplex, m: &StripMap) -> Result<Vec<Coloring>, ExcisionError> {
    red_cosets(x, m).into_par_iter().map(|i| color(x, m, i)).collect()
}

/// Cuts out the red part of the strip for all cosets at once.
///
/// One disk pair per red class, found by [`disk_pair_induction`]; a coset without a green
/// row vertex contributes the single full-interior pair. Pairs are ordered by the first
/// column they meet (then coset, then least boundary edge), and a pair contained in an
/// earlier-listed or later-listed pair is dropped.
pub fn excise(x: &CuspedComplex, m: &StripMap) -> Result<Excision, ExcisionError> {
    m.validate(x)?;
    let cols = colorings(x, m)?;
    let per_coset: Vec<(CosetClasses, Vec<DiskPair>)> = cols
        .par_iter()
        .map(|c| {
            let classes = red_classes(m, c);
            let mut pairs: Vec<DiskPair> = classes
                .par_iter()
                .map(|cl| disk_pair_induction(m, c, cl))
                .collect::<Result<_, _>>()?;
            if pairs.iter().any(|p| p.full_interior) {
                pairs.truncate(1);
            }
            Ok((
                CosetClasses {
                    coset: c.coset,
                    classes,
                },
                pairs,
            ))
        })
        .collect::<Result<_, ExcisionError>>()?;
    let mut classes = Vec::new();
    let mut all = Vec::new();
    for (c, p) in per_coset {
        classes.push(c);
        all.extend(p);
    }
    let key = |p: &DiskPair| (p.first_column(&m.strip), p.coset, p.boundary_edges().first().copied());
    all.sort_by_key(key);

    // Stage by stage, drop pairs inside another pair met by the same columns.
    let mut kept: Vec<DiskPair> = Vec::new();
    let mut nested = Vec::new();
    let mut by_stage: BTreeMap<usize, Vec<DiskPair>> = BTreeMap::new();
    for p in all {
        by_stage.entry(p.first_column(&m.strip)).or_default().push(p);
    }
    for (_, stage) in by_stage {
        kept.extend(stage);
        let snapshot = kept.clone();
        let mut next = Vec::new();
        for (k, p) in snapshot.iter().enumerate() {
            let inside = snapshot.iter().enumerate().any(|(j, q)| {
                j != k && p.triangles.is_subset(&q.triangles) && (p.triangles != q.triangles || j < k)
            });
            if inside {
                nested.push(p.clone());
            } else {
                next.push(p.clone());
            }
        }
        kept = next;
    }
    Ok(Excision {
        pairs: kept,
        nested,
        classes,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ExcisionReport {
    pub violations: Vec<String>,
}

impl ExcisionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks excision output: each boundary is an embedded loop around its disk and is blue
/// for its coset (ends excepted on truncated pairs); the strip outside every `E` maps into
/// Y; the `E` are pairwise disjoint; boundaries never cross; any two disks are nested or
/// disjoint; no edge lies on more than two boundaries.
pub fn validate_excision(x: &CuspedComplex, m: &StripMap, pairs: &[DiskPair]) -> ExcisionReport {
    let s = &m.strip;
    let mut v = Vec::new();
    let mut cols: BTreeMap<usize, Coloring> = BTreeMap::new();
    for (k, p) in pairs.iter().enumerate() {
        let edges = p.boundary_edges();
        if super::strip::edge_cycle(&edges).map(|c| c.len()) != Some(p.boundary.len())
            || edges != super::strip::boundary_edges(s, &p.triangles)
        {
            v.push(format!("pair {k}: boundary is not an embedded loop around its disk"));
        }
        let c = match cols.get(&p.coset) {
            Some(c) => c,
            None => match color(x, m, p.coset) {
                Ok(c) => cols.entry(p.coset).or_insert(c),
                Err(e) => {
                    v.push(format!("pair {k}: {e}"));
                    continue;
                }
            },
        };
        for &e in &edges {
            let end_ok = p.truncated && s.is_end_edge(e);
            if c.edge(e) != Color::Blue && !end_ok {
                v.push(format!("pair {k}: non-blue boundary at edge {}", show(m, e)));
            }
        }
    }
    // A truncated pair also owns the cut arc along the strip end.
    let mut inside: BTreeSet<_> = pairs.iter().flat_map(|p| p.interior_vertices(s)).collect();
    for p in pairs.iter().filter(|p| p.truncated) {
        for e in p.boundary_edges() {
            if s.is_end_edge(e) {
                inside.extend([e.0, e.1]);
            }
        }
    }
    for w in s.vertices() {
        if !inside.contains(&w) && !x.is_y_vertex(m.image(w)) {
            let (i, j) = s.coords(w);
            v.push(format!("vertex ({i},{j}) outside every E maps outside Y"));
        }
    }
    let mut on_boundary: BTreeMap<StripEdge, usize> = BTreeMap::new();
    for p in pairs {
        for e in p.boundary_edges() {
            *on_boundary.entry(e).or_default() += 1;
        }
    }
    for (e, n) in on_boundary {
        if n > 2 {
            v.push(format!("edge {} lies on {n} boundaries", show(m, e)));
        }
    }
    for j in 0..pairs.len() {
        for k in 0..pairs.len() {
            if j == k {
                continue;
            }
            let (a, b) = (&pairs[j], &pairs[k]);
            if j < k {
                if !a.triangles.is_disjoint(&b.triangles) {
                    v.push(format!("pairs {j} and {k} overlap"));
                }
                let nested = a.triangles.is_subset(&b.triangles) || b.triangles.is_subset(&a.triangles);
                if !nested && !a.triangles.is_disjoint(&b.triangles) {
                    v.push(format!("pairs {j} and {k} are neither nested nor disjoint"));
                }
            }
            // Boundary of a with an edge inside E_b and another outside the closed disk b.
            let inner = b.interior_edges(s);
            let b_edges: BTreeSet<StripEdge> = b.triangles.iter().flat_map(|&t| s.triangle_edges(t)).collect();
            let a_edges = a.boundary_edges();
            let inside_edge = a_edges.iter().find(|e| inner.contains(e));
            let outside = a_edges.iter().any(|e| !b_edges.contains(e));
            if let (Some(&e), true) = (inside_edge, outside) {
                v.push(format!("boundaries {j} and {k}: crossing at edge {}", show(m, e)));
            }
        }
    }
    ExcisionReport { violations: v }
}

fn show(m: &StripMap, e: StripEdge) -> String {
    format!("{:?}-{:?}", m.strip.coords(e.0), m.strip.coords(e.1))
}
