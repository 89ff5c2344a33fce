use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::color::{Color, Coloring, StripMap};
use super::strip::{boundary_edges, edge_cycle, Strip, StripEdge, StripVertex, TriangleId};
use super::ExcisionError;

/// A closed disk of strip triangles with its boundary loop. The open set `E` is the
/// interior of the disk; the loop is `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskPair {
    pub coset: usize,
    /// Least triangle of the class the pair was built for.
    pub class_root: TriangleId,
    pub triangles: BTreeSet<TriangleId>,
    /// Vertex cycle, canonically started and oriented.
    pub boundary: Vec<StripVertex>,
    /// The boundary runs along a strip end where the class may continue.
    pub truncated: bool,
    /// No green row vertex existed: `E` is the whole open strip.
    pub full_interior: bool,
}

impl DiskPair {
    pub fn boundary_edges(&self) -> Vec<StripEdge> {
        let n = self.boundary.len();
        let mut out: Vec<StripEdge> = (0..n)
            .map(|k| StripEdge::new(self.boundary[k], self.boundary[(k + 1) % n]))
            .collect();
        out.sort();
        out
    }

    /// Vertices of `E`: disk vertices off the boundary loop.
    pub fn interior_vertices(&self, strip: &Strip) -> BTreeSet<StripVertex> {
        let on: BTreeSet<StripVertex> = self.boundary.iter().copied().collect();
        self.triangles
            .iter()
            .flat_map(|&t| strip.triangle_vertices(t))
            .filter(|v| !on.contains(v))
            .collect()
    }

    /// Edges of `E`: both sides in the disk.
    pub fn interior_edges(&self, strip: &Strip) -> BTreeSet<StripEdge> {
        self.triangles
            .iter()
            .flat_map(|&t| strip.triangle_edges(t))
            .filter(|&e| strip.edge_triangles(e).iter().all(|t| self.triangles.contains(t)) && !strip.is_boundary_edge(e))
            .collect()
    }

    /// Leftmost column met by `E`.
    pub fn first_column(&self, strip: &Strip) -> usize {
        self.triangles.iter().map(|&t| strip.triangle_column(t)).min().unwrap_or(usize::MAX)
    }
}

/// Builds the pair for a closed disk given by its triangles.
fn pair_from_triangles(
    strip: &Strip,
    coloring: &Coloring,
    class_root: TriangleId,
    triangles: BTreeSet<TriangleId>,
    full_interior: bool,
) -> Result<DiskPair, ExcisionError> {
    let edges = boundary_edges(strip, &triangles);
    let boundary = edge_cycle(&edges).ok_or(ExcisionError::NotADisk { class_root })?;
    let truncated = edges.iter().any(|&e| coloring.edge(e) != Color::Blue);
    Ok(DiskPair {
        coset: coloring.coset,
        class_root,
        triangles,
        boundary,
        truncated,
        full_interior,
    })
}

fn check_class(m: &StripMap, coloring: &Coloring, class: &[TriangleId]) -> Result<TriangleId, ExcisionError> {
    let root = *class.iter().min().ok_or(ExcisionError::EmptyClass)?;
    if class.iter().any(|&t| t.0 >= m.strip.triangle_count() || coloring.triangle(t) != Color::Red) {
        return Err(ExcisionError::NotRed { class_root: root });
    }
    Ok(root)
}

/// Leftmost green vertex on the bottom row, else on the top row.
pub fn green_row_vertex(strip: &Strip, coloring: &Coloring) -> Option<StripVertex> {
    [0, strip.height]
        .into_iter()
        .flat_map(|j| (0..=strip.width).map(move |i| (i, j)))
        .map(|(i, j)| strip.vertex(i, j))
        .find(|&v| coloring.vertex(v) == Color::Green)
}

fn full_interior(strip: &Strip, coloring: &Coloring, root: TriangleId) -> Result<DiskPair, ExcisionError> {
    pair_from_triangles(strip, coloring, root, strip.triangles().collect(), true)
}

/// Disk pair for a red class by growing a disk one class triangle at a time.
///
/// A shortest triangle path from the leftmost green row vertex reaches the class across
/// a blue edge `e`. The loop starts as the link of the red vertex opposite `e` and
/// absorbs outside class triangles met along it, scanning forward from `e`: a triangle
/// whose apex is off the loop adds the apex; one sharing a neighbouring loop edge
/// short-cuts that corner; one whose apex already lies on the loop keeps the side
/// containing `e` and encloses the pocket.
pub fn disk_pair_induction(m: &StripMap, coloring: &Coloring, class: &[TriangleId]) -> Result<DiskPair, ExcisionError> {
    let s = &m.strip;
    let root = check_class(m, coloring, class)?;
    let in_class: BTreeSet<TriangleId> = class.iter().copied().collect();
    let Some(g) = green_row_vertex(s, coloring) else {
        return full_interior(s, coloring, root);
    };

    // Shortest triangle path from g's triangles to the class.
    let mut seen = vec![false; s.triangle_count()];
    let mut queue: VecDeque<TriangleId> = VecDeque::new();
    let mut seeds = s.triangles_at(g);
    seeds.sort();
    for t in seeds {
        seen[t.0] = true;
        queue.push_back(t);
    }
    let mut entry = None;
    'bfs: while let Some(u) = queue.pop_front() {
        for (w, shared) in s.adjacent_triangles(u) {
            if seen[w.0] {
                continue;
            }
            seen[w.0] = true;
            if in_class.contains(&w) {
                entry = Some((w, shared));
                break 'bfs;
            }
            queue.push_back(w);
        }
    }
    let (first, e) = entry.ok_or(ExcisionError::Unreachable { class_root: root })?;
    if coloring.edge(e) != Color::Blue {
        return Err(ExcisionError::InductionFailed {
            class_root: root,
            detail: "entry edge is not blue".into(),
        });
    }
    let v = s
        .triangle_vertices(first)
        .into_iter()
        .find(|&w| !e.touches(w))
        .expect("triangle has a vertex off each edge");
    let star: BTreeSet<TriangleId> = s.triangles_at(v).into_iter().collect();
    if !star.is_subset(&in_class) {
        return Err(ExcisionError::InductionFailed {
            class_root: root,
            detail: "star of the entry vertex leaves the class".into(),
        });
    }
    let mut alpha = edge_cycle(&boundary_edges(s, &star)).ok_or(ExcisionError::NotADisk { class_root: root })?;
    let mut disk = star;

    loop {
        let n = alpha.len();
        let edge_at = |a: &[StripVertex], k: usize| StripEdge::new(a[k % a.len()], a[(k + 1) % a.len()]);
        let start = (0..n).find(|&k| edge_at(&alpha, k) == e).ok_or(ExcisionError::InductionFailed {
            class_root: root,
            detail: "entry edge left the loop".into(),
        })?;
        let mut step = None;
        for off in 0..n {
            let p = (start + off) % n;
            let b = edge_at(&alpha, p);
            if let Some(t) = s
                .edge_triangles(b)
                .into_iter()
                .find(|t| !disk.contains(t) && in_class.contains(t))
            {
                step = Some((p, t));
                break;
            }
        }
        let Some((p, tri)) = step else { break };
        let (bs, be) = (alpha[p], alpha[(p + 1) % n]);
        let apex = s
            .triangle_vertices(tri)
            .into_iter()
            .find(|&w| w != bs && w != be)
            .expect("third vertex");
        let before = alpha[(p + n - 1) % n];
        let after = alpha[(p + 2) % n];
        let next: Vec<StripVertex> = match alpha.iter().position(|&w| w == apex) {
            None => {
                let mut a = alpha.clone();
                a.insert(p + 1, apex);
                a
            }
            Some(_) if before == apex => alpha.iter().copied().filter(|&w| w != bs).collect(),
            Some(_) if after == apex => alpha.iter().copied().filter(|&w| w != be).collect(),
            Some(q) => {
                // τ₁ runs from b's start through b to the apex, τ₂ from the apex back.
                let tau2: Vec<StripVertex> = (0..)
                    .map(|k| alpha[(q + k) % n])
                    .take((p + n - q) % n + 1)
                    .collect();
                let on_tau2 = (0..tau2.len() - 1).any(|k| StripEdge::new(tau2[k], tau2[k + 1]) == e);
                if !on_tau2 {
                    return Err(ExcisionError::AmbiguousSplit { class_root: root });
                }
                tau2
            }
        };
        let grown: BTreeSet<TriangleId> = s.triangles().filter(|&t| s.encloses(&next, t)).collect();
        if !grown.is_superset(&disk) || !grown.contains(&tri) {
            return Err(ExcisionError::InductionFailed {
                class_root: root,
                detail: "new loop does not enclose the old disk".into(),
            });
        }
        alpha = next;
        disk = grown;
    }

    let pair = pair_from_triangles(s, coloring, root, disk, false)?;
    let mut loop_edges: Vec<StripEdge> = (0..alpha.len())
        .map(|k| StripEdge::new(alpha[k], alpha[(k + 1) % alpha.len()]))
        .collect();
    loop_edges.sort();
    if loop_edges != pair.boundary_edges() {
        return Err(ExcisionError::InductionFailed {
            class_root: root,
            detail: "loop is not the boundary of the enclosed triangles".into(),
        });
    }
    Ok(pair)
}

/// Disk pair for a red class as the strip minus everything reachable from the strip's
/// boundary without touching the class's closed triangles.
pub fn disk_pair_region_grow(m: &StripMap, coloring: &Coloring, class: &[TriangleId]) -> Result<DiskPair, ExcisionError> {
    let s = &m.strip;
    let root = check_class(m, coloring, class)?;
    if green_row_vertex(s, coloring).is_none() {
        return full_interior(s, coloring, root);
    }
    let in_class: BTreeSet<TriangleId> = class.iter().copied().collect();
    let closed_edges: BTreeSet<StripEdge> = class.iter().flat_map(|&t| s.triangle_edges(t)).collect();
    let closed_vertices: BTreeSet<StripVertex> = class.iter().flat_map(|&t| s.triangle_vertices(t)).collect();

    let touches_outside = |t: TriangleId| {
        s.triangle_vertices(t)
            .into_iter()
            .any(|v| s.on_boundary(v) && !closed_vertices.contains(&v))
            || s
                .triangle_edges(t)
                .into_iter()
                .any(|e| s.is_boundary_edge(e) && !closed_edges.contains(&e))
    };
    let mut outer = vec![false; s.triangle_count()];
    let mut stack: Vec<TriangleId> = s
        .triangles()
        .filter(|t| !in_class.contains(t) && touches_outside(*t))
        .collect();
    for t in &stack {
        outer[t.0] = true;
    }
    while let Some(u) = stack.pop() {
        for (w, shared) in s.adjacent_triangles(u) {
            if !outer[w.0] && !in_class.contains(&w) && !closed_edges.contains(&shared) {
                outer[w.0] = true;
                stack.push(w);
            }
        }
    }
    let disk: BTreeSet<TriangleId> = s.triangles().filter(|t| !outer[t.0]).collect();
    pair_from_triangles(s, coloring, root, disk, false)
}
