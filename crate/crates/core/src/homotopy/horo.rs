use serde::Serialize;

use crate::complex::{Complex2, EdgeId, FaceId, FaceKind, VertexId};
use crate::horoball::{pow2, Horoball};
use crate::path::EdgePath;

use super::certificate::{CertificateBuilder, HomotopyCertificate, RadiusBound};
use super::HomotopyError;

pub(crate) fn find_face(c: &Complex2, edges: &[EdgeId], kind: FaceKind) -> Result<FaceId, HomotopyError> {
    c.faces_containing(edges, Some(kind))
        .first()
        .copied()
        .ok_or_else(|| HomotopyError::MissingFace(format!("{kind:?} through {edges:?}")))
}

fn level(h: &Horoball, v: VertexId) -> Result<(usize, u32), HomotopyError> {
    h.locate(v).ok_or(HomotopyError::NotInHoroball(v))
}

fn check_in_horoball(c: &Complex2, h: &Horoball, p: &EdgePath) -> Result<(), HomotopyError> {
    for &v in &p.vertices {
        level(h, v)?;
    }
    for (i, &e) in p.edges.iter().enumerate() {
        if !h.contains_edge(c, e) {
            return Err(HomotopyError::NotInHoroball(p.vertices[i]));
        }
    }
    Ok(())
}

/// Straight vertical path from `(i,from)` to `(i,to)`.
fn vertical_path(c: &Complex2, h: &Horoball, i: usize, from: u32, to: u32) -> EdgePath {
    let vs: Vec<VertexId> = if from <= to {
        (from..=to).map(|k| h.vertex(i, k)).collect()
    } else {
        (to..=from).rev().map(|k| h.vertex(i, k)).collect()
    };
    EdgePath::from_vertices(c, &vs).expect("vertical neighbours are adjacent")
}

/// Vertical square with `vertical` and `horizontal` on its boundary.
fn square(c: &Complex2, vertical: EdgeId, horizontal: EdgeId) -> Result<FaceId, HomotopyError> {
    find_face(c, &[vertical, horizontal], FaceKind::VerticalSquare)
}

/// Slides the closed sub-path at `off` (length `len`, based at its top level) up to a
/// single level with vertical squares. Returns the new length.
fn slide_range(b: &mut CertificateBuilder<'_>, h: &Horoball, off: usize, mut len: usize) -> Result<usize, HomotopyError> {
    let c = b.complex();
    loop {
        let p = b.current();
        let levels: Vec<u32> = p.vertices[off..=off + len]
            .iter()
            .map(|&v| level(h, v).map(|x| x.1))
            .collect::<Result<_, _>>()?;
        let top = levels[0];
        let low = *levels.iter().min().expect("non-empty");
        if low == top {
            return Ok(len);
        }
        let s = levels.iter().position(|&k| k == low).expect("minimum occurs");
        let t = s + levels[s..].iter().position(|&k| k != low).expect("run ends below the top") - 1;
        // Cross one square per horizontal edge of the run, keeping the down edge in front.
        let mut pos = off + s - 1;
        for _ in s..t {
            let p = b.current();
            let f = square(c, p.edges[pos], p.edges[pos + 1])?;
            b.face_cross(pos, 2, f)?;
            pos += 1;
        }
        b.delete_backtrack(pos)?;
        len -= 2;
    }
}

/// Result of [`slide_loop_up`]: the certificate ends at `whisker · top · whisker⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct SlideResult {
    pub certificate: HomotopyCertificate,
    /// Vertical path from the loop's start up to the top level.
    pub whisker: EdgePath,
    /// The loop at the highest level reached by the input.
    pub top: EdgePath,
    pub level: u32,
}

/// Inserts vertical whiskers so the loop becomes based at its top level; returns the whisker.
fn lift_basepoint(b: &mut CertificateBuilder<'_>, h: &Horoball) -> Result<(EdgePath, u32), HomotopyError> {
    let c = b.complex();
    let p = b.current().clone();
    let levels: Vec<u32> = p.vertices.iter().map(|&v| level(h, v).map(|x| x.1)).collect::<Result<_, _>>()?;
    let top = *levels.iter().max().expect("non-empty");
    let (i0, k0) = level(h, p.start())?;
    let w = vertical_path(c, h, i0, k0, top);
    b.insert_whisker(0, &w)?;
    let n = b.current().len();
    b.insert_whisker(n, &w)?;
    Ok((w, top))
}

/// Slides a loop in one horoball up to its highest level using vertical squares only.
pub fn slide_loop_up(c: &Complex2, h: &Horoball, lp: &EdgePath) -> Result<SlideResult, HomotopyError> {
    if !lp.is_closed() {
        return Err(HomotopyError::NotClosed);
    }
    check_in_horoball(c, h, lp)?;
    let mut b = CertificateBuilder::new(c, lp.clone());
    let (w, top) = lift_basepoint(&mut b, h)?;
    let inner = lp.len() + 2 * w.len();
    let len = slide_range(&mut b, h, w.len(), inner)?;
    let tau = b.current().slice(w.len(), w.len() + len);
    Ok(SlideResult {
        certificate: b.finish(),
        whisker: w,
        top: tau,
        level: top,
    })
}

/// Halves the horizontal loop at `off` (length `len`, level `k`) one level up.
/// Afterwards the range reads `v · τ' · v⁻¹` with `v` vertical; returns `(off + 1, |τ'|)`.
fn halve_range(b: &mut CertificateBuilder<'_>, h: &Horoball, off: usize, len: usize, k: u32) -> Result<(usize, usize), HomotopyError> {
    let c = b.complex();
    if k + 1 > h.depth_cap {
        return Err(HomotopyError::DepthHeadroom {
            required: k + 1,
            cap: h.depth_cap,
        });
    }
    let (i0, _) = level(h, b.current().vertices[off])?;
    let v0 = h.vertical_edge(k, i0).expect("below the cap");
    b.insert_backtrack(off, v0)?;
    let mut q = off + 1;
    let mut remaining = len;
    while remaining >= 2 {
        let p = b.current();
        let (e1, e2) = (p.edges[q + 1], p.edges[q + 2]);
        let (a, _) = level(h, p.vertices[q + 1])?;
        let (z, _) = level(h, p.vertices[q + 3])?;
        let down_a = p.edges[q];
        remaining -= 2;
        if a == z && e1 == e2 {
            b.delete_backtrack(q + 1)?;
            continue;
        }
        let chord = if a != z { h.horizontal_edge(k, a, z) } else { None };
        let tri = chord.and_then(|_| find_face(c, &[e1, e2], FaceKind::HorizontalTriangle).ok());
        if let Some(t) = tri {
            b.face_cross(q + 1, 2, t)?;
            let chord = b.current().edges[q + 1];
            b.face_cross(q, 2, square(c, down_a, chord)?)?;
            q += 1;
            continue;
        }
        if a != z && chord.is_none() {
            let down_z = h.vertical_edge(k, z).expect("below the cap");
            let f = find_face(c, &[e1, e2, down_a, down_z], FaceKind::VerticalPentagon)?;
            b.face_cross(q, 3, f)?;
            q += 1;
            continue;
        }
        // Parallel edges or a chord without a triangle: two squares.
        b.face_cross(q, 2, square(c, down_a, e1)?)?;
        q += 1;
        let down_m = b.current().edges[q];
        b.face_cross(q, 2, square(c, down_m, e2)?)?;
        q += 1;
    }
    if remaining == 1 {
        let p = b.current();
        let f = square(c, p.edges[q], p.edges[q + 1])?;
        b.face_cross(q, 2, f)?;
        q += 1;
    }
    Ok((off + 1, q - off - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct HalveResult {
    pub certificate: HomotopyCertificate,
    /// The new loop; one level up unless the input was already trivial or a triangle.
    pub loop_path: EdgePath,
    pub level: u32,
}

fn horizontal_level(h: &Horoball, p: &EdgePath) -> Result<u32, HomotopyError> {
    let k = level(h, p.start())?.1;
    for &v in &p.vertices {
        if level(h, v)?.1 != k {
            return Err(HomotopyError::NotHorizontal);
        }
    }
    Ok(k)
}

/// Replaces a horizontal loop at level `k` by one at level `k+1` of at most half the length plus one.
///
/// Edges are paired from the basepoint. A backtrack `(e, e⁻¹)` is returned unchanged and a
/// triangle boundary is contracted across its face.
pub fn halve_loop(c: &Complex2, h: &Horoball, tau: &EdgePath) -> Result<HalveResult, HomotopyError> {
    if !tau.is_closed() {
        return Err(HomotopyError::NotClosed);
    }
    check_in_horoball(c, h, tau)?;
    let k = horizontal_level(h, tau)?;
    let mut b = CertificateBuilder::new(c, tau.clone());
    if tau.is_empty() || (tau.len() == 2 && tau.edges[0] == tau.edges[1]) {
        return Ok(HalveResult {
            certificate: b.finish(),
            loop_path: tau.clone(),
            level: k,
        });
    }
    if tau.len() == 3 {
        if let Ok(f) = find_face(c, &tau.edges, FaceKind::HorizontalTriangle) {
            b.face_cross(0, 2, f)?;
            b.free_reduce()?;
            let end = b.current().clone();
            return Ok(HalveResult {
                certificate: b.finish(),
                loop_path: end,
                level: k,
            });
        }
    }
    let (at, len) = halve_range(&mut b, h, 0, tau.len(), k)?;
    let out = b.current().slice(at, at + len);
    Ok(HalveResult {
        certificate: b.finish(),
        loop_path: out,
        level: k + 1,
    })
}

/// Smallest `k` with `K < 2^k`.
pub fn log_bound(big_k: u64) -> u32 {
    let mut k = 0;
    while pow2(k) <= big_k {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, Serialize)]
pub struct HoroballContraction {
    pub certificate: HomotopyCertificate,
    /// `2K + k`.
    pub bound: u64,
    /// One entry per vertex of the loop.
    pub radius: Vec<RadiusBound>,
    /// Highest level the homotopy reaches.
    pub top_level: u32,
}

impl HoroballContraction {
    pub fn satisfied(&self) -> bool {
        self.radius.iter().all(|r| r.satisfied)
    }
}

/// Contracts `[off, off+len]` (closed, in `h`) to a point, leaving only backtracks behind.
/// Returns the highest level used.
pub(crate) fn contract_horoball_range(
    b: &mut CertificateBuilder<'_>,
    h: &Horoball,
    off: usize,
    len: usize,
) -> Result<u32, HomotopyError> {
    let c = b.complex();
    let outside = b.current().len() - len;
    let mut len = b.free_reduce_range(off, off + len)? - off;
    if len == 0 {
        return Ok(level(h, b.current().vertices[off])?.1);
    }
    // Lift the basepoint with a whisker, then slide.
    let levels: Vec<u32> = b.current().vertices[off..=off + len]
        .iter()
        .map(|&v| level(h, v).map(|x| x.1))
        .collect::<Result<_, _>>()?;
    let mut lvl = *levels.iter().max().expect("non-empty");
    let (i0, k0) = level(h, b.current().vertices[off])?;
    let w = vertical_path(c, h, i0, k0, lvl);
    b.insert_whisker(off + len, &w)?;
    b.insert_whisker(off, &w)?;
    let mut at = off + w.len();
    len = slide_range(b, h, at, len + 2 * w.len())?;
    len = b.free_reduce_range(at, at + len)? - at;
    while len > 0 {
        let p = b.current();
        if len == 3 {
            if let Ok(f) = find_face(c, &p.edges[at..at + 3], FaceKind::HorizontalTriangle) {
                b.face_cross(at, 2, f)?;
                len = b.free_reduce_range(at, at + 2)? - at;
                continue;
            }
        }
        let (a, l) = halve_range(b, h, at, len, lvl)?;
        lvl += 1;
        at = a;
        len = b.free_reduce_range(at, at + l)? - at;
    }
    let whiskers = b.current().len() - outside;
    b.free_reduce_range(off, off + whiskers)?;
    Ok(lvl)
}

/// Contracts a loop in one horoball: slide up, then halve until trivial.
///
/// The region is checked against `B(v, 2K+k)` for every loop vertex `v`, with `K = |γ|`
/// and `k` the smallest integer with `K < 2^k`. Needs about `k` levels above the loop.
pub fn contract_horoball_loop(c: &Complex2, h: &Horoball, lp: &EdgePath) -> Result<HoroballContraction, HomotopyError> {
    if !lp.is_closed() {
        return Err(HomotopyError::NotClosed);
    }
    check_in_horoball(c, h, lp)?;
    let mut b = CertificateBuilder::new(c, lp.clone());
    let top_level = contract_horoball_range(&mut b, h, 0, lp.len())?;
    b.free_reduce()?;
    let certificate = b.finish();
    debug_assert!(certificate.end.is_empty());
    let big_k = lp.len() as u64;
    let bound = 2 * big_k + log_bound(big_k) as u64;
    let radius = RadiusBound::for_path(c, &certificate, lp, bound);
    Ok(HoroballContraction {
        certificate,
        bound,
        radius,
        top_level,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PushResult {
    pub certificate: HomotopyCertificate,
    /// The level-0 path with the same endpoints.
    pub path: EdgePath,
}

/// Pushes the sub-path `[off, off+len]` down to level 0, top level first.
/// Returns the new length.
pub(crate) fn push_range(b: &mut CertificateBuilder<'_>, h: &Horoball, off: usize, mut len: usize) -> Result<usize, HomotopyError> {
    let c = b.complex();
    loop {
        let p = b.current();
        let levels: Vec<u32> = p.vertices[off..=off + len]
            .iter()
            .map(|&v| level(h, v).map(|x| x.1))
            .collect::<Result<_, _>>()?;
        let top = *levels.iter().max().expect("non-empty");
        if top == 0 {
            return Ok(len);
        }
        let s = levels.iter().position(|&k| k == top).expect("maximum occurs");
        let t = s + levels[s..].iter().position(|&k| k != top).expect("run ends above level 0") - 1;
        let lower = top - 1;
        let mut pos = off + s - 1;
        for _ in s..t {
            let p = b.current();
            let (up, across) = (p.edges[pos], p.edges[pos + 1]);
            let (a, _) = level(h, p.vertices[pos])?;
            let (x, _) = level(h, p.vertices[pos + 2])?;
            if h.horizontal_edge(lower, a, x).is_some() {
                b.face_cross(pos, 2, square(c, up, across)?)?;
                pos += 1;
            } else {
                let g = h.base.geodesic(a, x).ok_or(HomotopyError::MissingFace("base geodesic".into()))?;
                let mid = g[g.len() / 2];
                let lo1 = h.horizontal_edge(lower, a, mid);
                let lo2 = h.horizontal_edge(lower, mid, x);
                let (Some(lo1), Some(lo2)) = (lo1, lo2) else {
                    return Err(HomotopyError::MissingFace(format!("lower edges below {across}")));
                };
                let f = find_face(c, &[up, across, lo1, lo2], FaceKind::VerticalPentagon)?;
                b.face_cross(pos, 2, f)?;
                pos += 2;
                len += 1;
            }
        }
        b.delete_backtrack(pos)?;
        len -= 2;
    }
}

/// Pushes a horoball path with endpoints in Y down to level 0 using squares and pentagons.
pub fn push_horoball_path_to_y(c: &Complex2, h: &Horoball, beta: &EdgePath) -> Result<PushResult, HomotopyError> {
    check_in_horoball(c, h, beta)?;
    for v in [beta.start(), beta.end()] {
        if level(h, v)?.1 != 0 {
            return Err(HomotopyError::EndpointsNotInY);
        }
    }
    let mut b = CertificateBuilder::new(c, beta.clone());
    push_range(&mut b, h, 0, beta.len())?;
    let certificate = b.finish();
    let path = certificate.end.clone();
    Ok(PushResult { certificate, path })
}
