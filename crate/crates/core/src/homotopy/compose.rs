use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Complex2, VertexId, VertexKind};
use crate::horoball::Horoball;
use crate::metric::bfs_geodesic;
use crate::path::EdgePath;

use super::cayley::contract_y_loop;
use super::certificate::{CertificateBuilder, HomotopyCertificate, RadiusBound};
use super::horo::{contract_horoball_loop, log_bound, push_horoball_path_to_y};
use super::HomotopyError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageKind {
    /// Vertical whisker moving the basepoint down to level 0.
    Whisker,
    PushDown { excursion: usize },
    ContractY,
    ContractHoroball { coset: usize },
    Unwhisker,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub kind: StageKind,
    pub certificate: HomotopyCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopContraction {
    pub certificate: HomotopyCertificate,
    pub stages: Vec<Stage>,
    /// `N(K)` from the measured radii below.
    pub bound: u64,
    pub radius: Vec<RadiusBound>,
    /// Largest radius of a push-down homotopy seen from its own path.
    pub pushdown_radius: u32,
    /// Largest radius of the Y contraction seen from its own loop.
    pub y_radius: u32,
}

impl LoopContraction {
    pub fn satisfied(&self) -> bool {
        self.radius.iter().all(|r| r.satisfied)
    }

    /// Whether the certificate is exactly the stages run one after another.
    pub fn is_composed_of_stages(&self) -> bool {
        let mut path = self.certificate.start.clone();
        let mut moves = Vec::new();
        for s in &self.stages {
            if s.certificate.start != path {
                return false;
            }
            path = s.certificate.end.clone();
            moves.extend(s.certificate.moves.iter().cloned());
        }
        path == self.certificate.end && moves == self.certificate.moves
    }
}

/// Measured ingredients of the composed bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MeasuredRadii {
    pub pushdown: u64,
    pub y_loop: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionBounds {
    pub loop_length: u64,
    /// Smallest `k` with `K < 2^k`.
    pub log2: u32,
    /// `2K + k`.
    pub horoball: u64,
    /// `max(N₂ + N₁ + K, 2K + k)`.
    pub composed: u64,
    /// `7K + 3`, the loop length covered by the small-loop constant.
    pub small_loop_length: u64,
    /// The composed bound at `7K + 3`.
    pub small_loop: u64,
}

fn composed(k: u64, m: MeasuredRadii) -> (u32, u64, u64) {
    let lg = log_bound(k);
    let horo = 2 * k + lg as u64;
    (lg, horo, (m.y_loop + m.pushdown + k).max(horo))
}

/// Radius bounds for loops of length `K`, given measured push-down and Y radii.
pub fn contraction_radius_bound(k: u64, measured: MeasuredRadii) -> ContractionBounds {
    let (log2, horoball, composed_bound) = composed(k, measured);
    let small = 7 * k + 3;
    ContractionBounds {
        loop_length: k,
        log2,
        horoball,
        composed: composed_bound,
        small_loop_length: small,
        small_loop: composed(small, measured).2,
    }
}

fn in_y(c: &Complex2, v: VertexId) -> bool {
    matches!(c.vertex(v).kind, VertexKind::Cayley { .. })
}

fn horoball_of<'h>(c: &Complex2, horoballs: &'h [Horoball], v: VertexId) -> Option<&'h Horoball> {
    match c.vertex(v).kind {
        VertexKind::Horo { .. } => horoballs.iter().find(|h| h.contains(v)),
        _ => None,
    }
}

fn stage<T>(name: &str, r: Result<T, HomotopyError>) -> Result<T, HomotopyError> {
    r.map_err(|e| HomotopyError::Stage {
        stage: name.to_string(),
        source: Box::new(e),
    })
}

fn max_radius(c: &Complex2, cert: &HomotopyCertificate, from: &EdgePath) -> u32 {
    from.vertices.iter().map(|&v| cert.radius_from(c, v)).max().unwrap_or(0)
}

/// Contracts a loop in the cusped space.
///
/// Loops inside Y or inside one horoball go straight to the matching routine. Otherwise
/// each horoball excursion is pushed down to Y and the resulting Y loop is contracted.
/// The radius bound is `max(N₂ + N₁ + K, 2K + k)` with `N₁`, `N₂` the radii measured on
/// this loop's own push-downs and Y contraction.
pub fn contract_loop(c: &Complex2, horoballs: &[Horoball], lp: &EdgePath, budget: usize) -> Result<LoopContraction, HomotopyError> {
    if !lp.is_closed() {
        return Err(HomotopyError::NotClosed);
    }
    let whole_y = lp.vertices.iter().all(|&v| in_y(c, v));
    if whole_y {
        if let Ok(cert) = contract_y_loop(c, lp, budget) {
            let y_radius = max_radius(c, &cert, lp);
            return Ok(finish(c, lp, vec![(StageKind::ContractY, cert)], 0, y_radius));
        }
    }
    if let Some(h) = horoballs.iter().find(|h| lp.edges.iter().all(|&e| h.contains_edge(c, e))) {
        if !lp.is_empty() {
            let r = stage("contract-horoball", contract_horoball_loop(c, h, lp))?;
            let stages = vec![Stage {
                kind: StageKind::ContractHoroball { coset: h.coset },
                certificate: r.certificate.clone(),
            }];
            return Ok(LoopContraction {
                certificate: r.certificate,
                stages,
                bound: r.bound,
                radius: r.radius,
                pushdown_radius: 0,
                y_radius: 0,
            });
        }
    }
    if whole_y {
        // Y loop the relator search could not finish; report that failure.
        stage("contract-y", contract_y_loop(c, lp, budget))?;
    }

    let mut stages: Vec<(StageKind, HomotopyCertificate)> = Vec::new();
    let mut current = lp.clone();
    let mut whisker = 0;
    if !in_y(c, lp.start()) {
        let h = horoball_of(c, horoballs, lp.start()).ok_or(HomotopyError::NotInHoroball(lp.start()))?;
        let (i, k) = h.locate(lp.start()).ok_or(HomotopyError::NotInHoroball(lp.start()))?;
        let vs: Vec<VertexId> = (0..=k).rev().map(|l| h.vertex(i, l)).collect();
        let down = EdgePath::from_vertices(c, &vs).expect("vertical path");
        let mut b = CertificateBuilder::new(c, current.clone());
        stage("whisker", b.insert_whisker(0, &down))?;
        let n = b.current().len();
        stage("whisker", b.insert_whisker(n, &down))?;
        let cert = b.finish();
        current = cert.end.clone();
        whisker = down.len();
        stages.push((StageKind::Whisker, cert));
    }
    let outside = 2 * whisker;
    let (off, len) = (whisker, current.len() - outside);

    // Excursions: maximal runs whose interior lies strictly inside a horoball.
    let mut excursions = Vec::new();
    let mut i = off;
    while i < off + len {
        if in_y(c, current.vertices[i]) && !in_y(c, current.vertices[i + 1]) {
            let t = (i + 1..=off + len).find(|&j| in_y(c, current.vertices[j])).expect("loop returns to Y");
            excursions.push((i, t));
            i = t;
        } else {
            i += 1;
        }
    }
    let mut pushdown_radius = 0;
    for (idx, &(s, t)) in excursions.iter().enumerate().rev() {
        let name = format!("push-down {idx}");
        let h = horoball_of(c, horoballs, current.vertices[s + 1]).ok_or(HomotopyError::NotInHoroball(current.vertices[s + 1]))?;
        let beta = current.slice(s, t);
        let pushed = stage(&name, push_horoball_path_to_y(c, h, &beta))?;
        pushdown_radius = pushdown_radius.max(max_radius(c, &pushed.certificate, &beta));
        let mut b = CertificateBuilder::new(c, current.clone());
        stage(&name, b.apply_at(s, &pushed.certificate))?;
        let cert = b.finish();
        current = cert.end.clone();
        stages.push((StageKind::PushDown { excursion: idx }, cert));
    }
    let len = current.len() - outside;
    let alpha = current.slice(off, off + len);
    let y_cert = stage("contract-y", contract_y_loop(c, &alpha, budget))?;
    let y_radius = max_radius(c, &y_cert, &alpha);
    let mut b = CertificateBuilder::new(c, current.clone());
    stage("contract-y", b.apply_at(off, &y_cert))?;
    let cert = b.finish();
    current = cert.end.clone();
    stages.push((StageKind::ContractY, cert));
    if whisker > 0 {
        let mut b = CertificateBuilder::new(c, current.clone());
        stage("unwhisker", b.free_reduce())?;
        stages.push((StageKind::Unwhisker, b.finish()));
    }
    Ok(finish(c, lp, stages, pushdown_radius, y_radius))
}

fn finish(c: &Complex2, lp: &EdgePath, stages: Vec<(StageKind, HomotopyCertificate)>, pushdown: u32, y: u32) -> LoopContraction {
    let mut certificate = HomotopyCertificate::identity(lp.clone());
    for (_, s) in &stages {
        certificate = certificate.then(s).expect("stages chain");
    }
    let bounds = contraction_radius_bound(
        lp.len() as u64,
        MeasuredRadii {
            pushdown: pushdown as u64,
            y_loop: y as u64,
        },
    );
    let radius = RadiusBound::for_path(c, &certificate, lp, bounds.composed);
    LoopContraction {
        certificate,
        stages: stages
            .into_iter()
            .map(|(kind, certificate)| Stage { kind, certificate })
            .collect(),
        bound: bounds.composed,
        radius,
        pushdown_radius: pushdown,
        y_radius: y,
    }
}

/// Two δ-fellow-travelling segments `r`, `s` joined by end arcs `gamma` (at the start)
/// and `beta` (at the end).
#[derive(Clone, Debug)]
pub struct RectangleSides {
    pub r: EdgePath,
    pub s: EdgePath,
    pub gamma: EdgePath,
    pub beta: EdgePath,
    pub delta: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadReport {
    pub index: usize,
    pub boundary_length: usize,
    pub within_bound: bool,
    /// The quadrilateral was already a point after cancelling the shared rung.
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rectangle {
    /// From `r` to `gamma · s · beta⁻¹`.
    pub certificate: HomotopyCertificate,
    pub quads: Vec<QuadReport>,
    /// `2δ + 2`.
    pub quad_bound: u64,
    /// Smallest distance from the given center to the region.
    pub clearance: Option<u32>,
}

/// Fills the rectangle between two fellow-travelling segments with quadrilaterals
/// `r(j) r(j+1) s(j+1) s(j)`, each contracted by [`contract_loop`].
pub fn fill_rectangle(
    c: &Complex2,
    horoballs: &[Horoball],
    sides: &RectangleSides,
    center: Option<VertexId>,
    budget: usize,
) -> Result<Rectangle, HomotopyError> {
    let RectangleSides { r, s, gamma, beta, delta } = sides;
    let n = r.len();
    if s.len() != n {
        return Err(HomotopyError::BadInput("segments differ in length".into()));
    }
    if gamma.start() != r.start() || gamma.end() != s.start() || beta.start() != r.end() || beta.end() != s.end() {
        return Err(HomotopyError::BadInput("end arcs do not join the segments".into()));
    }
    for (idx, arc) in [(0, gamma), (n, beta)] {
        if arc.len() as u32 > *delta {
            return Err(HomotopyError::NotFellowTravelling {
                index: idx,
                distance: arc.len() as u32,
                delta: *delta,
            });
        }
    }
    let mut rungs = vec![gamma.clone()];
    for j in 1..n {
        let g = bfs_geodesic(c, r.vertices[j], s.vertices[j])?;
        if g.len() as u32 > *delta {
            return Err(HomotopyError::NotFellowTravelling {
                index: j,
                distance: g.len() as u32,
                delta: *delta,
            });
        }
        rungs.push(g);
    }
    if n > 0 {
        rungs.push(beta.clone());
    }
    // Quad j: P = rung_j⁻¹ · r_j is replaced by P' = s_j · rung_{j+1}⁻¹.
    let pieces: Vec<(EdgePath, EdgePath)> = (0..n)
        .map(|j| {
            let p = rungs[j].reversed().concat(&r.slice(j, j + 1));
            let q = s.slice(j, j + 1).concat(&rungs[j + 1].reversed());
            (p, q)
        })
        .collect();
    let contracted: Vec<Option<Result<LoopContraction, HomotopyError>>> = pieces
        .par_iter()
        .map(|(p, q)| (p != q).then(|| contract_loop(c, horoballs, &q.reversed().concat(p), budget)))
        .collect();
    let quad_bound = 2 * *delta as u64 + 2;
    let mut b = CertificateBuilder::new(c, r.clone());
    b.insert_whisker(0, gamma)?;
    let mut quads = Vec::with_capacity(n);
    for (j, ((p, q), res)) in pieces.iter().zip(contracted).enumerate() {
        let boundary_length = p.len() + q.len();
        quads.push(QuadReport {
            index: j,
            boundary_length,
            within_bound: boundary_length as u64 <= quad_bound,
            skipped: res.is_none(),
        });
        let Some(res) = res else { continue };
        let lc = stage(&format!("quad {j}"), res)?;
        let pos = gamma.len() + j;
        b.insert_whisker(pos, q)?;
        b.apply_at(pos + q.len(), &lc.certificate)?;
    }
    let certificate = b.finish();
    let clearance = center.map(|v| certificate.clearance_from(c, v));
    Ok(Rectangle {
        certificate,
        quads,
        quad_bound,
        clearance,
    })
}
