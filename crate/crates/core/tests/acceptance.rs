//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness
//! so the lines always reach the output.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cusped::complex::{Complex2, VertexId, VertexKind};
use cusped::cusped::{build_cusped_space, CuspedComplex, ResourceCaps};
use cusped::excision::{
    colorings, disk_pair_induction, disk_pair_region_grow, excise, random_strip_map, red_classes, separation_oracle,
    validate_excision, Color, Coloring, DiskPair, Separation, Strip, StripEdge, StripMap, StripMapParams, StripVertex,
};
use cusped::homotopy::{
    contract_horoball_loop, fill_rectangle, halve_loop, push_horoball_path_to_y, verify_certificate, HomotopyError,
    RectangleSides, DEFAULT_BUDGET,
};
use cusped::horoball::{build_horoball, BaseGraph, HoroballComplex};
use cusped::metric::{bfs_geodesic, convexity_check, delta_estimate, horoball_geodesic, ConvexityConfig, DeltaConfig, TripleSource};
use cusped::path::EdgePath;
use cusped::presentation::parse_presentation;

const FREE: &str = "gens a,b\nrels\ngroup [free]\n";
const Z2: &str = "gens a,b\nrels aba'b'\ngroup [free-abelian]\n";
const F2_MOD_A: &str = "gens a,b\nrels\ngroup [free]\nperiph P: a [free]\n";
const F2_MOD_AB: &str = "gens a,b\nrels\ngroup [free]\nperiph P: a [free]\nperiph Q: b [free]\n";

const UNREACHED: u32 = u32::MAX;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Outcome {
            passed: true,
            detail: summary,
        },
        Some(f) => Outcome {
            passed: false,
            detail: format!("{summary}; {} failures, first: {f}", failures.len()),
        },
    }
}

fn space(text: &str, r: u32, d: u32) -> CuspedComplex {
    build_cusped_space(&parse_presentation(text).unwrap(), r, d, &ResourceCaps::default()).unwrap()
}

// Independent metric helpers, written against the adjacency lists only.

fn bfs(c: &Complex2, s: VertexId) -> Vec<u32> {
    let mut d = vec![UNREACHED; c.vertex_count()];
    d[s.0] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in c.neighbors(u) {
            if d[w.0] == UNREACHED {
                d[w.0] = d[u.0] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn frontier_distance(c: &Complex2) -> Vec<u32> {
    let mut d = vec![UNREACHED; c.vertex_count()];
    let mut q = VecDeque::new();
    for (v, x) in c.vertices() {
        if x.frontier {
            d[v.0] = 0;
            q.push_back(v);
        }
    }
    while let Some(u) = q.pop_front() {
        for &w in c.neighbors(u) {
            if d[w.0] == UNREACHED {
                d[w.0] = d[u.0] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

/// A truncated distance is the true one when no detour through missing cells could be
/// shorter; every true geodesic is present when the inequality is strict.
fn exact(d: u32, fu: u32, fv: u32) -> bool {
    fu == UNREACHED || fv == UNREACHED || d as u64 <= fu as u64 + fv as u64 + 1
}

fn all_geodesics_present(d: u32, fu: u32, fv: u32) -> bool {
    fu == UNREACHED || fv == UNREACHED || (d as u64) < fu as u64 + fv as u64 + 1
}

fn horo_level(h: &HoroballComplex, v: VertexId) -> (usize, u32) {
    h.horoball.locate(v).unwrap()
}

// 1. Horoball geodesics.

fn criterion_1() -> Outcome {
    let h = build_horoball(&BaseGraph::path(17), 6).unwrap();
    let c = &h.complex;
    let n = c.vertex_count();
    let dist: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| bfs(c, VertexId(s))).collect();
    let f = frontier_distance(c);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
    let results: Vec<(bool, bool, Option<String>)> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let d = dist[u][v];
            let length_checked = exact(d, f[u], f[v]);
            let spread_checked = all_geodesics_present(d, f[u], f[v]);
            if !length_checked {
                return (false, false, None);
            }
            let p = match horoball_geodesic(c, &h.horoball, VertexId(u), VertexId(v)) {
                Ok(p) => p,
                Err(e) => return (true, false, Some(format!("v{u}-v{v}: {e}"))),
            };
            if p.len() != d as usize || p.start() != VertexId(u) || p.end() != VertexId(v) {
                return (true, false, Some(format!("v{u}-v{v}: normal form length {} vs distance {d}", p.len())));
            }
            if !spread_checked {
                return (true, false, None);
            }
            let spread = max_hausdorff_to_geodesics(&dist, u, v, &p.vertices);
            if spread > 4 {
                return (true, true, Some(format!("v{u}-v{v}: a geodesic is {spread} from the normal form")));
            }
            (true, true, None)
        })
        .collect();
    let lengths = results.iter().filter(|r| r.0).count();
    let spreads = results.iter().filter(|r| r.1).count();
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.2).collect();
    outcome(
        &failures,
        format!("17-vertex line, depth 6: {lengths} certified lengths, {spreads} pairs with every geodesic checked"),
    )
}

/// Largest Hausdorff distance between `reference` and any geodesic from `u` to `v`.
fn max_hausdorff_to_geodesics(dist: &[Vec<u32>], u: usize, v: usize, reference: &[VertexId]) -> u32 {
    let total = dist[u][v];
    let on_some: Vec<usize> = (0..dist.len()).filter(|&x| dist[u][x] + dist[x][v] == total).collect();
    // Every vertex of the geodesic DAG lies on some geodesic.
    let far_from_reference = on_some
        .iter()
        .map(|&x| reference.iter().map(|r| dist[x][r.0]).min().unwrap())
        .max()
        .unwrap();
    // For each reference vertex, the geodesic that stays farthest from it: a bottleneck
    // path through the DAG, layer by layer.
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); total as usize + 1];
    for &x in &on_some {
        layers[dist[u][x] as usize].push(x);
    }
    let mut worst = 0;
    for r in reference {
        let mut best = vec![0u32; dist.len()];
        best[u] = dist[u][r.0];
        for k in 1..layers.len() {
            for &x in &layers[k] {
                let from = layers[k - 1].iter().filter(|&&p| dist[p][x] == 1).map(|&p| best[p]).max().unwrap();
                best[x] = from.min(dist[x][r.0]);
            }
        }
        worst = worst.max(best[v]);
    }
    worst.max(far_from_reference)
}

// 2. Horoball contraction radius.

fn base_graph(kind: &str, n: usize) -> BaseGraph {
    let edges: Vec<(usize, usize)> = match kind {
        "path" => (1..n).map(|i| (i - 1, i)).collect(),
        "cycle" => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        "star" => (1..n).map(|i| (0, i)).collect(),
        "complete" => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        _ => unreachable!(),
    };
    BaseGraph::new(n, &edges).unwrap()
}

/// Closed walks without immediate backtracking, of length ≤ `max`, that start at a
/// level-`m` vertex, never go below level `m`, never meet a smaller level-`m` vertex,
/// and return to the start only at the end.
fn first_return_walks(h: &HoroballComplex, m: u32, max: usize) -> Vec<Vec<VertexId>> {
    let c = &h.complex;
    let mut out = Vec::new();
    for i in 0..h.horoball.base.len() {
        let s = h.vertex(i, m);
        let mut stack = vec![vec![s]];
        while let Some(w) = stack.pop() {
            let last = *w.last().unwrap();
            if w.len() > 1 && last == s {
                out.push(w);
                continue;
            }
            if w.len() > max {
                continue;
            }
            for &x in c.neighbors(last) {
                let (_, k) = horo_level(h, x);
                if k < m || (k == m && x < s) || (w.len() >= 2 && x == w[w.len() - 2]) {
                    continue;
                }
                let mut next = w.clone();
                next.push(x);
                stack.push(next);
            }
        }
    }
    out
}

fn criterion_2() -> Outcome {
    // (base graph, vertices, lowest level, longest loop)
    let corpus = [
        ("path", 8, 0, 10),
        ("cycle", 8, 0, 8),
        ("star", 5, 0, 10),
        ("complete", 4, 0, 10),
        ("path", 4, 1, 10),
        ("path", 8, 1, 6),
        ("path", 8, 2, 6),
        ("path", 8, 3, 6),
        ("cycle", 6, 2, 6),
    ];
    let mut failures = Vec::new();
    let mut total = 0;
    for (kind, n, m, max) in corpus {
        let h = build_horoball(&base_graph(kind, n), 16).unwrap();
        let c = &h.complex;
        let walks = first_return_walks(&h, m, max);
        total += walks.len();
        let bad: Vec<String> = walks
            .par_iter()
            .filter_map(|w| {
                let lp = EdgePath::from_vertices(c, w).unwrap();
                let r = match contract_horoball_loop(c, &h.horoball, &lp) {
                    Ok(r) => r,
                    Err(e) => return Some(format!("{kind}{n} {w:?}: {e}")),
                };
                let report = verify_certificate(c, &r.certificate, None);
                if !report.valid || !r.certificate.end.is_empty() {
                    return Some(format!("{kind}{n} {w:?}: certificate does not verify"));
                }
                // Independent radius check: 2K + k with K < 2^k.
                let big_k = lp.len() as u64;
                let k = (0..).find(|&k| big_k < 1u64 << k).unwrap();
                let bound = 2 * big_k + k;
                for &v in &lp.vertices {
                    let d = bfs(c, v);
                    if let Some(far) = r.certificate.region.iter().find(|x| d[x.0] as u64 > bound) {
                        return Some(format!("{kind}{n} {w:?}: {far} is beyond {bound} of {v}"));
                    }
                }
                None
            })
            .collect();
        failures.extend(bad);
    }
    outcome(&failures, format!("{total} loops over 9 base-graph families"))
}

// 3. Halving and push-down.

fn random_base_graph(rng: &mut ChaCha8Rng) -> BaseGraph {
    let n = rng.gen_range(2..=8);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..rng.gen_range(0..n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !edges.contains(&(a.min(b), a.max(b))) && !edges.contains(&(a.max(b), a.min(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    BaseGraph::new(n, &edges).unwrap()
}

fn random_step(c: &Complex2, rng: &mut ChaCha8Rng, from: VertexId, keep: impl Fn(VertexId) -> bool) -> Option<VertexId> {
    let ns: Vec<VertexId> = c.neighbors(from).iter().copied().filter(|&v| keep(v)).collect();
    ns.choose(rng).copied()
}

/// `end` is `w · inner · w⁻¹` for some path `w`.
fn is_conjugate_by_whisker(end: &EdgePath, inner: &EdgePath) -> bool {
    if end.len() < inner.len() || (end.len() - inner.len()) % 2 == 1 {
        return false;
    }
    let w = (end.len() - inner.len()) / 2;
    end.slice(w, w + inner.len()) == *inner && end.slice(0, w).reversed() == end.slice(end.len() - w, end.len())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let (mut halvings, mut pushes) = (0, 0);
    for case in 0..1000 {
        let g = random_base_graph(&mut rng);
        let h = build_horoball(&g, 9).unwrap();
        let c = &h.complex;

        // A horizontal loop at level k: a random walk closed by a level-k geodesic.
        let k = rng.gen_range(0..5u32);
        let start = h.vertex(rng.gen_range(0..g.len()), k);
        let at_k = |v: VertexId| horo_level(&h, v).1 == k;
        let mut w = vec![start];
        for _ in 0..rng.gen_range(1..12) {
            if let Some(x) = random_step(c, &mut rng, *w.last().unwrap(), at_k) {
                w.push(x);
            }
        }
        let level_dist = {
            let mut d = vec![UNREACHED; c.vertex_count()];
            d[start.0] = 0;
            let mut q = VecDeque::from([start]);
            while let Some(u) = q.pop_front() {
                for &x in c.neighbors(u) {
                    if at_k(x) && d[x.0] == UNREACHED {
                        d[x.0] = d[u.0] + 1;
                        q.push_back(x);
                    }
                }
            }
            d
        };
        while *w.last().unwrap() != start {
            let last = *w.last().unwrap();
            let next = c.neighbors(last).iter().copied().filter(|&x| at_k(x)).min_by_key(|x| level_dist[x.0]).unwrap();
            w.push(next);
        }
        let tau = EdgePath::from_vertices(c, &w).unwrap();
        match halve_loop(c, &h.horoball, &tau) {
            Ok(r) => {
                halvings += 1;
                if r.loop_path.len() > tau.len() / 2 + 1 {
                    failures.push(format!("case {case}: |τ| = {} halved to {}", tau.len(), r.loop_path.len()));
                }
                if !verify_certificate(c, &r.certificate, None).valid || !is_conjugate_by_whisker(&r.certificate.end, &r.loop_path) {
                    failures.push(format!("case {case}: halving certificate does not verify"));
                }
            }
            Err(e) => failures.push(format!("case {case}: halving: {e}")),
        }

        // A path with both ends at level 0.
        let base = h.vertex(rng.gen_range(0..g.len()), 0);
        let mut beta = vec![base];
        for _ in 0..rng.gen_range(1..7) {
            if let Some(x) = random_step(c, &mut rng, *beta.last().unwrap(), |_| true) {
                beta.push(x);
            }
        }
        loop {
            let (i, l) = horo_level(&h, *beta.last().unwrap());
            if l == 0 {
                break;
            }
            beta.push(h.vertex(i, l - 1));
        }
        let beta = EdgePath::from_vertices(c, &beta).unwrap();
        let big_k = beta.len() as u64;
        match push_horoball_path_to_y(c, &h.horoball, &beta) {
            Ok(r) => {
                pushes += 1;
                if big_k > 0 && r.path.len() as u64 >= big_k << big_k {
                    failures.push(format!("case {case}: |β| = {big_k} pushed to {}", r.path.len()));
                }
                let on_level_zero = r.path.vertices.iter().all(|&v| horo_level(&h, v).1 == 0);
                let ends = r.path.start() == beta.start() && r.path.end() == beta.end();
                if !on_level_zero || !ends || !verify_certificate(c, &r.certificate, None).valid {
                    failures.push(format!("case {case}: push-down certificate does not verify"));
                }
            }
            Err(e) => failures.push(format!("case {case}: push-down: {e}")),
        }
    }
    outcome(&failures, format!("{halvings} halvings, {pushes} push-downs"))
}

// 4. Thin triangles.

fn delta_of(x: &CuspedComplex, seed: u64) -> Result<u32, String> {
    let r = delta_estimate(&x.complex, &DeltaConfig { source: TripleSource::Sampled { samples: 2000, seed } })
        .map_err(|e| e.to_string())?;
    // The witness must realise the reported value.
    let d = bfs(&x.complex, r.witness.points[0])[r.witness.points[1].0];
    if r.triangles_certified > 0 && d != r.delta {
        return Err(format!("witness points are {d} apart, reported {}", r.delta));
    }
    Ok(r.delta)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut free = Vec::new();
    for r in 1..=6 {
        match delta_of(&space(FREE, r, 0), 11) {
            Ok(0) => free.push(0),
            Ok(d) => failures.push(format!("free ball R={r}: δ̂ = {d}")),
            Err(e) => failures.push(format!("free ball R={r}: {e}")),
        }
    }
    let mut z2 = Vec::new();
    for r in 2..=6 {
        match delta_of(&space(Z2, r, 0), 11) {
            Ok(d) => z2.push(d),
            Err(e) => failures.push(format!("Z² R={r}: {e}")),
        }
    }
    if z2.windows(2).any(|w| w[1] < w[0]) || z2.first() >= z2.last() {
        failures.push(format!("Z² estimates do not grow with R: {z2:?}"));
    }
    let mut cusped = Vec::new();
    for r in 3..=5 {
        match delta_of(&space(F2_MOD_A, r, 4), 11) {
            Ok(d) => cusped.push(d),
            Err(e) => failures.push(format!("F2/<a> R={r}: {e}")),
        }
    }
    if cusped.iter().max().unwrap_or(&0) - cusped.iter().min().unwrap_or(&0) > 1 {
        failures.push(format!("F2/<a> estimates vary by more than 1: {cusped:?}"));
    }
    outcome(
        &failures,
        format!("free R≤6: {free:?}; Z² R=2..6: {z2:?}; F2/<a> R=3..5: {cusped:?}"),
    )
}

// 5. Horoball convexity.

fn criterion_5() -> Outcome {
    let x = space(F2_MOD_A, 4, 5);
    let delta = match delta_of(&x, 5) {
        Ok(d) => d,
        Err(e) => return outcome(&[e], String::new()),
    };
    let m = delta.max(1);
    let mut failures = Vec::new();
    let report = convexity_check(&x.complex, &x.horoballs, m, &ConvexityConfig { samples: 1000, seed: 5 });
    failures.extend(report.violations.iter().map(|v| format!("{v:?}")));
    if report.pairs_certified == 0 {
        failures.push("no certified pairs".into());
    }

    // The same question on an independently sampled set of pairs.
    let c = &x.complex;
    let f = frontier_distance(c);
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let deep: Vec<Vec<VertexId>> = x
        .horoballs
        .iter()
        .map(|h| h.vertices().filter(|&v| h.locate(v).unwrap().1 >= m).collect())
        .collect();
    let mut own = 0;
    for _ in 0..1000 {
        let hi = rng.gen_range(0..deep.len());
        if deep[hi].is_empty() {
            continue;
        }
        let (u, v) = (*deep[hi].choose(&mut rng).unwrap(), *deep[hi].choose(&mut rng).unwrap());
        let (du, dv) = (bfs(c, u), bfs(c, v));
        let d = du[v.0];
        if !all_geodesics_present(d, f[u.0], f[v.0]) {
            continue;
        }
        own += 1;
        for w in 0..c.vertex_count() {
            if du[w] != UNREACHED && dv[w] != UNREACHED && du[w] + dv[w] == d {
                let inside = x.horoballs[hi].locate(VertexId(w)).is_some_and(|(_, k)| k >= m);
                if !inside {
                    failures.push(format!("geodesic {u}-{v} passes v{w}"));
                }
            }
        }
    }
    outcome(
        &failures,
        format!(
            "m = {m} (δ̂ = {delta}), {} of {} sampled pairs certified, {own} rechecked",
            report.pairs_certified, report.pairs_sampled
        ),
    )
}

// 6–8. Excision corpus.

struct Case {
    x: usize,
    params: StripMapParams,
}

fn corpus() -> (Vec<CuspedComplex>, Vec<Case>) {
    let spaces = vec![space(F2_MOD_A, 3, 3), space(F2_MOD_AB, 3, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = (0..120)
        .map(|n| Case {
            x: n % 2,
            params: StripMapParams {
                width: rng.gen_range(1..=20),
                height: rng.gen_range(1..=6),
                steps: rng.gen_range(200..3000),
                seed: rng.gen(),
                descend: rng.gen_range(0.2..0.9),
            },
        })
        .collect();
    (spaces, cases)
}

fn criterion_6(spaces: &[CuspedComplex], cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    let mut red_maps = 0;
    for (n, case) in cases.iter().enumerate() {
        let x = &spaces[case.x];
        let m = random_strip_map(x, &case.params);
        let e = match excise(x, &m) {
            Ok(e) => e,
            Err(err) => {
                failures.push(format!("map {n}: {err}"));
                continue;
            }
        };
        pairs += e.pairs.len();
        red_maps += usize::from(!e.pairs.is_empty());
        let report = validate_excision(x, &m, &e.pairs);
        failures.extend(report.violations.iter().map(|v| format!("map {n}: {v}")));
        failures.extend(independent_excision_check(x, &m, &e.pairs).into_iter().map(|v| format!("map {n}: {v}")));
    }
    outcome(
        &failures,
        format!("{} maps ({red_maps} with red), {pairs} disk pairs", cases.len()),
    )
}

/// Pairwise disjoint disks, boundaries on the coset away from cut ends, and everything
/// outside the disks mapping into Y.
fn independent_excision_check(x: &CuspedComplex, m: &StripMap, pairs: &[DiskPair]) -> Vec<String> {
    let s = &m.strip;
    let mut out = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; s.triangle_count()];
    let mut outside_y_allowed = BTreeSet::new();
    for (k, p) in pairs.iter().enumerate() {
        for t in &p.triangles {
            if let Some(j) = owner[t.0].replace(k) {
                out.push(format!("pairs {j} and {k} share a triangle"));
            }
        }
        let members: HashSet<VertexId> = x.cosets[p.coset].members.iter().copied().collect();
        let n = p.boundary.len();
        for i in 0..n {
            let (a, b) = (p.boundary[i], p.boundary[(i + 1) % n]);
            let cut = p.truncated && s.is_end_edge(StripEdge::new(a, b));
            if cut {
                outside_y_allowed.extend([a, b]);
            } else if !(members.contains(&m.image(a)) && members.contains(&m.image(b))) {
                out.push(format!("pair {k}: boundary edge {:?}-{:?} leaves coset {}", s.coords(a), s.coords(b), p.coset));
            }
        }
        let on: HashSet<StripVertex> = p.boundary.iter().copied().collect();
        for &t in &p.triangles {
            outside_y_allowed.extend(s.triangle_vertices(t).into_iter().filter(|v| !on.contains(v)));
        }
    }
    for v in s.vertices() {
        let in_y = matches!(x.complex.vertex(m.image(v)).kind, VertexKind::Cayley { .. });
        if !in_y && !outside_y_allowed.contains(&v) {
            out.push(format!("strip vertex {:?} outside every disk maps outside Y", s.coords(v)));
        }
    }
    out
}

fn criterion_7(spaces: &[CuspedComplex], cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    let mut classes = 0;
    for (n, case) in cases.iter().enumerate() {
        let x = &spaces[case.x];
        let m = random_strip_map(x, &case.params);
        for c in colorings(x, &m).unwrap_or_default() {
            for class in red_classes(&m, &c) {
                classes += 1;
                match (disk_pair_induction(&m, &c, &class), disk_pair_region_grow(&m, &c, &class)) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (Ok(_), Ok(_)) => failures.push(format!("map {n} coset {}: pairs differ", c.coset)),
                    (a, b) => failures.push(format!("map {n} coset {}: {:?} / {:?}", c.coset, a.err(), b.err())),
                }
            }
        }
    }
    outcome(&failures, format!("{classes} red classes"))
}

fn expected_coloring(x: &CuspedComplex, m: &StripMap, coset: usize) -> (Vec<Color>, Vec<Color>) {
    let members: HashSet<VertexId> = x.cosets[coset].members.iter().copied().collect();
    let point = |v: VertexId| {
        if members.contains(&v) {
            Color::Blue
        } else if matches!(x.complex.vertex(v).kind, VertexKind::Horo { coset: k, .. } if k == coset) {
            Color::Red
        } else {
            Color::Green
        }
    };
    let simplex = |imgs: &[VertexId]| {
        let cs: Vec<Color> = imgs.iter().map(|&v| point(v)).collect();
        if cs.iter().all(|&c| c == Color::Blue) {
            Color::Blue
        } else if cs.contains(&Color::Red) {
            Color::Red
        } else {
            Color::Green
        }
    };
    let s = &m.strip;
    let vertices = s.vertices().map(|v| point(m.image(v))).collect();
    let triangles = s.triangles().map(|t| simplex(&m.triangle_images(t))).collect();
    (vertices, triangles)
}

fn observations(s: &Strip, c: &Coloring) -> Vec<String> {
    let mut out = Vec::new();
    for &(e, col) in &c.edges {
        let (a, b) = (c.vertex(e.0), c.vertex(e.1));
        if (col == Color::Blue) != (a == Color::Blue && b == Color::Blue) {
            out.push(format!("edge {e:?} breaks blue iff both ends blue"));
        }
        if (col == Color::Red) != (a == Color::Red || b == Color::Red) {
            out.push(format!("edge {e:?} breaks red iff a red end"));
        }
    }
    for t in s.triangles() {
        let vs = s.triangle_vertices(t);
        let cs = vs.map(|v| c.vertex(v));
        let col = c.triangle(t);
        if (col == Color::Blue) != cs.iter().all(|&k| k == Color::Blue) {
            out.push(format!("{t:?} breaks blue iff three blue vertices"));
        }
        if (col == Color::Red) != cs.contains(&Color::Red) {
            out.push(format!("{t:?} breaks red iff a red vertex"));
        }
        if cs.iter().filter(|&&k| k == Color::Red).count() == 1 {
            let r = cs.iter().position(|&k| k == Color::Red).unwrap();
            let opposite = StripEdge::new(vs[(r + 1) % 3], vs[(r + 2) % 3]);
            if c.edge(opposite) != Color::Blue {
                out.push(format!("{t:?}: edge opposite its single red vertex is not blue"));
            }
        }
    }
    out
}

fn criterion_8(spaces: &[CuspedComplex], cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    let (mut colorings_seen, mut certified, mut uncertified) = (0, 0, 0);
    for (n, case) in cases.iter().enumerate() {
        let x = &spaces[case.x];
        let m = random_strip_map(x, &case.params);
        let cs = match colorings(x, &m) {
            Ok(cs) => cs,
            Err(e) => {
                failures.push(format!("map {n}: {e}"));
                continue;
            }
        };
        let mut red_owner = vec![None; m.strip.vertex_count()];
        for c in &cs {
            colorings_seen += 1;
            let (vertices, triangles) = expected_coloring(x, &m, c.coset);
            if vertices != c.vertices || triangles != c.triangles {
                failures.push(format!("map {n} coset {}: coloring differs from the images", c.coset));
            }
            failures.extend(observations(&m.strip, c).into_iter().map(|o| format!("map {n} coset {}: {o}", c.coset)));
            let z: HashSet<VertexId> = x.cosets[c.coset].members.iter().copied().collect();
            for v in m.strip.vertices() {
                if c.vertex(v) == Color::Red {
                    if let Some(other) = red_owner[v.0].replace(c.coset) {
                        failures.push(format!("map {n}: strip vertex red for cosets {other} and {}", c.coset));
                    }
                }
                let expected = match c.vertex(v) {
                    Color::Red => Separation::Separated,
                    Color::Green => Separation::NotSeparated,
                    Color::Blue => continue,
                };
                match separation_oracle(x, m.image(v), &z) {
                    Separation::Uncertified => uncertified += 1,
                    got => {
                        certified += 1;
                        if got != expected {
                            failures.push(format!("map {n} coset {}: {:?} colored {:?} but oracle says {got:?}", c.coset, m.strip.coords(v), c.vertex(v)));
                        }
                    }
                }
            }
        }
    }
    outcome(
        &failures,
        format!("{colorings_seen} colorings, {certified} certified oracle queries agree, {uncertified} uncertified"),
    )
}

// 9. Rectangles between fellow travellers.

fn criterion_9() -> Outcome {
    let x = space(F2_MOD_A, 6, 4);
    let c = &x.complex;
    let delta = match delta_of(&x, 9) {
        Ok(d) => d,
        Err(e) => return outcome(&[e], String::new()),
    };
    let f = frontier_distance(c);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let inner: Vec<VertexId> = (0..c.vertex_count()).map(VertexId).filter(|v| f[v.0] >= 2).collect();
    let mut failures = Vec::new();
    let mut filled = 0;
    let mut quads = 0;
    let mut attempts = 0;
    while filled < 150 && attempts < 200_000 {
        attempts += 1;
        let u = *inner.choose(&mut rng).unwrap();
        let du = bfs(c, u);
        let n = rng.gen_range(1..=8u32);
        let ends: Vec<VertexId> = inner.iter().copied().filter(|w| du[w.0] == n).collect();
        let Some(&v) = ends.choose(&mut rng) else { continue };
        let near_u: Vec<VertexId> = inner.iter().copied().filter(|w| du[w.0] <= delta).collect();
        let u2 = *near_u.choose(&mut rng).unwrap();
        let (dv, du2) = (bfs(c, v), bfs(c, u2));
        let near_v: Vec<VertexId> = inner.iter().copied().filter(|w| dv[w.0] <= delta && du2[w.0] == n).collect();
        let Some(&v2) = near_v.choose(&mut rng) else { continue };
        let exact_pair = |a: VertexId, b: VertexId, d: u32| exact(d, f[a.0], f[b.0]);
        if !exact_pair(u, v, n) || !exact_pair(u2, v2, n) {
            continue;
        }
        let r = bfs_geodesic(c, u, v).unwrap();
        let s = bfs_geodesic(c, u2, v2).unwrap();
        if r.vertices.iter().zip(&s.vertices).any(|(&a, &b)| bfs(c, a)[b.0] > delta) {
            continue;
        }
        let gamma = bfs_geodesic(c, u, u2).unwrap();
        let beta = bfs_geodesic(c, v, v2).unwrap();
        let sides = RectangleSides {
            r: r.clone(),
            s: s.clone(),
            gamma: gamma.clone(),
            beta: beta.clone(),
            delta,
        };
        filled += 1;
        match fill_rectangle(c, &x.horoballs, &sides, None, DEFAULT_BUDGET) {
            Ok(rect) => {
                quads += rect.quads.len();
                let report = verify_certificate(c, &rect.certificate, None);
                let target = gamma.concat(&s).concat(&beta.reversed());
                if !report.valid || rect.certificate.start != r || rect.certificate.end != target {
                    failures.push(format!("{u}→{v} / {u2}→{v2}: certificate does not verify"));
                }
                for q in &rect.quads {
                    if q.boundary_length as u64 > 2 * delta as u64 + 2 {
                        failures.push(format!("{u}→{v}: quad {} has boundary {}", q.index, q.boundary_length));
                    }
                }
            }
            Err(HomotopyError::NotFellowTravelling { .. }) => {
                failures.push(format!("{u}→{v} / {u2}→{v2}: rejected as not fellow travelling"))
            }
            Err(e) => failures.push(format!("{u}→{v} / {u2}→{v2}: {e}")),
        }
    }
    if filled < 100 {
        failures.push(format!("only {filled} segment pairs found"));
    }
    outcome(&failures, format!("δ̂ = {delta}, {filled} rectangles, {quads} quadrilaterals"))
}

fn main() -> ExitCode {
    let (spaces, cases) = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("horoball normal form", Box::new(criterion_1)),
        ("horoball contraction radius", Box::new(criterion_2)),
        ("halving and push-down bounds", Box::new(criterion_3)),
        ("thin triangles", Box::new(criterion_4)),
        ("horoball convexity", Box::new(criterion_5)),
        ("excision", Box::new(|| criterion_6(&spaces, &cases))),
        ("induction equals region growing", Box::new(|| criterion_7(&spaces, &cases))),
        ("coloring observations", Box::new(|| criterion_8(&spaces, &cases))),
        ("fellow-traveller rectangles", Box::new(criterion_9)),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
