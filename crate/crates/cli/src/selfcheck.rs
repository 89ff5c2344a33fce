//! Small versions of the acceptance suites, run by `cusped selfcheck`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cusped::complex::{Complex2, VertexId};
use cusped::cusped::{build_cusped_space, CuspedComplex, ResourceCaps};
use cusped::excision::{
    colorings, coset_vertices, disk_pair_induction, disk_pair_region_grow, excise, random_strip_map, red_classes,
    separation_oracle, validate_excision, Color, Separation, StripMapParams,
};
use cusped::homotopy::{contract_horoball_loop, halve_loop, push_horoball_path_to_y, verify_certificate, HomotopyError};
use cusped::horoball::{build_horoball, BaseGraph, HoroballComplex};
use cusped::metric::{
    bfs_distance, convexity_check, delta_estimate, horoball_geodesic, ConvexityConfig, DeltaConfig, TripleSource,
};
use cusped::path::EdgePath;
use cusped::presentation::parse_presentation;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, failures: Vec<String>, summary: String) -> CheckResult {
    CheckResult {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => summary,
            Some(f) => format!("{} failures, first: {f}", failures.len()),
        },
    }
}

fn space(text: &str, r: u32, d: u32) -> CuspedComplex {
    build_cusped_space(&parse_presentation(text).expect("built-in presentation"), r, d, &ResourceCaps::default())
        .expect("small build")
}

const FREE: &str = "gens a,b\nrels\ngroup [free]\n";
const FREE_MOD_A: &str = "gens a,b\nrels\ngroup [free]\nperiph P: a [free]\n";
const FREE_MOD_AB: &str = "gens a,b\nrels\ngroup [free]\nperiph P: a [free]\nperiph Q: b [free]\n";

pub fn run(seed: u64) -> Vec<CheckResult> {
    vec![
        horoball_geodesics(),
        horoball_contraction(),
        halving_and_pushdown(seed),
        thin_free_ball(seed),
        convexity(seed),
        excision(seed),
    ]
}

fn horoball_geodesics() -> CheckResult {
    let h = build_horoball(&BaseGraph::path(9), 4).expect("horoball");
    let vs: Vec<VertexId> = h.horoball.vertices().collect();
    let mut failures = Vec::new();
    let mut checked = 0;
    for &u in &vs {
        for &v in &vs {
            let Ok(d) = bfs_distance(&h.complex, u, v) else { continue };
            if !d.exact {
                continue;
            }
            checked += 1;
            match horoball_geodesic(&h.complex, &h.horoball, u, v) {
                Ok(p) if p.len() == d.value as usize => {}
                Ok(p) => failures.push(format!("{u}-{v}: normal form {} vs {}", p.len(), d.value)),
                Err(e) => failures.push(format!("{u}-{v}: {e}")),
            }
        }
    }
    result("horoball normal form", failures, format!("{checked} certified pairs"))
}

/// Every closed walk of length ≤ `max` starting at `start`.
fn closed_walks(c: &Complex2, start: VertexId, max: usize, out: &mut Vec<Vec<VertexId>>) {
    fn go(c: &Complex2, walk: &mut Vec<VertexId>, max: usize, out: &mut Vec<Vec<VertexId>>) {
        let last = *walk.last().expect("non-empty");
        if walk.len() > 1 && last == walk[0] {
            out.push(walk.clone());
        }
        if walk.len() > max {
            return;
        }
        for &w in c.neighbors(last) {
            walk.push(w);
            go(c, walk, max, out);
            walk.pop();
        }
    }
    go(c, &mut vec![start], max, out);
}

fn horoball_contraction() -> CheckResult {
    let h = build_horoball(&BaseGraph::path(4), 8).expect("horoball");
    let mut walks = Vec::new();
    for i in 0..4 {
        for k in 0..2 {
            closed_walks(&h.complex, h.vertex(i, k), 4, &mut walks);
        }
    }
    let mut failures = Vec::new();
    for w in &walks {
        let lp = EdgePath::from_vertices(&h.complex, w).expect("walk");
        match contract_horoball_loop(&h.complex, &h.horoball, &lp) {
            Ok(r) => {
                if !verify_certificate(&h.complex, &r.certificate, None).valid {
                    failures.push(format!("{w:?}: certificate does not verify"));
                } else if !r.satisfied() {
                    failures.push(format!("{w:?}: region leaves B(v, {})", r.bound));
                }
            }
            Err(e) => failures.push(format!("{w:?}: {e}")),
        }
    }
    result("horoball contraction radius", failures, format!("{} loops", walks.len()))
}

fn random_walk(h: &HoroballComplex, rng: &mut ChaCha8Rng, from: VertexId, len: usize, keep: impl Fn(VertexId) -> bool) -> Vec<VertexId> {
    let mut w = vec![from];
    for _ in 0..len {
        let last = *w.last().expect("non-empty");
        let ns: Vec<VertexId> = h.complex.neighbors(last).iter().copied().filter(|&v| keep(v)).collect();
        if ns.is_empty() {
            break;
        }
        w.push(ns[rng.gen_range(0..ns.len())]);
    }
    w
}

fn halving_and_pushdown(seed: u64) -> CheckResult {
    let h = build_horoball(&BaseGraph::path(12), 8).expect("horoball");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let cases = 100;
    for n in 0..cases {
        let k = rng.gen_range(0..4u32);
        let start = h.vertex(rng.gen_range(0..12), k);
        let at_level = |v: VertexId| h.horoball.locate(v).is_some_and(|(_, l)| l == k);
        let len = rng.gen_range(1..8);
        let mut w = random_walk(&h, &mut rng, start, len, at_level);
        // Close up greedily along the level.
        let target = h.horoball.locate(start).expect("in horoball").0 as i64;
        while *w.last().expect("non-empty") != start {
            let last = *w.last().expect("non-empty");
            let next = h
                .complex
                .neighbors(last)
                .iter()
                .copied()
                .filter(|&v| at_level(v))
                .min_by_key(|&v| (h.horoball.locate(v).expect("in horoball").0 as i64 - target).abs())
                .expect("levels are connected");
            w.push(next);
        }
        let tau = EdgePath::from_vertices(&h.complex, &w).expect("walk");
        match halve_loop(&h.complex, &h.horoball, &tau) {
            Ok(r) if r.loop_path.len() <= tau.len() / 2 + 1 => {}
            Ok(r) => failures.push(format!("case {n}: halved {} to {}", tau.len(), r.loop_path.len())),
            Err(HomotopyError::DepthHeadroom { .. }) => {}
            Err(e) => failures.push(format!("case {n}: {e}")),
        }

        let base = h.vertex(rng.gen_range(0..12), 0);
        let up = rng.gen_range(1..4);
        let mut beta = random_walk(&h, &mut rng, base, up, |_| true);
        let mut last = *beta.last().expect("non-empty");
        while h.horoball.locate(last).expect("in horoball").1 > 0 {
            let (i, l) = h.horoball.locate(last).expect("in horoball");
            last = h.vertex(i, l - 1);
            beta.push(last);
        }
        let beta = EdgePath::from_vertices(&h.complex, &beta).expect("walk");
        let big_k = beta.len() as u32;
        match push_horoball_path_to_y(&h.complex, &h.horoball, &beta) {
            Ok(r) => {
                if (r.path.len() as u64) >= (big_k as u64) << big_k {
                    failures.push(format!("case {n}: pushed {} to {}", big_k, r.path.len()));
                }
            }
            Err(e) => failures.push(format!("case {n}: {e}")),
        }
    }
    result("halving and push-down", failures, format!("{cases} seeded cases"))
}

fn thin_free_ball(seed: u64) -> CheckResult {
    let x = space(FREE, 4, 0);
    let r = delta_estimate(&x.complex, &DeltaConfig { source: TripleSource::Sampled { samples: 200, seed } });
    match r {
        Ok(r) if r.delta == 0 => result("thin triangles in a tree", vec![], "0 on F2, R=4".into()),
        Ok(r) => result("thin triangles in a tree", vec![format!("estimate {}", r.delta)], String::new()),
        Err(e) => result("thin triangles in a tree", vec![e.to_string()], String::new()),
    }
}

fn convexity(seed: u64) -> CheckResult {
    let x = space(FREE_MOD_A, 3, 4);
    let delta = match delta_estimate(&x.complex, &DeltaConfig { source: TripleSource::Sampled { samples: 200, seed } }) {
        Ok(r) => r.delta,
        Err(e) => return result("horoball convexity", vec![e.to_string()], String::new()),
    };
    let r = convexity_check(&x.complex, &x.horoballs, delta.max(1), &ConvexityConfig { samples: 200, seed });
    let failures = r.violations.iter().map(|v| format!("{v:?}")).collect();
    result(
        "horoball convexity",
        failures,
        format!("m={}, {} certified pairs", delta.max(1), r.pairs_certified),
    )
}

fn excision(seed: u64) -> CheckResult {
    let x = space(FREE_MOD_AB, 3, 3);
    let mut failures = Vec::new();
    let mut classes = 0;
    for n in 0..20 {
        let p = StripMapParams {
            width: 4 + n % 9,
            height: 2 + n % 3,
            steps: 1500,
            seed: seed.wrapping_add(n as u64),
            descend: 0.5,
        };
        let m = random_strip_map(&x, &p);
        let e = match excise(&x, &m) {
            Ok(e) => e,
            Err(err) => {
                failures.push(format!("map {n}: {err}"));
                continue;
            }
        };
        let report = validate_excision(&x, &m, &e.pairs);
        failures.extend(report.violations.iter().map(|v| format!("map {n}: {v}")));
        for c in colorings(&x, &m).unwrap_or_default() {
            let z = coset_vertices(&x, c.coset);
            for v in m.strip.vertices() {
                let expected = match c.vertex(v) {
                    Color::Red => Separation::Separated,
                    Color::Green => Separation::NotSeparated,
                    Color::Blue => continue,
                };
                let got = separation_oracle(&x, m.image(v), &z);
                if got != Separation::Uncertified && got != expected {
                    failures.push(format!("map {n}: coloring and separation disagree"));
                }
            }
            for class in red_classes(&m, &c) {
                classes += 1;
                match (disk_pair_induction(&m, &c, &class), disk_pair_region_grow(&m, &c, &class)) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => failures.push(format!("map {n}: induction and region growing disagree")),
                }
            }
        }
    }
    result("excision", failures, format!("20 maps, {classes} red classes"))
}
