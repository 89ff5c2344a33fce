use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cusped::complex::VertexId;
use cusped::cusped::{build_cusped_space, CuspedComplex, ResourceCaps};
use cusped::excision::{
    colorings, disk_pair_induction, disk_pair_region_grow, excise, random_strip_map, red_classes, validate_excision, StripMap,
    StripMapParams,
};
use cusped::export::{
    cusped_dot, cusped_json, load_cusped, read_document, resolve_vertex, resolve_vertices, vertex_label, Document,
    StripMapDocument, STRIP_MAP_SCHEMA,
};
use cusped::homotopy::{
    contract_loop, fill_rectangle, verify_certificate, RadiusBound, RectangleSides, DEFAULT_BUDGET,
};
use cusped::metric::{
    ball, bfs_distance, bfs_geodesic, convexity_check, delta_estimate, ConvexityConfig, DeltaConfig, TripleSource,
};
use cusped::path::EdgePath;
use cusped::presentation::parse_presentation;

mod selfcheck;

#[derive(Parser)]
#[command(name = "cusped", version, about = "Truncated cusped spaces: build, measure, contract, excise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpaceArgs {
    /// Cusped-space document written by `build-cusped`.
    #[arg(long, value_name = "FILE", conflicts_with = "presentation")]
    complex: Option<PathBuf>,
    /// Presentation file to build from.
    #[arg(long, value_name = "FILE")]
    presentation: Option<PathBuf>,
    /// Radius of the Cayley ball.
    #[arg(long, default_value_t = 3)]
    radius: u32,
    /// Horoball depth cap.
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 2_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_vertices: u64,
    #[arg(long, default_value_t = 20_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_faces: u64,
}

impl SpaceArgs {
    fn caps(&self) -> ResourceCaps {
        ResourceCaps {
            max_vertices: self.max_vertices as usize,
            max_faces: self.max_faces as usize,
        }
    }

    fn load(&self) -> Result<CuspedComplex> {
        match (&self.complex, &self.presentation) {
            (Some(f), _) => Ok(load_cusped(&read(f)?, &self.caps())?),
            (None, Some(f)) => {
                let p = parse_presentation(&read(f)?)?;
                Ok(build_cusped_space(&p, self.radius, self.depth, &self.caps())?)
            }
            (None, None) => bail!("give --complex FILE or --presentation FILE"),
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write the document here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Build a cusped space and write its document.
    BuildCusped {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Shortest path between two vertices, with its exactness certificate.
    Geodesic {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        out: Output,
    },
    /// The closed ball of a given size about a vertex.
    Ball {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        center: String,
        /// Ball radius.
        #[arg(long)]
        size: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Estimate the thin-triangles constant from seeded triangles.
    DeltaScan {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Look for geodesics leaving the depth-m part of a horoball.
    ConvexityCheck {
        #[command(flatten)]
        space: SpaceArgs,
        /// Depth threshold; defaults to the estimated thin-triangles constant.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Contract a loop and emit the certificate.
    Contract {
        #[command(flatten)]
        space: SpaceArgs,
        /// Closed vertex list "v0,v1,...,v0".
        #[arg(long = "loop")]
        loop_path: String,
        /// Check the region against the ball of size --bound about this vertex.
        #[arg(long, requires = "bound")]
        center: Option<String>,
        #[arg(long, requires = "center")]
        bound: Option<u64>,
        /// "W,K": report if the homotopy enters the ball of size K about W.
        #[arg(long, value_name = "W,K")]
        forbid_ball: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Fill the rectangle between two fellow-travelling segments.
    FillRectangle {
        #[command(flatten)]
        space: SpaceArgs,
        /// First segment as a vertex list.
        #[arg(long)]
        r: String,
        /// Second segment, same length.
        #[arg(long)]
        s: String,
        /// Arc from the start of r to the start of s; a geodesic by default.
        #[arg(long)]
        gamma: Option<String>,
        /// Arc from the end of r to the end of s; a geodesic by default.
        #[arg(long)]
        beta: Option<String>,
        /// Fellow-travelling constant; defaults to the largest rung length.
        #[arg(long)]
        delta: Option<u32>,
        #[arg(long)]
        center: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Cut the red part out of a strip map and validate the result.
    Excise {
        #[command(flatten)]
        space: SpaceArgs,
        /// Strip map document; without it a random map is generated.
        #[arg(long, value_name = "FILE")]
        stripmap: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        descend: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Write the complex as JSON or as a DOT graph of its 1-skeleton.
    Export {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Run the small exhaustive and seeded check suites.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(f) => fs::write(f, text).with_context(|| format!("writing {}", f.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn document(schema: &str, seed: Option<u64>, body: Value) -> String {
    Document::new(schema, seed, body).to_json()
}

fn labels(x: &CuspedComplex, vs: &[VertexId]) -> Vec<String> {
    vs.iter().map(|&v| vertex_label(x, v)).collect()
}

fn path_json(x: &CuspedComplex, p: &EdgePath) -> Value {
    json!({ "length": p.len(), "vertices": labels(x, &p.vertices), "vertex_ids": p.vertices, "edge_ids": p.edges })
}

fn vertex_path(x: &CuspedComplex, text: &str) -> Result<EdgePath> {
    let vs = resolve_vertices(x, text)?;
    Ok(EdgePath::from_vertices(&x.complex, &vs)?)
}

/// Outcome of a subcommand that ran: `false` when a requested check failed.
type Passed = bool;

fn run(cli: Cli) -> Result<Passed> {
    match cli.command {
        Command::BuildCusped { space, out } => {
            if space.presentation.is_none() {
                bail!("build-cusped needs --presentation FILE");
            }
            let x = space.load()?;
            emit(&out, &cusped_json(&x))?;
            if out.out.is_some() {
                println!("{}", serde_json::to_string(&x.summary())?);
            }
            Ok(true)
        }
        Command::Geodesic { space, from, to, out } => {
            let x = space.load()?;
            let (u, v) = (resolve_vertex(&x, &from)?, resolve_vertex(&x, &to)?);
            let d = bfs_distance(&x.complex, u, v)?;
            let p = bfs_geodesic(&x.complex, u, v)?;
            let body = json!({
                "from": vertex_label(&x, u),
                "to": vertex_label(&x, v),
                "distance": d.value,
                "exact": d.exact,
                "path": path_json(&x, &p),
            });
            emit(&out, &document("cusped.geodesic", None, body))?;
            Ok(true)
        }
        Command::Ball { space, center, size, out } => {
            let x = space.load()?;
            let v = resolve_vertex(&x, &center)?;
            let b = ball(&x.complex, v, size)?;
            let members: Vec<VertexId> = b.cells.vertices.iter().copied().collect();
            let body = json!({
                "center": vertex_label(&x, v),
                "size": size,
                "exact": b.exact,
                "vertex_count": b.cells.vertices.len(),
                "edge_count": b.cells.edges.len(),
                "face_count": b.cells.faces.len(),
                "euler_characteristic": b.cells.euler_characteristic(),
                "vertices": labels(&x, &members),
            });
            emit(&out, &document("cusped.ball", None, body))?;
            Ok(true)
        }
        Command::DeltaScan { space, samples, seed, out } => {
            let x = space.load()?;
            let r = delta_estimate(&x.complex, &DeltaConfig { source: TripleSource::Sampled { samples, seed } })?;
            let w = &r.witness;
            let body = json!({
                "radius": x.radius,
                "depth_cap": x.depth_cap,
                "samples": samples,
                "delta": r.delta,
                "witness_points": labels(&x, &w.points),
                "witness_corners": labels(&x, &w.triangle.corners),
                "report": r,
            });
            emit(&out, &document("cusped.delta", Some(seed), body))?;
            Ok(true)
        }
        Command::ConvexityCheck { space, m, samples, seed, out } => {
            let x = space.load()?;
            let (m, delta) = match m {
                Some(m) => (m, None),
                None => {
                    let r = delta_estimate(&x.complex, &DeltaConfig { source: TripleSource::Sampled { samples, seed } })?;
                    (r.delta, Some(r.delta))
                }
            };
            let r = convexity_check(&x.complex, &x.horoballs, m, &ConvexityConfig { samples, seed });
            let passed = r.passed();
            let body = json!({ "m": m, "estimated_delta": delta, "passed": passed, "report": r });
            emit(&out, &document("cusped.convexity", Some(seed), body))?;
            Ok(passed)
        }
        Command::Contract { space, loop_path, center, bound, forbid_ball, budget, out } => {
            let x = space.load()?;
            let lp = vertex_path(&x, &loop_path)?;
            let forbidden = match &forbid_ball {
                Some(spec) => {
                    let (w, k) = spec.rsplit_once(',').ok_or_else(|| anyhow!("--forbid-ball takes W,K"))?;
                    let k: u32 = k.trim().parse().context("ball size in --forbid-ball")?;
                    let b = ball(&x.complex, resolve_vertex(&x, w)?, k)?;
                    Some(b.cells.vertices)
                }
                None => None,
            };
            let r = contract_loop(&x.complex, &x.horoballs, &lp, budget)?;
            let check = verify_certificate(&x.complex, &r.certificate, forbidden.as_ref());
            let requested = match (&center, bound) {
                (Some(c), Some(n)) => Some(RadiusBound::check(&x.complex, &r.certificate, resolve_vertex(&x, c)?, n)),
                _ => None,
            };
            let passed = check.valid
                && check.forbidden_hits.is_empty()
                && r.satisfied()
                && requested.as_ref().is_none_or(|b| b.satisfied);
            let body = json!({
                "loop": path_json(&x, &lp),
                "passed": passed,
                "bound": r.bound,
                "bound_satisfied": r.satisfied(),
                "requested_bound": requested,
                "verification": check,
                "contraction": r,
            });
            emit(&out, &document("cusped.contraction", None, body))?;
            Ok(passed)
        }
        Command::FillRectangle { space, r, s, gamma, beta, delta, center, budget, out } => {
            let x = space.load()?;
            let (r, s) = (vertex_path(&x, &r)?, vertex_path(&x, &s)?);
            let arc = |given: &Option<String>, a: VertexId, b: VertexId| -> Result<EdgePath> {
                match given {
                    Some(t) => vertex_path(&x, t),
                    None => Ok(bfs_geodesic(&x.complex, a, b)?),
                }
            };
            let gamma = arc(&gamma, r.start(), s.start())?;
            let beta = arc(&beta, r.end(), s.end())?;
            let delta = match delta {
                Some(d) => d,
                None => r
                    .vertices
                    .iter()
                    .zip(&s.vertices)
                    .map(|(&a, &b)| bfs_distance(&x.complex, a, b).map(|d| d.value))
                    .collect::<Result<Vec<u32>, _>>()?
                    .into_iter()
                    .max()
                    .unwrap_or(0),
            };
            let center = center.map(|c| resolve_vertex(&x, &c)).transpose()?;
            let sides = RectangleSides { r, s, gamma, beta, delta };
            let rect = fill_rectangle(&x.complex, &x.horoballs, &sides, center, budget)?;
            let check = verify_certificate(&x.complex, &rect.certificate, None);
            let passed = check.valid && rect.quads.iter().all(|q| q.within_bound);
            let body = json!({ "delta": delta, "passed": passed, "verification": check, "rectangle": rect });
            emit(&out, &document("cusped.rectangle", None, body))?;
            Ok(passed)
        }
        Command::Excise { space, stripmap, width, height, steps, seed, descend, out } => {
            let x = space.load()?;
            let (m, seed): (StripMap, Option<u64>) = match &stripmap {
                Some(f) => (read_document::<StripMapDocument>(&read(f)?, STRIP_MAP_SCHEMA)?.to_strip_map()?, None),
                None => {
                    if width == 0 || height == 0 || !(0.0..=1.0).contains(&descend) {
                        bail!("strip width and height must be positive and --descend in [0, 1]");
                    }
                    let p = StripMapParams { width, height, steps, seed, descend };
                    (random_strip_map(&x, &p), Some(seed))
                }
            };
            let e = excise(&x, &m)?;
            let report = validate_excision(&x, &m, &e.pairs);
            let mut disagreements = Vec::new();
            for c in colorings(&x, &m)? {
                for class in red_classes(&m, &c) {
                    let grown = disk_pair_region_grow(&m, &c, &class)?;
                    let built = disk_pair_induction(&m, &c, &class)?;
                    if grown != built {
                        disagreements.push(json!({ "coset": c.coset, "class_root": built.class_root }));
                    }
                }
            }
            let passed = report.passed() && disagreements.is_empty();
            let body = json!({
                "passed": passed,
                "stripmap": StripMapDocument::new(&m),
                "excision": e,
                "validation": report,
                "oracle_disagreements": disagreements,
            });
            emit(&out, &document("cusped.excision", seed, body))?;
            Ok(passed)
        }
        Command::Export { space, format, out } => {
            let x = space.load()?;
            let text = match format {
                Format::Json => cusped_json(&x),
                Format::Graph => cusped_dot(&x),
            };
            emit(&out, &text)?;
            Ok(true)
        }
        Command::Selfcheck { seed } => {
            let results = selfcheck::run(seed);
            let mut passed = true;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                passed &= r.passed;
            }
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a requested check failed; see the output document");
            ExitCode::from(1)
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
