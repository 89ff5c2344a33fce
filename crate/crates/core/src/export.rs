//! Versioned JSON documents and DOT output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, ComplexBuilder, ComplexError, EdgeId, EdgeKind, FaceId, FaceKind, VertexId, VertexKind};
use crate::cusped::{build_cusped_space, CuspedComplex, CuspedError, ResourceCaps, Summary};
use crate::excision::{Strip, StripMap};
use crate::presentation::parse_presentation;

pub const SCHEMA_VERSION: u32 = 1;

pub const COMPLEX_SCHEMA: &str = "cusped.complex";
pub const CUSPED_SCHEMA: &str = "cusped.space";
pub const STRIP_MAP_SCHEMA: &str = "cusped.stripmap";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("expected schema {expected} version {version}, found {found} version {found_version}")]
    Schema {
        expected: &'static str,
        version: u32,
        found: String,
        found_version: u32,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cusped(#[from] CuspedError),
    #[error("document does not match the complex rebuilt from its parameters: {0}")]
    Mismatch(String),
    #[error("cannot resolve vertex {text:?}: {reason}")]
    Vertex { text: String, reason: String },
    #[error("strip map: {0}")]
    StripMap(String),
}

/// Any output wrapped with its schema name, version and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: String,
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Document<T> {
    pub fn new(schema: &str, seed: Option<u64>, body: T) -> Self {
        Self {
            schema: schema.to_string(),
            schema_version: SCHEMA_VERSION,
            seed,
            body,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

#[derive(Deserialize)]
struct Header {
    schema: String,
    schema_version: u32,
}

/// Parses a document after checking its schema name and version.
pub fn read_document<T: serde::de::DeserializeOwned>(json: &str, expected: &'static str) -> Result<T, ExportError> {
    let h: Header = serde_json::from_str(json)?;
    if h.schema != expected || h.schema_version != SCHEMA_VERSION {
        return Err(ExportError::Schema {
            expected,
            version: SCHEMA_VERSION,
            found: h.schema,
            found_version: h.schema_version,
        });
    }
    let doc: Document<T> = serde_json::from_str(json)?;
    Ok(doc.body)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub label: String,
    pub kind: VertexKind,
    pub frontier: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub endpoints: [VertexId; 2],
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub id: FaceId,
    pub boundary: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
    pub kind: FaceKind,
}

/// Every cell of a complex, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub faces: Vec<FaceRecord>,
}

impl ComplexDocument {
    /// Uses `label` to name vertices; see [`vertex_label`].
    pub fn new(c: &Complex2, label: impl Fn(VertexId) -> String) -> Self {
        Self {
            vertices: c
                .vertices()
                .map(|(id, v)| VertexRecord {
                    id,
                    label: label(id),
                    kind: v.kind.clone(),
                    frontier: v.frontier,
                })
                .collect(),
            edges: c
                .edges()
                .map(|(id, e)| EdgeRecord {
                    id,
                    endpoints: e.endpoints,
                    kind: e.kind,
                })
                .collect(),
            faces: c
                .faces()
                .map(|(id, f)| FaceRecord {
                    id,
                    boundary: f.boundary.clone(),
                    vertices: f.vertices.clone(),
                    kind: f.kind,
                })
                .collect(),
        }
    }

    /// Rebuilds the complex; ids must be dense and in order.
    pub fn to_complex(&self) -> Result<Complex2, ExportError> {
        let mut b = ComplexBuilder::new();
        for (k, v) in self.vertices.iter().enumerate() {
            if v.id.index() != k {
                return Err(ExportError::Mismatch(format!("vertex ids are not dense at {}", v.id)));
            }
            b.add_vertex(v.kind.clone(), v.frontier);
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.id.index() != k {
                return Err(ExportError::Mismatch(format!("edge ids are not dense at {}", e.id)));
            }
            b.add_edge(e.endpoints[0], e.endpoints[1], e.kind)?;
        }
        for (k, f) in self.faces.iter().enumerate() {
            if f.id.index() != k {
                return Err(ExportError::Mismatch(format!("face ids are not dense at {}", f.id)));
            }
            b.add_face(f.boundary.clone(), f.kind)?;
        }
        let c = b.finish();
        for f in &self.faces {
            if c.face(f.id).vertices != f.vertices {
                return Err(ExportError::Mismatch(format!("vertex list of {}", f.id)));
            }
        }
        Ok(c)
    }
}

/// Readable vertex name: the normal form for group elements, `base@depth@coset` for
/// horoball vertices, `#id` otherwise.
pub fn vertex_label(x: &CuspedComplex, v: VertexId) -> String {
    match &x.complex.vertex(v).kind {
        VertexKind::Cayley { word } => x.presentation.render_word(word),
        VertexKind::Horo { coset, base, depth } => {
            let p = &x.presentation.peripherals[x.cosets[*coset].peripheral].name;
            format!("{}@{depth}@{p}", vertex_label(x, *base))
        }
        VertexKind::Abstract { .. } => format!("#{}", v.index()),
    }
}

/// Resolves a vertex name: `#id`, a word (`1` is the identity), `W@k` for depth `k`
/// above `W`, or `W@k@P` to pick peripheral `P` when `W` lies in several cosets.
pub fn resolve_vertex(x: &CuspedComplex, text: &str) -> Result<VertexId, ExportError> {
    let fail = |reason: String| ExportError::Vertex {
        text: text.to_string(),
        reason,
    };
    let text = text.trim();
    if let Some(id) = text.strip_prefix('#') {
        let k: usize = id.parse().map_err(|_| fail("bad vertex id".into()))?;
        let v = VertexId(k);
        return if x.complex.contains_vertex(v) {
            Ok(v)
        } else {
            Err(fail("no such vertex".into()))
        };
    }
    let mut parts = text.split('@');
    let word = parts.next().unwrap_or_default();
    let depth: u32 = match parts.next() {
        Some(d) => d.parse().map_err(|_| fail(format!("bad depth {d:?}")))?,
        None => 0,
    };
    let peripheral = parts.next();
    if parts.next().is_some() {
        return Err(fail("too many '@'".into()));
    }
    let p = &x.presentation;
    let w = p.parse_word(word).map_err(|e| fail(e.to_string()))?;
    let nf = p.normal_form(&w).map_err(|e| fail(e.to_string()))?;
    let base = x.find_word(&nf).ok_or_else(|| fail("element outside the ball".into()))?;
    if depth == 0 {
        return Ok(base);
    }
    if depth > x.depth_cap {
        return Err(fail(format!("depth above the cap {}", x.depth_cap)));
    }
    let candidates: Vec<usize> = match peripheral {
        Some(name) => {
            let i = p
                .peripherals
                .iter()
                .position(|q| q.name == name)
                .ok_or_else(|| fail(format!("unknown peripheral {name}")))?;
            vec![i]
        }
        None => (0..p.peripherals.len()).filter(|&i| x.coset_index_of(base, i).is_some()).collect(),
    };
    let i = match candidates[..] {
        [i] => i,
        [] => return Err(fail("not in any peripheral coset".into())),
        _ => return Err(fail("in several peripheral cosets; add @P".into())),
    };
    let coset = x.coset_index_of(base, i).ok_or_else(|| fail("not in that peripheral's coset".into()))?;
    let j = x.cosets[coset]
        .members
        .iter()
        .position(|&m| m == base)
        .expect("coset members include the vertex");
    Ok(x.horoballs[coset].vertex(j, depth))
}

/// Resolves a comma-separated vertex list.
pub fn resolve_vertices(x: &CuspedComplex, text: &str) -> Result<Vec<VertexId>, ExportError> {
    text.split(',').map(|t| resolve_vertex(x, t)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripImage {
    pub i: usize,
    pub j: usize,
    pub vertex: VertexId,
}

/// A strip map as its size and the image of every strip vertex `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripMapDocument {
    pub width: usize,
    pub height: usize,
    pub images: Vec<StripImage>,
}

impl StripMapDocument {
    pub fn new(m: &StripMap) -> Self {
        let s = &m.strip;
        Self {
            width: s.width,
            height: s.height,
            images: s
                .vertices()
                .map(|v| {
                    let (i, j) = s.coords(v);
                    StripImage { i, j, vertex: m.image(v) }
                })
                .collect(),
        }
    }

    pub fn to_strip_map(&self) -> Result<StripMap, ExportError> {
        if self.width == 0 || self.height == 0 {
            return Err(ExportError::StripMap("width and height must be positive".into()));
        }
        let strip = Strip::new(self.width, self.height);
        let mut images: Vec<Option<VertexId>> = vec![None; strip.vertex_count()];
        for im in &self.images {
            if im.i > self.width || im.j > self.height {
                return Err(ExportError::StripMap(format!("({}, {}) is off the strip", im.i, im.j)));
            }
            let slot = &mut images[strip.vertex(im.i, im.j).0];
            if slot.replace(im.vertex).is_some() {
                return Err(ExportError::StripMap(format!("({}, {}) listed twice", im.i, im.j)));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    let (i, j) = strip.coords(crate::excision::StripVertex(k));
                    ExportError::StripMap(format!("no image for ({i}, {j})"))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(StripMap::new(strip, images))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetRecord {
    pub peripheral: String,
    pub representative: VertexId,
    pub members: Vec<VertexId>,
}

/// A cusped space with the parameters that rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspedDocument {
    pub presentation: String,
    pub radius: u32,
    pub depth_cap: u32,
    pub summary: Summary,
    pub cosets: Vec<CosetRecord>,
    pub complex: ComplexDocument,
}

impl CuspedDocument {
    pub fn new(x: &CuspedComplex) -> Self {
        Self {
            presentation: x.presentation.to_text(),
            radius: x.radius,
            depth_cap: x.depth_cap,
            summary: x.summary(),
            cosets: x
                .cosets
                .iter()
                .map(|c| CosetRecord {
                    peripheral: x.presentation.peripherals[c.peripheral].name.clone(),
                    representative: c.representative,
                    members: c.members.clone(),
                })
                .collect(),
            complex: ComplexDocument::new(&x.complex, |v| vertex_label(x, v)),
        }
    }
}

pub fn cusped_json(x: &CuspedComplex) -> String {
    Document::new(CUSPED_SCHEMA, None, CuspedDocument::new(x)).to_json()
}

pub fn complex_json(c: &Complex2) -> String {
    Document::new(COMPLEX_SCHEMA, None, ComplexDocument::new(c, |v| format!("#{}", v.index()))).to_json()
}

/// Reads a cusped-space document by rebuilding from its parameters and checking that
/// the rebuilt complex is the recorded one.
pub fn load_cusped(json: &str, caps: &ResourceCaps) -> Result<CuspedComplex, ExportError> {
    let stored: CuspedDocument = read_document(json, CUSPED_SCHEMA)?;
    let p = parse_presentation(&stored.presentation).map_err(CuspedError::from)?;
    let x = build_cusped_space(&p, stored.radius, stored.depth_cap, caps)?;
    let rebuilt = CuspedDocument::new(&x);
    if rebuilt.complex.vertices.len() != stored.complex.vertices.len()
        || rebuilt.complex.edges.len() != stored.complex.edges.len()
        || rebuilt.complex.faces.len() != stored.complex.faces.len()
    {
        return Err(ExportError::Mismatch("cell counts differ".into()));
    }
    if rebuilt.complex != stored.complex {
        return Err(ExportError::Mismatch("cells differ".into()));
    }
    Ok(x)
}

/// Reads a bare complex document.
pub fn load_complex(json: &str) -> Result<Complex2, ExportError> {
    read_document::<ComplexDocument>(json, COMPLEX_SCHEMA)?.to_complex()
}

fn edge_style(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::Cayley { .. } => "solid",
        EdgeKind::HorizontalB1 | EdgeKind::HorizontalB2 { .. } => "dashed",
        EdgeKind::VerticalB3 => "dotted",
        EdgeKind::Abstract => "solid",
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The 1-skeleton in DOT. Vertices are `v<id>`; depth and frontier status are attributes.
pub fn to_dot(c: &Complex2, label: impl Fn(VertexId) -> String) -> String {
    let mut s = String::from("graph complex {\n");
    for (id, v) in c.vertices() {
        let _ = write!(s, "  {id} [label={}, depth={}", quote(&label(id)), c.depth(id));
        if v.frontier {
            s.push_str(", frontier=true, shape=box");
        }
        s.push_str("];\n");
    }
    for (id, e) in c.edges() {
        let kind = match e.kind {
            EdgeKind::Cayley { generator } => format!("cayley{generator}"),
            EdgeKind::HorizontalB1 => "b1".into(),
            EdgeKind::HorizontalB2 { level } => format!("b2_{level}"),
            EdgeKind::VerticalB3 => "b3".into(),
            EdgeKind::Abstract => "abstract".into(),
        };
        let _ = writeln!(
            s,
            "  {} -- {} [id={id}, kind={kind}, style={}];",
            e.endpoints[0],
            e.endpoints[1],
            edge_style(e.kind)
        );
    }
    s.push_str("}\n");
    s
}

pub fn cusped_dot(x: &CuspedComplex) -> String {
    to_dot(&x.complex, |v| vertex_label(x, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CuspedComplex {
        let p = parse_presentation("gens a,b\nrels\ngroup [free]\nperiph P: a [free]\n").unwrap();
        build_cusped_space(&p, 2, 2, &ResourceCaps::default()).unwrap()
    }

    #[test]
    fn json_is_deterministic_and_sorted() {
        let x = small();
        let a = cusped_json(&x);
        assert_eq!(a, cusped_json(&small()));
        let doc: Document<CuspedDocument> = serde_json::from_str(&a).unwrap();
        assert_eq!(doc.schema_version, SCHEMA_VERSION);
        let ids: Vec<usize> = doc.body.complex.vertices.iter().map(|v| v.id.index()).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cusped_document_reloads() {
        let x = small();
        let y = load_cusped(&cusped_json(&x), &ResourceCaps::default()).unwrap();
        assert_eq!(y.complex.vertex_count(), x.complex.vertex_count());
        assert_eq!(y.complex.face_count(), x.complex.face_count());
    }

    #[test]
    fn tampered_document_is_rejected() {
        let x = small();
        let mut doc = Document::new(CUSPED_SCHEMA, None, CuspedDocument::new(&x));
        doc.body.complex.vertices[1].frontier = !doc.body.complex.vertices[1].frontier;
        assert!(matches!(
            load_cusped(&doc.to_json(), &ResourceCaps::default()),
            Err(ExportError::Mismatch(_))
        ));
        let wrong = complex_json(&x.complex);
        assert!(matches!(load_cusped(&wrong, &ResourceCaps::default()), Err(ExportError::Schema { .. })));
    }

    #[test]
    fn complex_round_trips() {
        let x = small();
        let c = load_complex(&complex_json(&x.complex)).unwrap();
        assert_eq!(complex_json(&c), complex_json(&x.complex));
    }

    #[test]
    fn vertex_names_resolve() {
        let x = small();
        assert_eq!(resolve_vertex(&x, "1").unwrap(), x.basepoint());
        let b = resolve_vertex(&x, "b").unwrap();
        assert_eq!(vertex_label(&x, b), "b");
        let up = resolve_vertex(&x, "a@2").unwrap();
        assert_eq!(x.complex.depth(up), 2);
        assert_eq!(resolve_vertex(&x, &vertex_label(&x, up)).unwrap(), up);
        assert_eq!(resolve_vertex(&x, &format!("#{}", up.index())).unwrap(), up);
        for bad in ["a@3", "bbb", "a@1@Q", "#999999", "a@x"] {
            assert!(resolve_vertex(&x, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn strip_map_document_round_trips() {
        let x = small();
        let m = StripMap::constant(Strip::new(3, 2), x.basepoint());
        let doc = StripMapDocument::new(&m);
        assert_eq!(doc.to_strip_map().unwrap(), m);
        let mut short = doc.clone();
        short.images.pop();
        assert!(short.to_strip_map().is_err());
    }

    #[test]
    fn dot_lists_every_edge() {
        let x = small();
        let dot = cusped_dot(&x);
        assert!(dot.starts_with("graph complex {"));
        assert_eq!(dot.matches(" -- ").count(), x.complex.edge_count());
        assert!(dot.contains("label=\"1\""));
        assert!(dot.contains("@1@P"));
    }
}
