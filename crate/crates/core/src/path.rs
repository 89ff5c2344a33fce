//! Edge paths in a 2-complex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, EdgeId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("edge {edge} does not leave {at}")]
    NotIncident { edge: EdgeId, at: VertexId },
    #[error("empty vertex sequence")]
    Empty,
}

/// `vertices.len() == edges.len() + 1`; `edges[i]` joins `vertices[i]` and `vertices[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgePath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl EdgePath {
    pub fn point(v: VertexId) -> Self {
        Self {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    /// Joins consecutive vertices by their lowest-id edge.
    pub fn from_vertices(c: &Complex2, vertices: &[VertexId]) -> Result<Self, PathError> {
        let first = *vertices.first().ok_or(PathError::Empty)?;
        let mut p = Self::point(first);
        for w in vertices.windows(2) {
            let e = c.edge_between(w[0], w[1]).ok_or(PathError::NotAdjacent(w[0], w[1]))?;
            p.edges.push(e);
            p.vertices.push(w[1]);
        }
        Ok(p)
    }

    /// Follows `edges` from `start`.
    pub fn from_edges(c: &Complex2, start: VertexId, edges: &[EdgeId]) -> Result<Self, PathError> {
        let mut p = Self::point(start);
        for &e in edges {
            p.push(c, e)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, c: &Complex2, e: EdgeId) -> Result<(), PathError> {
        let at = self.end();
        let next = c.edge(e).other(at).ok_or(PathError::NotIncident { edge: e, at })?;
        self.edges.push(e);
        self.vertices.push(next);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("paths have a vertex")
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn reversed(&self) -> Self {
        Self {
            vertices: self.vertices.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &EdgePath) -> Self {
        assert_eq!(self.end(), other.start(), "paths do not meet");
        let mut p = self.clone();
        p.vertices.extend_from_slice(&other.vertices[1..]);
        p.edges.extend_from_slice(&other.edges);
        p
    }

    /// Sub-path covering edges `from..to`.
    pub fn slice(&self, from: usize, to: usize) -> Self {
        Self {
            vertices: self.vertices[from..=to].to_vec(),
            edges: self.edges[from..to].to_vec(),
        }
    }

    /// Checks consecutive incidence against `c`.
    pub fn is_valid(&self, c: &Complex2) -> bool {
        self.vertices.len() == self.edges.len() + 1
            && self
                .edges
                .iter()
                .enumerate()
                .all(|(i, &e)| c.edge(e).other(self.vertices[i]) == Some(self.vertices[i + 1]))
    }
}
