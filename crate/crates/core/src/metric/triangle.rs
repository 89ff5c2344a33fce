use std::fmt;

use serde::Serialize;

use crate::complex::{EdgeId, VertexId};
use crate::path::EdgePath;

use super::MetricError;

/// A multiple of ½, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_twice(t: i64) -> Self {
        Self(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.floor())
        }
    }
}

/// A point on an edge path at half-integer resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PathPoint {
    Vertex(VertexId),
    Midpoint(EdgeId),
}

/// Point at parameter `t` (from the start) of `path`.
pub fn point_at(path: &EdgePath, t: HalfInt) -> PathPoint {
    let i = t.floor() as usize;
    if t.is_integer() {
        PathPoint::Vertex(path.vertices[i])
    } else {
        PathPoint::Midpoint(path.edges[i])
    }
}

/// Three corners joined by geodesic sides; `sides[i]` is opposite `corners[i]`
/// and runs `corners[i+1] → corners[i+2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicTriangle {
    pub corners: [VertexId; 3],
    pub sides: [EdgePath; 3],
    /// `params[i]`: distance from `corners[i]` to both internal points on its adjacent sides.
    pub params: [HalfInt; 3],
    /// `internal[i]` lies on `sides[i]`.
    pub internal: [PathPoint; 3],
}

impl GeodesicTriangle {
    pub fn side_lengths(&self) -> [usize; 3] {
        [self.sides[0].len(), self.sides[1].len(), self.sides[2].len()]
    }
}

/// Computes the internal points of a geodesic triangle.
pub fn internal_points(corners: [VertexId; 3], sides: [EdgePath; 3]) -> Result<GeodesicTriangle, MetricError> {
    for i in 0..3 {
        let (from, to) = (corners[(i + 1) % 3], corners[(i + 2) % 3]);
        if sides[i].start() != from || sides[i].end() != to {
            return Err(MetricError::SideMismatch { side: i });
        }
    }
    let len = [sides[0].len(), sides[1].len(), sides[2].len()];
    let l = len.map(|x| x as i64);
    // Twice the parameter at corner i: the two adjacent sides minus the opposite one.
    let twice: [i64; 3] = [0, 1, 2].map(|i| l[(i + 1) % 3] + l[(i + 2) % 3] - l[i]);
    if twice.iter().any(|&t| t < 0) {
        return Err(MetricError::TriangleInequality(len));
    }
    let params = twice.map(HalfInt);
    // sides[i] starts at corners[i+1], whose parameter is params[i+1].
    let internal = [0, 1, 2].map(|i| point_at(&sides[i], params[(i + 1) % 3]));
    Ok(GeodesicTriangle {
        corners,
        sides,
        params,
        internal,
    })
}
