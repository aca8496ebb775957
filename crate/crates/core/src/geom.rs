//! 2D workspace geometry: simple polygons, point containment, segment
//! intersection. Boundary contact always counts as a collision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Slack for on-boundary tests. Coordinates in this crate are desk-scale
/// (order 1..100), so an absolute epsilon is adequate.
const GEOM_EPS: f64 = 1e-12;

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// True if `p` lies on the closed segment `a`..`b`.
pub fn point_on_segment(p: Point, a: Point, b: Point) -> bool {
    if cross(a, b, p).abs() > GEOM_EPS * (1.0 + a[0].abs() + a[1].abs() + b[0].abs() + b[1].abs()) {
        return false;
    }
    p[0] >= a[0].min(b[0]) - GEOM_EPS
        && p[0] <= a[0].max(b[0]) + GEOM_EPS
        && p[1] >= a[1].min(b[1]) - GEOM_EPS
        && p[1] <= a[1].max(b[1]) + GEOM_EPS
}

/// Closed-segment intersection test; touching endpoints and collinear
/// overlap both count as intersecting.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    point_on_segment(a1, b1, b2)
        || point_on_segment(a2, b1, b2)
        || point_on_segment(b1, a1, a2)
        || point_on_segment(b2, a1, a2)
}

/// A simple (non-self-intersecting) polygon given by its vertex loop.
/// The closing edge from the last vertex back to the first is implicit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "polygon",
                message: format!("needs at least 3 vertices, got {}", vertices.len()),
            });
        }
        for v in &vertices {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidParameter {
                    name: "polygon",
                    message: "non-finite vertex coordinate".into(),
                });
            }
        }
        let poly = Polygon { vertices };
        if !poly.is_simple() {
            return Err(Error::InvalidParameter {
                name: "polygon",
                message: "polygon is self-intersecting".into(),
            });
        }
        Ok(poly)
    }

    /// Convenience constructor for an axis-aligned box.
    pub fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Polygon {
            vertices: vec![[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn is_simple(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                // Adjacent edges share exactly one endpoint; skip them
                // (wrap-around pair included).
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return false;
                }
            }
        }
        true
    }

    /// Even-odd containment; points exactly on the boundary count as inside.
    pub fn contains(&self, p: Point) -> bool {
        for (a, b) in self.edges() {
            if point_on_segment(p, a, b) {
                return true;
            }
        }
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi[1] > p[1]) != (vj[1] > p[1])
                && p[0] < (vj[0] - vi[0]) * (p[1] - vi[1]) / (vj[1] - vi[1]) + vi[0]
            {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// True if the closed segment touches or enters the polygon.
    pub fn hits_segment(&self, a: Point, b: Point) -> bool {
        if self.contains(a) || self.contains(b) {
            return true;
        }
        self.edges().any(|(p, q)| segments_intersect(a, b, p, q))
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}
