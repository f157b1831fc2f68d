//! Convex hulls of vertex sets, as needed by the breadth function.

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use parry3d_f64::transformation::try_convex_hull;

use crate::error::{Error, Result};

/// Relative tolerance below which a point set counts as collinear.
const COLLINEAR_TOL: f64 = 1e-12;

/// Hull of a point set, by dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum HullShape {
    Point(Vector3<f64>),
    Segment(Vector3<f64>, Vector3<f64>),
    /// A solid or a flat polygon; flat hulls are two-sided triangulations.
    Polytope(ConvexPolytope),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[usize; 3]>,
}

/// An edge of a polytope with the outward unit normals of its two faces.
/// `outward` points from the hull centroid towards the edge, orthogonal to
/// it, and picks the side of the normal arc when the normals are opposite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullEdge {
    pub length: f64,
    pub normals: [Vector3<f64>; 2],
    pub outward: Vector3<f64>,
}

impl ConvexPolytope {
    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edges shared by two non-degenerate hull triangles.
    pub fn edges(&self) -> Vec<HullEdge> {
        let v = &self.vertices;
        let centroid = v.iter().sum::<Vector3<f64>>() / v.len() as f64;
        let mut by_edge: BTreeMap<(usize, usize), Vec<Vector3<f64>>> = BTreeMap::new();
        for t in &self.triangles {
            let n = (v[t[1]] - v[t[0]]).cross(&(v[t[2]] - v[t[0]]));
            let len = n.norm();
            if !(len > 0.0) {
                continue;
            }
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(n / len);
            }
        }
        by_edge
            .into_iter()
            .filter(|(_, normals)| normals.len() == 2)
            .map(|((a, b), normals)| {
                let dir = v[b] - v[a];
                let length = dir.norm();
                let e = dir / length;
                let mid = 0.5 * (v[a] + v[b]) - centroid;
                HullEdge {
                    length,
                    normals: [normals[0], normals[1]],
                    outward: mid - e * e.dot(&mid),
                }
            })
            .collect()
    }
}

/// Convex hull of `points`, which must be nonempty.
pub fn convex_hull(points: &[Vector3<f64>]) -> Result<HullShape> {
    let first = *points.first().ok_or(Error::EmptyMesh)?;
    let far = points
        .iter()
        .copied()
        .max_by(|a, b| (a - first).norm_squared().total_cmp(&(b - first).norm_squared()))
        .unwrap();
    let span = (far - first).norm();
    if span == 0.0 {
        return Ok(HullShape::Point(first));
    }
    let d = (far - first) / span;
    let off_line = points
        .iter()
        .map(|p| {
            let r = p - first;
            (r - d * d.dot(&r)).norm()
        })
        .fold(0.0, f64::max);
    if off_line <= COLLINEAR_TOL * span {
        let t = |p: &Vector3<f64>| d.dot(&(p - first));
        let lo = points.iter().min_by(|a, b| t(a).total_cmp(&t(b))).unwrap();
        let hi = points.iter().max_by(|a, b| t(a).total_cmp(&t(b))).unwrap();
        return Ok(HullShape::Segment(*lo, *hi));
    }
    let pts: Vec<Point3<f64>> = points.iter().map(|p| Point3::from(*p)).collect();
    let (vertices, triangles) = try_convex_hull(&pts)
        .map_err(|e| Error::InvalidParameter(format!("convex hull failed: {e:?}")))?;
    Ok(HullShape::Polytope(ConvexPolytope {
        vertices: vertices.into_iter().map(|p| p.coords).collect(),
        triangles: triangles
            .into_iter()
            .map(|t| [t[0] as usize, t[1] as usize, t[2] as usize])
            .collect(),
    }))
}
