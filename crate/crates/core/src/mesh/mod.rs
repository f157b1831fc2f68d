//! Indexed triangle meshes and per-face geometry.

mod hull;
mod io;

pub use hull::{convex_hull, ConvexPolytope, HullEdge, HullShape};
pub use io::{load_mesh, parse_mesh, write_obj, write_off, MeshFormat};

use nalgebra::{Rotation3, Vector3};

use crate::error::{Error, Result};

/// An indexed triangle soup. Counter-clockwise winding is taken as outward.
///
/// Duplicate vertices, non-manifold edges and zero-area faces are all
/// tolerated; every descriptor in this crate is defined on plain triangle
/// soup.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub(crate) vertices: Vec<Vector3<f64>>,
    pub(crate) faces: Vec<[usize; 3]>,
}

/// Unit normal and area of one triangle. The normal is zero when the area is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub unit_normal: Vector3<f64>,
    pub area: f64,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let n = vertices.len();
        for (line, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= n) {
                return Err(Error::Index {
                    line: line + 1,
                    index,
                    vertex_count: n,
                });
            }
        }
        Ok(TriMesh { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Twice-area-weighted normal of face `f`, i.e. the raw cross product.
    #[inline]
    fn cross(&self, f: &[usize; 3]) -> Vector3<f64> {
        let a = self.vertices[f[0]];
        (self.vertices[f[1]] - a).cross(&(self.vertices[f[2]] - a))
    }

    /// Per-face `area * unit_normal`, in face order.
    pub fn area_vectors(&self) -> Vec<Vector3<f64>> {
        self.faces.iter().map(|f| self.cross(f) * 0.5).collect()
    }

    /// Applies `map` to every vertex, keeping connectivity.
    pub fn map_vertices(&self, map: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(map).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn translated(&self, t: &Vector3<f64>) -> TriMesh {
        self.map_vertices(|v| v + t)
    }

    pub fn scaled(&self, s: f64) -> TriMesh {
        self.map_vertices(|v| v * s)
    }

    pub fn rotated(&self, r: &Rotation3<f64>) -> TriMesh {
        self.map_vertices(|v| r * v)
    }

    pub fn with_reversed_winding(&self) -> TriMesh {
        TriMesh {
            vertices: self.vertices.clone(),
            faces: self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    /// Disjoint union of two meshes.
    pub fn merged(&self, other: &TriMesh) -> TriMesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(
            other
                .faces
                .iter()
                .map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]),
        );
        TriMesh { vertices, faces }
    }

    pub fn centroid(&self) -> Vector3<f64> {
        self.vertices.iter().sum::<Vector3<f64>>() / self.vertices.len() as f64
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }
}

pub fn face_geometry(mesh: &TriMesh) -> Vec<FaceGeometry> {
    mesh.faces
        .iter()
        .map(|f| {
            let c = mesh.cross(f);
            let norm = c.norm();
            if norm > 0.0 {
                FaceGeometry {
                    unit_normal: c / norm,
                    area: 0.5 * norm,
                }
            } else {
                FaceGeometry {
                    unit_normal: Vector3::zeros(),
                    area: 0.0,
                }
            }
        })
        .collect()
}

/// Sum of triangle areas. Fails on a mesh with no faces.
pub fn total_area(mesh: &TriMesh) -> Result<f64> {
    if mesh.faces.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(mesh.faces.iter().map(|f| 0.5 * mesh.cross(f).norm()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_right_triangle() {
        let mesh = TriMesh::new(
            vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let g = face_geometry(&mesh);
        assert_eq!(g[0].area, 0.5);
        assert_eq!(g[0].unit_normal, Vector3::z());
    }

    #[test]
    fn degenerate_face_has_zero_normal() {
        let mesh = TriMesh::new(vec![Vector3::zeros(), Vector3::x()], vec![[0, 1, 1]]).unwrap();
        let g = face_geometry(&mesh);
        assert_eq!(g[0].area, 0.0);
        assert_eq!(g[0].unit_normal, Vector3::zeros());
        assert_eq!(total_area(&mesh).unwrap(), 0.0);
    }

    #[test]
    fn cube_area_is_six() {
        let cube = synth::unit_cube();
        assert_eq!(cube.face_count(), 12);
        let sum: f64 = face_geometry(&cube).iter().map(|g| g.area).sum();
        assert_relative_eq!(sum, 6.0, epsilon = 1e-12);
        assert_relative_eq!(total_area(&cube).unwrap(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn icosphere_area_approaches_sphere() {
        let sphere = synth::icosphere(3, 1.0);
        let area = total_area(&sphere).unwrap();
        let exact = 4.0 * std::f64::consts::PI;
        assert!((area - exact).abs() / exact < 0.01, "{area}");
    }

    #[test]
    fn no_faces_is_empty_mesh() {
        let mesh = TriMesh::new(vec![Vector3::zeros()], vec![]).unwrap();
        assert!(matches!(total_area(&mesh), Err(Error::EmptyMesh)));
        assert!(matches!(TriMesh::new(vec![], vec![]), Err(Error::EmptyMesh)));
    }

    #[test]
    fn out_of_range_face_rejected() {
        let err = TriMesh::new(vec![Vector3::zeros(); 3], vec![[0, 1, 3]]).unwrap_err();
        assert!(matches!(err, Error::Index { index: 3, .. }));
    }

    #[test]
    fn normals_are_unit() {
        for g in face_geometry(&synth::icosphere(2, 3.0)) {
            assert!((g.unit_normal.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reversed_winding_flips_normals() {
        let mesh = synth::random_convex_polytope(&mut synth::seeded_rng(3));
        let a = face_geometry(&mesh);
        let b = face_geometry(&mesh.with_reversed_winding());
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x.area, y.area, epsilon = 1e-14);
            assert_relative_eq!(x.unit_normal, -y.unit_normal, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn area_is_rigid_invariant_and_scales_quadratically(
            seed in 0u64..1000,
            scale in 0.1f64..10.0,
            axis in prop::array::uniform3(-1.0f64..1.0),
            angle in 0.0f64..std::f64::consts::TAU,
            shift in prop::array::uniform3(-50.0f64..50.0),
        ) {
            let mesh = synth::random_convex_polytope(&mut synth::seeded_rng(seed));
            let base = total_area(&mesh).unwrap();
            let rot = Rotation3::from_scaled_axis(Vector3::from(axis).normalize() * angle);
            let moved = mesh.rotated(&rot).translated(&Vector3::from(shift));
            prop_assert!((total_area(&moved).unwrap() - base).abs() <= 1e-12 * base * 10.0);
            let grown = total_area(&mesh.scaled(scale)).unwrap();
            prop_assert!((grown - scale * scale * base).abs() <= 1e-12 * grown * 10.0);
        }
    }
}
