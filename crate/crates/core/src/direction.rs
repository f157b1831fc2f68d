use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// A unit vector on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Normalizes `v`; returns `None` for the zero vector or non-finite input.
    pub fn new(v: Vector3<f64>) -> Option<Self> {
        let norm = v.norm();
        if norm > 0.0 && norm.is_finite() {
            Some(Direction(v / norm))
        } else {
            None
        }
    }

    /// Polar angle `theta` measured from +z, azimuth `phi` from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction(Vector3::new(st * cp, st * sp, ct))
    }

    pub fn x() -> Self {
        Direction(Vector3::x())
    }

    pub fn y() -> Self {
        Direction(Vector3::y())
    }

    pub fn z() -> Self {
        Direction(Vector3::z())
    }

    #[inline]
    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    #[inline]
    pub fn dot(&self, v: &Vector3<f64>) -> f64 {
        self.0.dot(v)
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

impl From<Direction> for Vector3<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}
