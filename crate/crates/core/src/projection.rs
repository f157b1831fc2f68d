//! Breadth, support and weighted-area functions of a mesh, the
//! percentile (Q-)breadth, and the extended Gaussian image.
//!
//! All functions are even in the direction except [`support`]. Breadth and
//! Q-breadth depend only on vertex positions; the weighted area depends only
//! on the per-face area vectors.

use nalgebra::Vector3;

pub use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::harmonics::{SphericalGrid, SphericalSamples};
use crate::mesh::TriMesh;

/// Which spherical function of a mesh to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphericalFunction {
    Breadth,
    Area,
    /// Breadth built from the given percentile instead of min/max.
    QBreadth(f64),
}

/// Per-mesh precomputation for repeated direction queries: vertex
/// coordinates split by axis and the per-face area vectors.
#[derive(Debug, Clone)]
pub struct Projector {
    xs: Vec<f64>,
    ys: Vec<f64>,
    zs: Vec<f64>,
    area_vectors: Vec<Vector3<f64>>,
}

impl Projector {
    pub fn new(mesh: &TriMesh) -> Self {
        let v = mesh.vertices();
        Projector {
            xs: v.iter().map(|p| p.x).collect(),
            ys: v.iter().map(|p| p.y).collect(),
            zs: v.iter().map(|p| p.z).collect(),
            area_vectors: mesh
                .area_vectors()
                .into_iter()
                .filter(|a| a.norm_squared() > 0.0)
                .collect(),
        }
    }

    fn check_vertices(&self) -> Result<()> {
        if self.xs.is_empty() {
            Err(Error::EmptyMesh)
        } else {
            Ok(())
        }
    }

    #[inline]
    fn projections(&self, u: &Direction) -> impl Iterator<Item = f64> + '_ {
        let (a, b, c) = (u.as_vector().x, u.as_vector().y, u.as_vector().z);
        self.xs
            .iter()
            .zip(&self.ys)
            .zip(&self.zs)
            .map(move |((x, y), z)| a * x + b * y + c * z)
    }

    /// `(min, max)` of `u . x` over the vertices.
    fn extent(&self, u: &Direction) -> (f64, f64) {
        self.projections(u)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p), hi.max(p))
            })
    }

    pub fn support(&self, u: &Direction) -> Result<f64> {
        self.check_vertices()?;
        Ok(self.extent(u).1)
    }

    pub fn breadth(&self, u: &Direction) -> Result<f64> {
        self.check_vertices()?;
        let (lo, hi) = self.extent(u);
        Ok(hi - lo)
    }

    /// `buf` is scratch space reused across calls.
    pub fn percentile_breadth(&self, u: &Direction, lambda: f64, buf: &mut Vec<f64>) -> Result<f64> {
        self.check_vertices()?;
        check_lambda(lambda)?;
        buf.clear();
        buf.extend(self.projections(u));
        let top = (buf.len() - 1) as f64;
        let rank = lambda * top / 100.0;
        let high = interpolated_order_statistic(buf, rank);
        let low = interpolated_order_statistic(buf, top - rank);
        // h(u) + h(-u), where the percentile of -projections at `rank` is
        // minus the order statistic at `top - rank`.
        Ok(high - low)
    }

    pub fn weighted_area(&self, u: &Direction) -> Result<f64> {
        if self.area_vectors.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let u = u.as_vector();
        Ok(self.area_vectors.iter().map(|a| u.dot(a).abs()).sum())
    }

    pub fn evaluate(&self, u: &Direction, which: SphericalFunction, buf: &mut Vec<f64>) -> Result<f64> {
        match which {
            SphericalFunction::Breadth => self.breadth(u),
            SphericalFunction::Area => self.weighted_area(u),
            SphericalFunction::QBreadth(lambda) => self.percentile_breadth(u, lambda, buf),
        }
    }

    /// Evaluates `which` at every direction, in order.
    pub fn sample(&self, directions: &[Direction], which: SphericalFunction) -> Result<Vec<f64>> {
        let mut buf = Vec::new();
        directions
            .iter()
            .map(|u| self.evaluate(u, which, &mut buf))
            .collect()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 100.0 {
        Ok(())
    } else {
        Err(Error::BadLambda(lambda))
    }
}

/// Linear interpolation between order statistics at fractional `rank`
/// (0 = min, len-1 = max). Reorders `values`.
fn interpolated_order_statistic(values: &mut [f64], rank: f64) -> f64 {
    let last = values.len() - 1;
    let rank = rank.clamp(0.0, last as f64);
    let lo = (rank.floor() as usize).min(last);
    let frac = rank - lo as f64;
    let (_, &mut lower, rest) = values.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || rest.is_empty() {
        return lower;
    }
    let upper = rest.iter().copied().fold(f64::INFINITY, f64::min);
    lower + frac * (upper - lower)
}

/// `max_x u . x` over the mesh vertices.
pub fn support(mesh: &TriMesh, u: &Direction) -> Result<f64> {
    Projector::new(mesh).support(u)
}

/// Length of the projection of the mesh onto the line spanned by `u`.
pub fn breadth(mesh: &TriMesh, u: &Direction) -> Result<f64> {
    Projector::new(mesh).breadth(u)
}

/// `h_lambda(u) + h_lambda(-u)`, where `h_lambda` is the `lambda`-th
/// percentile of the vertex projections (linear interpolation at rank
/// `lambda * (N - 1) / 100`). `lambda = 100` gives [`breadth`].
///
/// Not invariant under re-triangulation for `lambda < 100`, and for
/// `lambda < 50` the result may be negative.
pub fn percentile_breadth(mesh: &TriMesh, u: &Direction, lambda: f64) -> Result<f64> {
    Projector::new(mesh).percentile_breadth(u, lambda, &mut Vec::new())
}

/// `sum_i |u . n_i| area(T_i)`: area of the projection onto the plane
/// orthogonal to `u`, counted with multiplicity.
pub fn weighted_area(mesh: &TriMesh, u: &Direction) -> Result<f64> {
    Projector::new(mesh).weighted_area(u)
}

/// Samples `which` on every node of `grid`.
pub fn sample_on_grid<G: SphericalGrid + ?Sized>(
    mesh: &TriMesh,
    grid: &G,
    which: SphericalFunction,
) -> Result<SphericalSamples> {
    let values = Projector::new(mesh).sample(grid.directions(), which)?;
    SphericalSamples::new(grid.tag(), values)
}

/// Extended Gaussian image: one atom per positive-area face, placing the
/// face area at its unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Egi {
    atoms: Vec<(Direction, f64)>,
}

impl Egi {
    pub fn atoms(&self) -> &[(Direction, f64)] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Collapses atoms whose normals agree within `tol` (Euclidean).
    pub fn merged(&self, tol: f64) -> Egi {
        let mut out: Vec<(Direction, f64)> = Vec::new();
        for &(n, w) in &self.atoms {
            match out
                .iter_mut()
                .find(|(m, _)| (m.as_vector() - n.as_vector()).norm() <= tol)
            {
                Some((_, acc)) => *acc += w,
                None => out.push((n, w)),
            }
        }
        Egi { atoms: out }
    }

    /// `integral |u . n| d mu(n)`; agrees with [`weighted_area`].
    pub fn weighted_area(&self, u: &Direction) -> f64 {
        self.atoms.iter().map(|(n, w)| u.dot(n.as_vector()).abs() * w).sum()
    }
}

pub fn egi(mesh: &TriMesh) -> Result<Egi> {
    let atoms: Vec<_> = mesh
        .area_vectors()
        .into_iter()
        .filter_map(|a| {
            let area = a.norm();
            (area > 0.0).then(|| (Direction::new(a).expect("positive area"), area))
        })
        .collect();
    if atoms.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(Egi { atoms })
}
