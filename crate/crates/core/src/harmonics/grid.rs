use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::legendre::{gauss_legendre, normalized_legendre, tri_index};
use crate::direction::Direction;
use crate::error::{Error, Result};

/// Identifies the grid a set of samples was taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "grid")]
pub enum GridTag {
    /// `n x n` equiangular grid, see [`build_raw_grid`].
    Raw { n: usize },
    /// `2n x 4n` Gauss-Legendre grid, see [`build_quadrature_grid`].
    Quadrature { n: usize },
}

impl GridTag {
    pub fn node_count(&self) -> usize {
        match *self {
            GridTag::Raw { n } => n * n,
            GridTag::Quadrature { n } => 8 * n * n,
        }
    }
}

pub trait SphericalGrid {
    fn tag(&self) -> GridTag;
    fn directions(&self) -> &[Direction];
}

/// Plain `n x n` latitude/longitude sample used by the raw feature vectors.
#[derive(Debug, Clone)]
pub struct RawGrid {
    n: usize,
    directions: Vec<Direction>,
}

impl SphericalGrid for RawGrid {
    fn tag(&self) -> GridTag {
        GridTag::Raw { n: self.n }
    }

    fn directions(&self) -> &[Direction] {
        &self.directions
    }
}

/// `theta_i = pi (2i + 1) / (2n)`, `phi_j = 2 pi j / n`, theta-major.
pub fn build_raw_grid(n: usize) -> RawGrid {
    assert!(n >= 1, "grid parameter must be positive");
    let directions = (0..n)
        .flat_map(|i| {
            let theta = PI * (2 * i + 1) as f64 / (2 * n) as f64;
            (0..n).map(move |j| Direction::from_spherical(theta, 2.0 * PI * j as f64 / n as f64))
        })
        .collect();
    RawGrid { n, directions }
}

/// Gauss-Legendre latitudes times uniform longitudes: `2n` rings of `4n`
/// nodes. Weights are normalized to the measure `dOmega / 4 pi`, and the rule
/// is exact for products of harmonics of degree at most `2n - 1`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    n: usize,
    directions: Vec<Direction>,
    weights: Vec<f64>,
    /// Per-ring weight; node weight is this divided by the ring size.
    ring_weights: Vec<f64>,
    /// Normalized Legendre table per ring, up to `max_band_limit`.
    legendre: Vec<Vec<f64>>,
    /// `cos(m phi_b)` and `sin(m phi_b)`, indexed `[b * (L + 1) + m]`.
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl SphericalGrid for QuadratureGrid {
    fn tag(&self) -> GridTag {
        GridTag::Quadrature { n: self.n }
    }

    fn directions(&self) -> &[Direction] {
        &self.directions
    }
}

impl QuadratureGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rings(&self) -> usize {
        2 * self.n
    }

    pub fn ring_size(&self) -> usize {
        4 * self.n
    }

    /// Highest degree the grid analyzes exactly.
    pub fn max_band_limit(&self) -> usize {
        2 * self.n - 1
    }

    pub(crate) fn ring_weight(&self, ring: usize) -> f64 {
        self.ring_weights[ring]
    }

    pub(crate) fn legendre(&self, ring: usize, k: usize, m: usize) -> f64 {
        self.legendre[ring][tri_index(k, m)]
    }

    pub(crate) fn trig(&self, b: usize, m: usize) -> (f64, f64) {
        let i = b * (self.max_band_limit() + 1) + m;
        (self.cos_table[i], self.sin_table[i])
    }

    /// `sum_nodes weight * value`, i.e. the mean of the function.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::SampleCount {
                expected: self.weights.len(),
                got: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }
}

pub fn build_quadrature_grid(n: usize) -> QuadratureGrid {
    assert!(n >= 1, "grid parameter must be positive");
    let (rings, ring_size) = (2 * n, 4 * n);
    let lmax = 2 * n - 1;
    let (nodes, gl_weights) = gauss_legendre(rings);
    let ring_weights: Vec<f64> = gl_weights.iter().map(|w| w / 2.0).collect();
    let phis: Vec<f64> = (0..ring_size)
        .map(|b| 2.0 * PI * b as f64 / ring_size as f64)
        .collect();

    let mut directions = Vec::with_capacity(rings * ring_size);
    let mut weights = Vec::with_capacity(rings * ring_size);
    for (x, rw) in nodes.iter().zip(&ring_weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for &phi in &phis {
            directions.push(Direction::from_spherical(theta, phi));
            weights.push(rw / ring_size as f64);
        }
    }
    let legendre = nodes.iter().map(|&x| normalized_legendre(lmax, x)).collect();
    let mut cos_table = Vec::with_capacity(ring_size * (lmax + 1));
    let mut sin_table = Vec::with_capacity(ring_size * (lmax + 1));
    for &phi in &phis {
        for m in 0..=lmax {
            let (s, c) = (m as f64 * phi).sin_cos();
            cos_table.push(c);
            sin_table.push(s);
        }
    }
    QuadratureGrid {
        n,
        directions,
        weights,
        ring_weights,
        legendre,
        cos_table,
        sin_table,
    }
}

/// Values of one function at every node of a tagged grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalSamples {
    tag: GridTag,
    values: Vec<f64>,
}

impl SphericalSamples {
    pub fn new(tag: GridTag, values: Vec<f64>) -> Result<Self> {
        if values.len() != tag.node_count() {
            return Err(Error::SampleCount {
                expected: tag.node_count(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SphericalSamples { tag, values })
    }

    pub fn tag(&self) -> GridTag {
        self.tag
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise mean of samples that share one grid.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a SphericalSamples>) -> Result<SphericalSamples> {
        let mut iter = items.into_iter();
        let first = iter.next().ok_or(Error::EmptyCurve)?;
        let mut acc = first.values.clone();
        let mut count = 1usize;
        for s in iter {
            if s.tag != first.tag {
                return Err(Error::GridMismatch);
            }
            for (a, v) in acc.iter_mut().zip(&s.values) {
                *a += v;
            }
            count += 1;
        }
        let count = count as f64;
        acc.iter_mut().for_each(|a| *a /= count);
        Ok(SphericalSamples {
            tag: first.tag,
            values: acc,
        })
    }
}
