//! Real spherical-harmonic analysis on Gauss-Legendre grids and the
//! per-degree energy and cross spectra.
//!
//! Harmonics are real and 4π-normalized with no Condon-Shortley phase:
//! `Y_{k,m} = P̄_k^m(cos θ) cos(mφ)` for `m >= 0` and
//! `Y_{k,-m} = P̄_k^m(cos θ) sin(mφ)`, with `(1/4π) ∫ Y_{k,m}^2 dΩ = 1`.
//! Under this convention the degree-`k` component `f_k` of a function has
//! `‖f_k‖² = Σ_m f_{k,m}²`.

mod closed_form;
mod grid;
mod legendre;

pub use closed_form::{abs_legendre_moments, area_coefficients, breadth_coefficients, harmonics_at};
pub use grid::{
    build_quadrature_grid, build_raw_grid, GridTag, QuadratureGrid, RawGrid, SphericalGrid,
    SphericalSamples,
};
pub use legendre::{gauss_legendre, normalized_legendre};

use crate::direction::Direction;
use crate::error::{Error, Result};
use legendre::tri_index;

/// Real harmonic coefficients `f_{k,m}` for `0 <= k <= L`, `-k <= m <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    band_limit: usize,
    coeffs: Vec<f64>,
}

impl ShCoefficients {
    pub fn zeros(band_limit: usize) -> Self {
        ShCoefficients {
            band_limit,
            coeffs: vec![0.0; (band_limit + 1) * (band_limit + 1)],
        }
    }

    pub(crate) fn from_vec(band_limit: usize, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), (band_limit + 1) * (band_limit + 1));
        ShCoefficients { band_limit, coeffs }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    /// Coefficient-wise mean; the expansion of the mean function.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a ShCoefficients>) -> Result<ShCoefficients> {
        let mut iter = items.into_iter();
        let first = iter.next().ok_or(Error::EmptyCurve)?;
        let mut sum = first.coeffs.clone();
        let mut count = 1usize;
        for c in iter {
            if c.band_limit != first.band_limit {
                return Err(Error::GridMismatch);
            }
            sum.iter_mut().zip(&c.coeffs).for_each(|(s, v)| *s += v);
            count += 1;
        }
        sum.iter_mut().for_each(|s| *s /= count as f64);
        Ok(ShCoefficients::from_vec(first.band_limit, sum))
    }

    #[inline]
    fn index(k: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= k);
        ((k * k + k) as i64 + m) as usize
    }

    pub fn get(&self, k: usize, m: i64) -> f64 {
        self.coeffs[Self::index(k, m)]
    }

    pub fn set(&mut self, k: usize, m: i64, value: f64) {
        let i = Self::index(k, m);
        self.coeffs[i] = value;
    }

    /// The `2k + 1` coefficients of degree `k`, ordered `m = -k..=k`.
    pub fn degree(&self, k: usize) -> &[f64] {
        &self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// `‖f_k‖` for every degree `0..=L`.
    pub fn energies(&self) -> Vec<f64> {
        (0..=self.band_limit)
            .map(|k| self.degree(k).iter().map(|c| c * c).sum::<f64>().sqrt())
            .collect()
    }

    /// `‖f‖` of the truncated expansion, by Parseval.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A single real harmonic evaluated at `u`.
pub fn spherical_harmonic(k: usize, m: i64, u: &Direction) -> f64 {
    let v = u.as_vector();
    let x = v.z.clamp(-1.0, 1.0);
    let phi = v.y.atan2(v.x);
    let mu = m.unsigned_abs() as usize;
    let p = normalized_legendre(k, x)[tri_index(k, mu)];
    if m >= 0 {
        p * (mu as f64 * phi).cos()
    } else {
        p * (mu as f64 * phi).sin()
    }
}

fn check_samples(samples: &SphericalSamples, grid: &QuadratureGrid) -> Result<()> {
    if samples.tag() != grid.tag() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Projects quadrature-grid samples onto harmonics of degree `<= band_limit`.
/// Exact when the sampled function is band-limited to `band_limit`.
pub fn analyze(
    samples: &SphericalSamples,
    grid: &QuadratureGrid,
    band_limit: usize,
) -> Result<ShCoefficients> {
    check_samples(samples, grid)?;
    if band_limit > grid.max_band_limit() {
        return Err(Error::BandLimitTooHigh {
            requested: band_limit,
            max: grid.max_band_limit(),
        });
    }
    let ring_size = grid.ring_size();
    let values = samples.values();
    let mut out = ShCoefficients::zeros(band_limit);
    let mut cos_sums = vec![0.0; band_limit + 1];
    let mut sin_sums = vec![0.0; band_limit + 1];
    for ring in 0..grid.rings() {
        let row = &values[ring * ring_size..(ring + 1) * ring_size];
        cos_sums.iter_mut().for_each(|c| *c = 0.0);
        sin_sums.iter_mut().for_each(|s| *s = 0.0);
        for (b, &v) in row.iter().enumerate() {
            for m in 0..=band_limit {
                let (c, s) = grid.trig(b, m);
                cos_sums[m] += v * c;
                sin_sums[m] += v * s;
            }
        }
        let w = grid.ring_weight(ring) / ring_size as f64;
        for k in 0..=band_limit {
            for m in 0..=k {
                let p = w * grid.legendre(ring, k, m);
                out.coeffs[ShCoefficients::index(k, m as i64)] += p * cos_sums[m];
                if m > 0 {
                    out.coeffs[ShCoefficients::index(k, -(m as i64))] += p * sin_sums[m];
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates the expansion at every node of `grid`.
pub fn synthesize(coeffs: &ShCoefficients, grid: &QuadratureGrid) -> Result<SphericalSamples> {
    let band_limit = coeffs.band_limit;
    if band_limit > grid.max_band_limit() {
        return Err(Error::BandLimitTooHigh {
            requested: band_limit,
            max: grid.max_band_limit(),
        });
    }
    let ring_size = grid.ring_size();
    let mut values = Vec::with_capacity(grid.rings() * ring_size);
    let mut cos_part = vec![0.0; band_limit + 1];
    let mut sin_part = vec![0.0; band_limit + 1];
    for ring in 0..grid.rings() {
        for m in 0..=band_limit {
            cos_part[m] = (m..=band_limit)
                .map(|k| grid.legendre(ring, k, m) * coeffs.get(k, m as i64))
                .sum();
            sin_part[m] = if m == 0 {
                0.0
            } else {
                (m..=band_limit)
                    .map(|k| grid.legendre(ring, k, m) * coeffs.get(k, -(m as i64)))
                    .sum()
            };
        }
        for b in 0..ring_size {
            let v: f64 = (0..=band_limit)
                .map(|m| {
                    let (c, s) = grid.trig(b, m);
                    cos_part[m] * c + sin_part[m] * s
                })
                .sum();
            values.push(v);
        }
    }
    SphericalSamples::new(grid.tag(), values)
}

/// `‖f_k‖ = sqrt(Σ_m f_{k,m}²)`.
pub fn degree_energy(coeffs: &ShCoefficients, k: usize) -> Result<f64> {
    if k > coeffs.band_limit {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            band_limit: coeffs.band_limit,
        });
    }
    Ok(coeffs.degree(k).iter().map(|c| c * c).sum::<f64>().sqrt())
}

/// `<f_k, g_k> = Σ_m f_{k,m} g_{k,m}`.
pub fn degree_cross(a: &ShCoefficients, b: &ShCoefficients, k: usize) -> Result<f64> {
    let limit = a.band_limit.min(b.band_limit);
    if k > limit {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            band_limit: limit,
        });
    }
    Ok(a.degree(k).iter().zip(b.degree(k)).map(|(x, y)| x * y).sum())
}
