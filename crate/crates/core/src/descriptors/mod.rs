//! Feature vectors built from the breadth and weighted-area functions.
//!
//! Raw kinds (`Areas`, `Breadths`, `AreasBreadths`) are the function values
//! on an `n x n` grid and are only translation-invariant. Spectral kinds are
//! built from the even-degree energies `α_k = ‖A_{2k}‖`, `β_k = ‖b_{2k}‖` and
//! cross terms `γ_k = <A_{2k}, b_{2k}>`, normalized by the total norms and
//! passed through `x ↦ -1/ln x`, which makes them similarity-invariant.

mod persist;

pub use persist::{decode_binary, encode_binary, CurvePoint, CurveRecord, DescriptorRecord, FeatureRecord, BINARY_MAGIC, BINARY_VERSION};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{
    analyze, area_coefficients, breadth_coefficients, build_quadrature_grid, build_raw_grid, QuadratureGrid, RawGrid,
    ShCoefficients, SphericalGrid, SphericalSamples,
};
use crate::mesh::TriMesh;
use crate::projection::{Projector, SphericalFunction};

/// Grid parameter used throughout unless overridden.
pub const DEFAULT_N: usize = 8;
/// Percentile of the Q-breadth.
pub const DEFAULT_LAMBDA: f64 = 75.0;

/// Largest input accepted by [`log_stabilize`] before clamping.
const LOG_CLAMP_HIGH: f64 = 1.0 - 1e-9;
const LOG_CLAMP_LOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescriptorKind {
    Areas,
    Breadths,
    AreasBreadths,
    AreaSpectrum,
    BreadthSpectrum,
    ShapeInvariant,
    QBreadthSpectrum,
    QShapeInvariant,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 8] = [
        DescriptorKind::Areas,
        DescriptorKind::Breadths,
        DescriptorKind::AreasBreadths,
        DescriptorKind::AreaSpectrum,
        DescriptorKind::BreadthSpectrum,
        DescriptorKind::ShapeInvariant,
        DescriptorKind::QBreadthSpectrum,
        DescriptorKind::QShapeInvariant,
    ];

    /// Raw kinds sample on the `n x n` grid; the rest on the quadrature grid.
    pub fn is_raw(self) -> bool {
        matches!(
            self,
            DescriptorKind::Areas | DescriptorKind::Breadths | DescriptorKind::AreasBreadths
        )
    }

    pub fn uses_percentile(self) -> bool {
        matches!(
            self,
            DescriptorKind::QBreadthSpectrum | DescriptorKind::QShapeInvariant
        )
    }

    fn needs_area(self) -> bool {
        !matches!(
            self,
            DescriptorKind::Breadths | DescriptorKind::BreadthSpectrum | DescriptorKind::QBreadthSpectrum
        )
    }

    fn needs_breadth(self) -> bool {
        !matches!(self, DescriptorKind::Areas | DescriptorKind::AreaSpectrum)
    }

    pub fn len(self, n: usize) -> usize {
        match self {
            DescriptorKind::Areas | DescriptorKind::Breadths => n * n,
            DescriptorKind::AreasBreadths => 2 * n * n,
            DescriptorKind::AreaSpectrum
            | DescriptorKind::BreadthSpectrum
            | DescriptorKind::QBreadthSpectrum => n,
            DescriptorKind::ShapeInvariant | DescriptorKind::QShapeInvariant => 3 * n,
        }
    }

    pub fn code(self) -> u8 {
        DescriptorKind::ALL.iter().position(|&k| k == self).unwrap() as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        DescriptorKind::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Areas => "areas",
            DescriptorKind::Breadths => "breadths",
            DescriptorKind::AreasBreadths => "areas-breadths",
            DescriptorKind::AreaSpectrum => "area-spectrum",
            DescriptorKind::BreadthSpectrum => "breadth-spectrum",
            DescriptorKind::ShapeInvariant => "shape-invariant",
            DescriptorKind::QBreadthSpectrum => "q-breadth-spectrum",
            DescriptorKind::QShapeInvariant => "q-shape-invariant",
        }
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let kind = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "areas" => DescriptorKind::Areas,
            "breadths" => DescriptorKind::Breadths,
            "areas-breadths" | "areas-and-breadths" => DescriptorKind::AreasBreadths,
            "area-spectrum" => DescriptorKind::AreaSpectrum,
            "breadth-spectrum" => DescriptorKind::BreadthSpectrum,
            "shape" | "shape-invariant" => DescriptorKind::ShapeInvariant,
            "q-breadth-spectrum" => DescriptorKind::QBreadthSpectrum,
            "q-shape" | "q-shape-invariant" => DescriptorKind::QShapeInvariant,
            other => return Err(format!("unknown descriptor kind {other:?}")),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorParams {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl DescriptorParams {
    /// Parameters for `kind`; `lambda` is kept only for percentile kinds.
    pub fn for_kind(kind: DescriptorKind, n: usize, lambda: f64) -> Self {
        DescriptorParams {
            n,
            lambda: kind.uses_percentile().then_some(lambda),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorVector {
    pub kind: DescriptorKind,
    pub params: DescriptorParams,
    pub values: Vec<f64>,
}

impl DescriptorVector {
    pub fn euclidean_distance(&self, other: &DescriptorVector) -> Result<f64> {
        if self.kind != other.kind || self.values.len() != other.values.len() {
            return Err(Error::KindMismatch(format!(
                "{} ({}) vs {} ({})",
                self.kind,
                self.values.len(),
                other.kind,
                other.values.len()
            )));
        }
        Ok(euclidean(&self.values, &other.values))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Rows `(α^s_k, β^s_k, γ^s_k)` for `k = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeInvariantMatrix {
    rows: Vec<[f64; 3]>,
}

impl ShapeInvariantMatrix {
    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    /// Row-major flattening, length `3n`.
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Which breadth function feeds the spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreadthVariant {
    Standard,
    Percentile(f64),
}

/// Even-degree energies and cross terms, plus the total norms of both
/// functions over every analyzed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSpectra {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub norm_area: f64,
    pub norm_breadth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpectra {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// `x ↦ -1/ln x`, with `0 ↦ 0`. Inputs are clamped to
/// `[1e-300, 1 - 1e-9]` so the map stays finite and nondecreasing.
pub fn log_stabilize(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::NegativeInput(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(-1.0 / x.clamp(LOG_CLAMP_LOW, LOG_CLAMP_HIGH).ln())
}

/// Divides the spectra by the total norms. The cross sequence becomes
/// `γ'_k = ‖A_{2k}/‖A‖ + b_{2k}/‖b‖‖`, expanded algebraically.
pub fn normalize_spectra(
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
    norm_area: f64,
    norm_breadth: f64,
) -> Result<NormalizedSpectra> {
    if !(norm_area > 0.0 && norm_breadth > 0.0) {
        return Err(Error::DegenerateNorm);
    }
    let alpha: Vec<f64> = alpha.iter().map(|a| a / norm_area).collect();
    let beta: Vec<f64> = beta.iter().map(|b| b / norm_breadth).collect();
    let gamma = alpha
        .iter()
        .zip(&beta)
        .zip(gamma)
        .map(|((a, b), g)| {
            (a * a + b * b + 2.0 * g / (norm_area * norm_breadth))
                .max(0.0)
                .sqrt()
        })
        .collect();
    Ok(NormalizedSpectra { alpha, beta, gamma })
}

/// Even-degree energies of `coeffs`: entry `k` is the energy at degree `2k`.
fn even_energies(coeffs: &ShCoefficients, count: usize) -> Vec<f64> {
    let e = coeffs.energies();
    (0..count).map(|k| e[2 * k]).collect()
}

fn even_cross(a: &ShCoefficients, b: &ShCoefficients, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            a.degree(2 * k)
                .iter()
                .zip(b.degree(2 * k))
                .map(|(x, y)| x * y)
                .sum()
        })
        .collect()
}

/// One spherical function of a frame: grid samples, or harmonic
/// coefficients when those are known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameFunction {
    Samples(SphericalSamples),
    Coefficients(ShCoefficients),
}

impl FrameFunction {
    /// Pointwise mean. Both representations are linear in the function, so
    /// this is the representation of the mean function.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a FrameFunction>) -> Result<FrameFunction> {
        let items: Vec<&FrameFunction> = items.into_iter().collect();
        let samples: Option<Vec<&SphericalSamples>> = items
            .iter()
            .map(|f| match f {
                FrameFunction::Samples(s) => Some(s),
                FrameFunction::Coefficients(_) => None,
            })
            .collect();
        if let Some(samples) = samples {
            return Ok(FrameFunction::Samples(SphericalSamples::mean(samples)?));
        }
        let coeffs: Option<Vec<&ShCoefficients>> = items
            .iter()
            .map(|f| match f {
                FrameFunction::Coefficients(c) => Some(c),
                FrameFunction::Samples(_) => None,
            })
            .collect();
        Ok(FrameFunction::Coefficients(ShCoefficients::mean(
            coeffs.ok_or(Error::GridMismatch)?,
        )?))
    }
}

/// The spherical functions of one frame that a descriptor kind is built
/// from. For percentile kinds `breadth` holds the Q-breadth.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSamples {
    pub area: Option<FrameFunction>,
    pub breadth: Option<FrameFunction>,
}

/// Reusable grids for one `n`, and the percentile for Q-kinds.
///
/// Spectral kinds use harmonic coefficients of the area and breadth
/// functions computed in closed form up to degree `2n - 1`. The Q-breadth
/// has no closed form and is sampled on the `2n x 4n` quadrature grid.
#[derive(Debug, Clone)]
pub struct Extractor {
    n: usize,
    lambda: f64,
    raw: RawGrid,
    quadrature: QuadratureGrid,
}

impl Extractor {
    /// # Panics
    /// If `n` is zero.
    pub fn new(n: usize) -> Self {
        Self::with_lambda(n, DEFAULT_LAMBDA)
    }

    /// # Panics
    /// If `n` is zero.
    pub fn with_lambda(n: usize, lambda: f64) -> Self {
        assert!(n > 0, "grid parameter n must be at least 1");
        Extractor {
            n,
            lambda,
            raw: build_raw_grid(n),
            quadrature: build_quadrature_grid(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn raw_grid(&self) -> &RawGrid {
        &self.raw
    }

    pub fn quadrature_grid(&self) -> &QuadratureGrid {
        &self.quadrature
    }

    /// Highest analyzed degree, `2n - 1`.
    pub fn band_limit(&self) -> usize {
        2 * self.n - 1
    }

    pub fn params(&self, kind: DescriptorKind) -> DescriptorParams {
        DescriptorParams::for_kind(kind, self.n, self.lambda)
    }

    fn variant(&self, kind: DescriptorKind) -> BreadthVariant {
        if kind.uses_percentile() {
            BreadthVariant::Percentile(self.lambda)
        } else {
            BreadthVariant::Standard
        }
    }

    fn raw_samples(&self, projector: &Projector, which: SphericalFunction) -> Result<FrameFunction> {
        let values = projector.sample(self.raw.directions(), which)?;
        Ok(FrameFunction::Samples(SphericalSamples::new(self.raw.tag(), values)?))
    }

    /// Area coefficients, exact.
    pub fn area_function(&self, mesh: &TriMesh) -> FrameFunction {
        FrameFunction::Coefficients(area_coefficients(mesh, self.band_limit()))
    }

    /// Breadth coefficients, exact; Q-breadth samples on the quadrature
    /// grid. `Percentile(100)` is the breadth itself.
    pub fn breadth_function(&self, mesh: &TriMesh, variant: BreadthVariant) -> Result<FrameFunction> {
        match variant {
            BreadthVariant::Percentile(lambda) if lambda != 100.0 => {
                let projector = Projector::new(mesh);
                let values = projector.sample(self.quadrature.directions(), SphericalFunction::QBreadth(lambda))?;
                Ok(FrameFunction::Samples(SphericalSamples::new(self.quadrature.tag(), values)?))
            }
            _ => Ok(FrameFunction::Coefficients(breadth_coefficients(mesh, self.band_limit())?)),
        }
    }

    /// The spherical functions `kind` is built from.
    pub fn sample(&self, mesh: &TriMesh, kind: DescriptorKind) -> Result<FrameSamples> {
        if kind.is_raw() {
            let projector = Projector::new(mesh);
            return Ok(FrameSamples {
                area: kind
                    .needs_area()
                    .then(|| self.raw_samples(&projector, SphericalFunction::Area))
                    .transpose()?,
                breadth: kind
                    .needs_breadth()
                    .then(|| self.raw_samples(&projector, SphericalFunction::Breadth))
                    .transpose()?,
            });
        }
        Ok(FrameSamples {
            area: kind.needs_area().then(|| self.area_function(mesh)),
            breadth: kind
                .needs_breadth()
                .then(|| self.breadth_function(mesh, self.variant(kind)))
                .transpose()?,
        })
    }

    fn expect<'a>(f: &'a Option<FrameFunction>, kind: DescriptorKind) -> Result<&'a FrameFunction> {
        f.as_ref()
            .ok_or_else(|| Error::KindMismatch(format!("samples lack a function needed by {kind}")))
    }

    fn raw_values<'a>(&self, f: &'a Option<FrameFunction>, kind: DescriptorKind) -> Result<&'a [f64]> {
        match Self::expect(f, kind)? {
            FrameFunction::Samples(s) if s.tag() == self.raw.tag() => Ok(s.values()),
            _ => Err(Error::GridMismatch),
        }
    }

    /// Harmonic coefficients to degree `2n - 1` of a frame function.
    pub fn coefficients(&self, f: &FrameFunction) -> Result<ShCoefficients> {
        match f {
            FrameFunction::Samples(s) => analyze(s, &self.quadrature, self.band_limit()),
            FrameFunction::Coefficients(c) if c.band_limit() == self.band_limit() => Ok(c.clone()),
            FrameFunction::Coefficients(_) => Err(Error::GridMismatch),
        }
    }

    /// Spectra from the coefficients of the area and breadth functions.
    pub fn spectra_from_coefficients(&self, area: &ShCoefficients, breadth: &ShCoefficients) -> Result<EuclideanSpectra> {
        if area.band_limit() < self.band_limit() || breadth.band_limit() < self.band_limit() {
            return Err(Error::GridMismatch);
        }
        Ok(EuclideanSpectra {
            alpha: even_energies(area, self.n),
            beta: even_energies(breadth, self.n),
            gamma: even_cross(area, breadth, self.n),
            norm_area: area.norm(),
            norm_breadth: breadth.norm(),
        })
    }

    /// Spectra from functions sampled on the quadrature grid.
    pub fn spectra_from_samples(&self, area: &SphericalSamples, breadth: &SphericalSamples) -> Result<EuclideanSpectra> {
        let band = self.band_limit();
        let ca = analyze(area, &self.quadrature, band)?;
        let cb = analyze(breadth, &self.quadrature, band)?;
        self.spectra_from_coefficients(&ca, &cb)
    }

    /// Turns frame functions into the descriptor of `kind`.
    pub fn from_samples(&self, kind: DescriptorKind, samples: &FrameSamples) -> Result<DescriptorVector> {
        let values = match kind {
            DescriptorKind::Areas => self.raw_values(&samples.area, kind)?.to_vec(),
            DescriptorKind::Breadths => self.raw_values(&samples.breadth, kind)?.to_vec(),
            DescriptorKind::AreasBreadths => {
                let mut v = self.raw_values(&samples.area, kind)?.to_vec();
                v.extend_from_slice(self.raw_values(&samples.breadth, kind)?);
                v
            }
            DescriptorKind::AreaSpectrum => self.single_spectrum(Self::expect(&samples.area, kind)?)?,
            DescriptorKind::BreadthSpectrum | DescriptorKind::QBreadthSpectrum => {
                self.single_spectrum(Self::expect(&samples.breadth, kind)?)?
            }
            DescriptorKind::ShapeInvariant | DescriptorKind::QShapeInvariant => {
                let area = self.coefficients(Self::expect(&samples.area, kind)?)?;
                let breadth = self.coefficients(Self::expect(&samples.breadth, kind)?)?;
                self.shape_matrix(&area, &breadth)?.flatten()
            }
        };
        Ok(DescriptorVector {
            kind,
            params: self.params(kind),
            values,
        })
    }

    /// `log_stabilize(‖f_{2k}‖ / ‖f‖)` for `k = 0..n`.
    fn single_spectrum(&self, f: &FrameFunction) -> Result<Vec<f64>> {
        let c = self.coefficients(f)?;
        let norm = c.norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateNorm);
        }
        even_energies(&c, self.n)
            .into_iter()
            .map(|e| log_stabilize(e / norm))
            .collect()
    }

    /// Log-stabilized normalized spectra from area and breadth coefficients.
    pub fn shape_matrix(&self, area: &ShCoefficients, breadth: &ShCoefficients) -> Result<ShapeInvariantMatrix> {
        let s = self.spectra_from_coefficients(area, breadth)?;
        let p = normalize_spectra(&s.alpha, &s.beta, &s.gamma, s.norm_area, s.norm_breadth)?;
        let rows = (0..self.n)
            .map(|k| {
                Ok([
                    log_stabilize(p.alpha[k])?,
                    log_stabilize(p.beta[k])?,
                    log_stabilize(p.gamma[k])?,
                ])
            })
            .collect::<Result<_>>()?;
        Ok(ShapeInvariantMatrix { rows })
    }

    pub fn extract(&self, mesh: &TriMesh, kind: DescriptorKind) -> Result<DescriptorVector> {
        self.from_samples(kind, &self.sample(mesh, kind)?)
    }

    fn mesh_coefficients(&self, mesh: &TriMesh, variant: BreadthVariant) -> Result<(ShCoefficients, ShCoefficients)> {
        let area = area_coefficients(mesh, self.band_limit());
        let breadth = self.coefficients(&self.breadth_function(mesh, variant)?)?;
        Ok((area, breadth))
    }

    pub fn euclidean_spectra(&self, mesh: &TriMesh, variant: BreadthVariant) -> Result<EuclideanSpectra> {
        let (area, breadth) = self.mesh_coefficients(mesh, variant)?;
        self.spectra_from_coefficients(&area, &breadth)
    }

    pub fn shape_invariant(&self, mesh: &TriMesh, variant: BreadthVariant) -> Result<ShapeInvariantMatrix> {
        let (area, breadth) = self.mesh_coefficients(mesh, variant)?;
        self.shape_matrix(&area, &breadth)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("grid parameter n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Samples of the area and/or breadth function on the `n x n` raw grid.
pub fn raw_vector(mesh: &TriMesh, kind: DescriptorKind, n: usize) -> Result<DescriptorVector> {
    if !kind.is_raw() {
        return Err(Error::KindMismatch(format!("{kind} is not a raw sample kind")));
    }
    check_n(n)?;
    Extractor::new(n).extract(mesh, kind)
}

/// `(α_k, β_k, γ_k)` for `k = 0..n`, from the expansions of the area and
/// breadth functions to degree `2n - 1`.
pub fn euclidean_spectra(mesh: &TriMesh, n: usize) -> Result<EuclideanSpectra> {
    check_n(n)?;
    Extractor::new(n).euclidean_spectra(mesh, BreadthVariant::Standard)
}

pub fn shape_invariant(mesh: &TriMesh, n: usize, variant: BreadthVariant) -> Result<ShapeInvariantMatrix> {
    check_n(n)?;
    Extractor::new(n).shape_invariant(mesh, variant)
}

/// Which single spectrum [`spectrum_vector`] extracts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    Area,
    Breadth,
    QBreadth(f64),
}

pub fn spectrum_vector(mesh: &TriMesh, n: usize, which: SpectrumKind) -> Result<DescriptorVector> {
    check_n(n)?;
    match which {
        SpectrumKind::Area => Extractor::new(n).extract(mesh, DescriptorKind::AreaSpectrum),
        SpectrumKind::Breadth => Extractor::new(n).extract(mesh, DescriptorKind::BreadthSpectrum),
        SpectrumKind::QBreadth(lambda) => {
            Extractor::with_lambda(n, lambda).extract(mesh, DescriptorKind::QBreadthSpectrum)
        }
    }
}

/// Any of the eight kinds, with `params.lambda` used by the Q-kinds.
pub fn descriptor(mesh: &TriMesh, kind: DescriptorKind, params: DescriptorParams) -> Result<DescriptorVector> {
    check_n(params.n)?;
    Extractor::with_lambda(params.n, params.lambda.unwrap_or(DEFAULT_LAMBDA)).extract(mesh, kind)
}
