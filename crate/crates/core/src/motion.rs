//! Timestamped mesh sequences as polygonal curves in descriptor space:
//! temporal filtering of the sampled spherical functions, piecewise-linear
//! evaluation and dynamic time warping.

use rayon::prelude::*;

use crate::descriptors::{euclidean, DescriptorKind, DescriptorParams, Extractor, FrameFunction, FrameSamples};
use crate::error::{Error, Result};
use crate::harmonics::SphericalSamples;
use crate::mesh::TriMesh;

/// Frame rate assumed when timestamps are not given.
pub const DEFAULT_FPS: f64 = 25.0;

fn strictly_increasing(times: impl IntoIterator<Item = f64>) -> bool {
    let mut prev = f64::NEG_INFINITY;
    times.into_iter().all(|t| {
        let ok = t.is_finite() && t > prev;
        prev = t;
        ok
    })
}

#[derive(Debug, Clone)]
pub struct MeshSequence {
    frames: Vec<(TriMesh, f64)>,
}

impl MeshSequence {
    pub fn new(frames: Vec<(TriMesh, f64)>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyCurve);
        }
        if !strictly_increasing(frames.iter().map(|(_, t)| *t)) {
            return Err(Error::NonMonotonicTime);
        }
        Ok(MeshSequence { frames })
    }

    /// Frame `i` at `i / fps` seconds.
    pub fn at_rate(meshes: Vec<TriMesh>, fps: f64) -> Result<Self> {
        if !(fps > 0.0) {
            return Err(Error::InvalidParameter(format!("fps must be positive, got {fps}")));
        }
        Self::new(
            meshes
                .into_iter()
                .enumerate()
                .map(|(i, m)| (m, i as f64 / fps))
                .collect(),
        )
    }

    pub fn frames(&self) -> &[(TriMesh, f64)] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Polygonal curve through descriptor vectors at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionCurve {
    kind: DescriptorKind,
    params: DescriptorParams,
    points: Vec<(f64, Vec<f64>)>,
}

impl MotionCurve {
    pub fn new(kind: DescriptorKind, params: DescriptorParams, points: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyCurve)?;
        let dim = first.1.len();
        if points.iter().any(|(_, v)| v.len() != dim) {
            return Err(Error::KindMismatch("curve points differ in length".into()));
        }
        if !strictly_increasing(points.iter().map(|(t, _)| *t)) {
            return Err(Error::NonMonotonicTime);
        }
        Ok(MotionCurve { kind, params, points })
    }

    pub fn kind(&self) -> DescriptorKind {
        self.kind
    }

    pub fn params(&self) -> DescriptorParams {
        self.params
    }

    pub fn points(&self) -> &[(f64, Vec<f64>)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].1.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|(_, v)| v.as_slice())
    }
}

/// Windowed mean `(1/(2K+1)) Σ_{|j|<=K} f_{i+j}` for `K <= i <= p - K`,
/// keeping the centre timestamp. Output has `len - 2K` entries.
pub fn temporal_filter(
    samples: &[(f64, SphericalSamples)],
    radius: usize,
) -> Result<Vec<(f64, SphericalSamples)>> {
    check_window(samples.len(), radius)?;
    let tag = samples[0].1.tag();
    if samples.iter().any(|(_, s)| s.tag() != tag) {
        return Err(Error::GridMismatch);
    }
    samples
        .windows(2 * radius + 1)
        .map(|w| Ok((w[radius].0, SphericalSamples::mean(w.iter().map(|(_, s)| s))?)))
        .collect()
}

fn check_window(len: usize, radius: usize) -> Result<()> {
    let needed = 2 * radius + 1;
    if len < needed {
        return Err(Error::WindowTooLarge { radius, needed, len });
    }
    Ok(())
}

/// Filters one optional stream of frame functions.
fn filter_stream(stream: Vec<Option<FrameFunction>>, radius: usize) -> Result<Vec<Option<FrameFunction>>> {
    let out_len = stream.len() - 2 * radius;
    if stream.iter().all(Option::is_none) {
        return Ok(vec![None; out_len]);
    }
    let present: Vec<FrameFunction> = stream
        .into_iter()
        .map(|f| f.ok_or(Error::GridMismatch))
        .collect::<Result<_>>()?;
    present
        .windows(2 * radius + 1)
        .map(|w| FrameFunction::mean(w).map(Some))
        .collect()
}

/// Samples every frame, averages the spherical functions over a window of
/// radius `window`, then builds one descriptor per filtered frame.
///
/// Averaging happens before the descriptor: for spectral kinds this is not
/// the same as averaging the descriptor vectors.
pub fn motion_curve(
    seq: &MeshSequence,
    kind: DescriptorKind,
    extractor: &Extractor,
    window: usize,
) -> Result<MotionCurve> {
    check_window(seq.len(), window)?;
    let sampled: Vec<FrameSamples> = seq
        .frames()
        .par_iter()
        .map(|(mesh, _)| extractor.sample(mesh, kind))
        .collect::<Result<_>>()?;
    let times: Vec<f64> = seq.frames().iter().map(|(_, t)| *t).collect();
    let (areas, breadths): (Vec<_>, Vec<_>) = sampled.into_iter().map(|f| (f.area, f.breadth)).unzip();
    let areas = filter_stream(areas, window)?;
    let breadths = filter_stream(breadths, window)?;
    let points = areas
        .into_par_iter()
        .zip(breadths)
        .zip(&times[window..times.len() - window])
        .map(|((area, breadth), &t)| {
            let frame = FrameSamples { area, breadth };
            Ok((t, extractor.from_samples(kind, &frame)?.values))
        })
        .collect::<Result<Vec<_>>>()?;
    MotionCurve::new(kind, extractor.params(kind), points)
}

/// Point on the polygonal curve at time `t`, interpolating linearly within
/// the containing segment. Exact at the knots.
pub fn evaluate_curve(curve: &MotionCurve, t: f64) -> Result<Vec<f64>> {
    let pts = &curve.points;
    let (start, end) = (pts[0].0, pts[pts.len() - 1].0);
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    // First knot with time >= t.
    let j = pts.partition_point(|(tj, _)| *tj < t);
    let (tj, xj) = &pts[j];
    if *tj == t || j == 0 {
        return Ok(xj.clone());
    }
    let (ti, xi) = &pts[j - 1];
    let wi = (t - tj) / (ti - tj);
    let wj = (t - ti) / (tj - ti);
    Ok(xi.iter().zip(xj).map(|(a, b)| wi * a + wj * b).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DtwOptions {
    /// Sakoe-Chiba band radius; widened to the length difference so a path
    /// always exists. `None` means unconstrained.
    pub window: Option<usize>,
    /// Divide the accumulated cost by the sum of both lengths.
    pub normalize: bool,
}

/// Accumulated DTW cost with Euclidean local distance and steps
/// `(1,0)`, `(0,1)`, `(1,1)`; `D[0][0] = d(a_0, b_0)`.
pub fn dtw<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B], options: &DtwOptions) -> f64 {
    let (p, q) = (a.len(), b.len());
    if p == 0 || q == 0 {
        return f64::INFINITY;
    }
    let band = options.window.map(|w| w.max(p.abs_diff(q)));
    let inside = |i: usize, j: usize| band.is_none_or(|w| i.abs_diff(j) <= w);
    let mut prev = vec![f64::INFINITY; q];
    let mut curr = vec![f64::INFINITY; q];
    for i in 0..p {
        for j in 0..q {
            if !inside(i, j) {
                curr[j] = f64::INFINITY;
                continue;
            }
            let cost = euclidean(a[i].as_ref(), b[j].as_ref());
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => curr[j - 1],
                (_, 0) => prev[j],
                _ => prev[j].min(curr[j - 1]).min(prev[j - 1]),
            };
            curr[j] = cost + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    let total = prev[q - 1];
    if options.normalize {
        total / (p + q) as f64
    } else {
        total
    }
}

fn check_comparable(a: &MotionCurve, b: &MotionCurve) -> Result<()> {
    if a.kind != b.kind || a.params != b.params || a.dim() != b.dim() {
        return Err(Error::KindMismatch(format!(
            "{} (n={}, dim {}) vs {} (n={}, dim {})",
            a.kind,
            a.params.n,
            a.dim(),
            b.kind,
            b.params.n,
            b.dim()
        )));
    }
    Ok(())
}

/// Unconstrained, unnormalized DTW between the curves' vertex sequences.
pub fn dtw_distance(a: &MotionCurve, b: &MotionCurve) -> Result<f64> {
    dtw_distance_with(a, b, &DtwOptions::default())
}

pub fn dtw_distance_with(a: &MotionCurve, b: &MotionCurve, options: &DtwOptions) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCurve);
    }
    check_comparable(a, b)?;
    let av: Vec<&[f64]> = a.vectors().collect();
    let bv: Vec<&[f64]> = b.vectors().collect();
    Ok(dtw(&av, &bv, options))
}

#[cfg(test)]
mod tests;
