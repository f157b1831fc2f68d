//! Harmonic coefficients of the weighted-area and breadth functions of a
//! mesh computed in closed form, free of sampling error.
//!
//! The area function `A(u) = Σ_i |u·a_i|` expands through the Legendre series
//! of `|t|` and the addition theorem. The breadth `b(u) = h(u) + h(-u)` comes
//! from the support function `h` of the convex hull, whose first area
//! measure `S_1 = h + ½Δh` is carried by the hull edges: edge `e` puts
//! density `ℓ_e / 2` on the arc of its normal cone. Hence
//! `h_{k,m} = S_{1;k,m} / (1 - k(k+1)/2)` for every `k != 1`.

use nalgebra::Vector3;
use rayon::prelude::*;

use super::legendre::{gauss_legendre, normalized_legendre_into, tri_index};
use super::ShCoefficients;
use crate::direction::Direction;
use crate::error::Result;
use crate::mesh::{convex_hull, HullEdge, HullShape, TriMesh};

/// Items per parallel work unit.
const CHUNK: usize = 256;

/// Every real harmonic of degree `<= lmax` at `u`, in coefficient order
/// (`k² + k + m`).
pub fn harmonics_at(lmax: usize, u: &Direction) -> Vec<f64> {
    let mut out = vec![0.0; (lmax + 1) * (lmax + 1)];
    let mut work = Workspace::new(lmax);
    work.fill(u.as_vector(), &mut out);
    out
}

struct Workspace {
    lmax: usize,
    legendre: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Workspace {
    fn new(lmax: usize) -> Self {
        Workspace {
            lmax,
            legendre: vec![0.0; tri_index(lmax, lmax) + 1],
            cos: vec![0.0; lmax + 1],
            sin: vec![0.0; lmax + 1],
        }
    }

    fn fill(&mut self, u: &Vector3<f64>, out: &mut [f64]) {
        let lmax = self.lmax;
        normalized_legendre_into(lmax, u.z.clamp(-1.0, 1.0), &mut self.legendre);
        let rho = u.x.hypot(u.y);
        let (c1, s1) = if rho > 0.0 { (u.x / rho, u.y / rho) } else { (1.0, 0.0) };
        self.cos[0] = 1.0;
        self.sin[0] = 0.0;
        for m in 1..=lmax {
            self.cos[m] = self.cos[m - 1] * c1 - self.sin[m - 1] * s1;
            self.sin[m] = self.sin[m - 1] * c1 + self.cos[m - 1] * s1;
        }
        for k in 0..=lmax {
            let centre = k * k + k;
            out[centre] = self.legendre[tri_index(k, 0)];
            for m in 1..=k {
                let p = self.legendre[tri_index(k, m)];
                out[centre + m] = p * self.cos[m];
                out[centre - m] = p * self.sin[m];
            }
        }
    }

    /// `out += w · Y(u)`.
    fn accumulate(&mut self, u: &Vector3<f64>, w: f64, scratch: &mut [f64], out: &mut [f64]) {
        self.fill(u, scratch);
        out.iter_mut().zip(scratch.iter()).for_each(|(o, y)| *o += w * y);
    }
}

/// `∫_0^1 t P_k(t) dt` for `k = 0..=lmax`, with `P_k` the Legendre
/// polynomial. These are the coefficients `f_{k,m} = d_k Y_{k,m}(n)` of
/// `u ↦ |u·n|`; odd entries vanish.
pub fn abs_legendre_moments(lmax: usize) -> Vec<f64> {
    let (nodes, weights) = gauss_legendre(lmax / 2 + 2);
    let mut out = vec![0.0; lmax + 1];
    for (x, w) in nodes.iter().zip(&weights) {
        let t = 0.5 * (x + 1.0);
        let (mut p0, mut p1) = (1.0, t);
        for (k, o) in out.iter_mut().enumerate() {
            let pk = match k {
                0 => 1.0,
                1 => t,
                _ => {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            *o += 0.5 * w * t * pk;
        }
    }
    for k in (1..=lmax).step_by(2) {
        out[k] = 0.0;
    }
    out
}

/// Sums `f(item)` over `items` into one coefficient vector. Large inputs
/// are split into fixed chunks summed in order, so the result does not
/// depend on the thread count.
fn reduce<T: Sync>(
    items: &[T],
    lmax: usize,
    f: impl Fn(&T, &mut Workspace, &mut [f64], &mut [f64]) + Sync,
) -> Vec<f64> {
    let len = (lmax + 1) * (lmax + 1);
    let run = |chunk: &[T]| {
        let mut ws = Workspace::new(lmax);
        let mut scratch = vec![0.0; len];
        let mut acc = vec![0.0; len];
        for item in chunk {
            f(item, &mut ws, &mut scratch, &mut acc);
        }
        acc
    };
    let partial: Vec<Vec<f64>> = items.par_chunks(CHUNK).map(run).collect();
    let mut total = vec![0.0; len];
    for p in &partial {
        total.iter_mut().zip(p).for_each(|(t, v)| *t += v);
    }
    total
}

fn scale_by_degree(mut coeffs: Vec<f64>, lmax: usize, factor: impl Fn(usize) -> f64) -> Vec<f64> {
    for k in 0..=lmax {
        let f = factor(k);
        coeffs[k * k..(k + 1) * (k + 1)].iter_mut().for_each(|c| *c *= f);
    }
    coeffs
}

/// Exact coefficients of `A(u) = Σ_i |u·a_i|` up to degree `lmax`.
pub fn area_coefficients(mesh: &TriMesh, lmax: usize) -> ShCoefficients {
    let faces: Vec<Vector3<f64>> = mesh
        .area_vectors()
        .into_iter()
        .filter(|a| a.norm_squared() > 0.0)
        .collect();
    let raw = reduce(&faces, lmax, |a, ws, scratch, acc| {
        let area = a.norm();
        ws.accumulate(&(a / area), area, scratch, acc);
    });
    let d = abs_legendre_moments(lmax);
    ShCoefficients::from_vec(lmax, scale_by_degree(raw, lmax, |k| d[k]))
}

/// Unit tangent at `n1` of the normal arc of `edge`, and the arc length.
fn normal_arc(edge: &HullEdge) -> Option<(Vector3<f64>, f64)> {
    let [n1, n2] = edge.normals;
    let cross = n1.cross(&n2).norm();
    let dot = n1.dot(&n2);
    let psi = cross.atan2(dot);
    if psi < 1e-14 {
        return None;
    }
    let toward = if cross > 1e-9 { n2 } else { edge.outward };
    let t = toward - n1 * n1.dot(&toward);
    let norm = t.norm();
    (norm > 0.0).then(|| (t / norm, psi))
}

/// Gauss-Legendre points on an arc of length `psi` so that degree-`lmax`
/// trigonometric polynomials integrate to rounding error. With
/// `z = lmax psi / 2` the frequency on the reference interval, the rule
/// bounds the error for `cos(zx)` and `x sin(zx)` by about 1e-14.
fn arc_rule_size(lmax: usize, psi: f64) -> usize {
    let z = 0.5 * lmax as f64 * psi;
    let n = if z < 1.0 { 4.0 + 5.0 * z } else { z + 8.0 };
    n.ceil() as usize
}

/// Exact coefficients of the breadth `b(u) = max_x u·x - min_x u·x` up to
/// degree `lmax`. Odd degrees are zero.
pub fn breadth_coefficients(mesh: &TriMesh, lmax: usize) -> Result<ShCoefficients> {
    let len = (lmax + 1) * (lmax + 1);
    let coeffs = match convex_hull(mesh.vertices())? {
        HullShape::Point(_) => vec![0.0; len],
        HullShape::Segment(a, b) => {
            let d = b - a;
            let length = d.norm();
            let mut ws = Workspace::new(lmax);
            let mut y = vec![0.0; len];
            ws.fill(&(d / length), &mut y);
            let moments = abs_legendre_moments(lmax);
            scale_by_degree(y, lmax, |k| length * moments[k])
        }
        HullShape::Polytope(hull) => {
            let arcs: Vec<(Vector3<f64>, Vector3<f64>, f64, f64)> = hull
                .edges()
                .iter()
                .filter_map(|e| normal_arc(e).map(|(t, psi)| (e.normals[0], t, psi, e.length)))
                .collect();
            let max_rule = arcs.iter().map(|a| arc_rule_size(lmax, a.2)).max().unwrap_or(1);
            let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..=max_rule).map(gauss_legendre).collect();
            let measure = reduce(&arcs, lmax, |&(n1, t, psi, length), ws, scratch, acc| {
                let (nodes, weights) = &rules[arc_rule_size(lmax, psi)];
                for (x, w) in nodes.iter().zip(weights) {
                    let s = 0.5 * psi * (x + 1.0);
                    let u = n1 * s.cos() + t * s.sin();
                    ws.accumulate(&u, 0.25 * length * psi * w, scratch, acc);
                }
            });
            // Mean over the sphere, then h_k = S_k / (1 - k(k+1)/2), b_k = 2 h_k.
            scale_by_degree(measure, lmax, |k| {
                if k % 2 == 1 {
                    0.0
                } else {
                    let inv = 1.0 - (k * (k + 1)) as f64 / 2.0;
                    2.0 / (4.0 * std::f64::consts::PI * inv)
                }
            })
        }
    };
    Ok(ShCoefficients::from_vec(lmax, coeffs))
}
