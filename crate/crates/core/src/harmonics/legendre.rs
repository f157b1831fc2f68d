//! Fully normalized associated Legendre functions and Gauss-Legendre nodes.

/// Flat index of `(k, m)` with `0 <= m <= k` in a triangular table.
#[inline]
pub(crate) fn tri_index(k: usize, m: usize) -> usize {
    k * (k + 1) / 2 + m
}

/// Associated Legendre functions `P_k^m(cos theta)` for `0 <= m <= k <= lmax`,
/// scaled so that `P * cos(m phi)` and `P * sin(m phi)` have unit mean square
/// over the sphere. No Condon-Shortley phase.
///
/// `x = cos theta`. Entries are laid out by [`tri_index`].
pub fn normalized_legendre(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; tri_index(lmax, lmax) + 1];
    normalized_legendre_into(lmax, x, &mut p);
    p
}

/// [`normalized_legendre`] into a caller-provided table of at least
/// `tri_index(lmax, lmax) + 1` entries.
pub(crate) fn normalized_legendre_into(lmax: usize, x: f64, p: &mut [f64]) {
    let s = (1.0 - x * x).max(0.0).sqrt();
    p[0] = 1.0;
    for m in 0..=lmax {
        if m >= 1 {
            let factor = if m == 1 {
                3f64.sqrt()
            } else {
                ((2 * m + 1) as f64 / (2 * m) as f64).sqrt()
            };
            p[tri_index(m, m)] = factor * s * p[tri_index(m - 1, m - 1)];
        }
        if m < lmax {
            p[tri_index(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * p[tri_index(m, m)];
        }
        for k in m + 2..=lmax {
            let (kf, mf) = (k as f64, m as f64);
            let a = ((2.0 * kf - 1.0) * (2.0 * kf + 1.0) / ((kf - mf) * (kf + mf))).sqrt();
            let b = ((2.0 * kf + 1.0) * (kf + mf - 1.0) * (kf - mf - 1.0)
                / ((kf - mf) * (kf + mf) * (2.0 * kf - 3.0)))
                .sqrt();
            p[tri_index(k, m)] = a * x * p[tri_index(k - 1, m)] - b * p[tri_index(k - 2, m)];
        }
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in decreasing order (so `acos` of them increases).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
