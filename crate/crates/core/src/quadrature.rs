//! One-dimensional adaptive quadrature, Gauss–Legendre rules, sphere reductions
//! and polynomial extrapolation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::math;
use crate::operators::tangent_frame;

// Published 15-point Kronrod nodes and weights, kept at full printed precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 400,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl Estimate {
    pub fn strict(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                estimate: self.value,
                error: self.error,
            })
        }
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, math::abs((k - g) * h))
}

/// Globally adaptive Gauss–Kronrod (7, 15) integration over `[a, b]` with interior breakpoints.
///
/// The interval with the largest error estimate is bisected until the total
/// error falls below `max(abs, rel·|I|)`. Evaluation order is fixed, so results
/// are reproducible.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Estimate {
    let mut iv: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            iv.push((w[0], w[1], v, e));
        }
    }
    loop {
        let total: f64 = math::pairwise_sum(&iv.iter().map(|x| x.2).collect::<Vec<_>>());
        let err: f64 = iv.iter().map(|x| x.3).sum();
        let target = tol.abs.max(tol.rel * math::abs(total));
        if !err.is_finite() {
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        if err <= target {
            return Estimate {
                value: total,
                error: err,
                converged: true,
            };
        }
        if iv.len() >= tol.max_intervals {
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let (idx, _) =
            iv.iter().enumerate().fold(
                (0, -1.0),
                |(bi, be), (i, x)| if x.3 > be { (i, x.3) } else { (bi, be) },
            );
        let (a, b, _, _) = iv[idx];
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, a, m);
        let (v2, e2) = gk15(&mut f, m, b);
        iv[idx] = (a, m, v1, e1);
        iv.insert(idx + 1, (m, b, v2, e2));
    }
}

/// Breakpoints `lo, lo·2, lo·4, … < hi` prepended by 0 and ending at `hi`, for integrands
/// concentrated near the origin at scale `lo`.
pub fn dyadic_points(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = lo;
    while x < hi && pts.len() < 80 {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(hi);
    pts
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let pi = core::f64::consts::PI;
    for i in 0..m.div_ceil(2) {
        let mut z = math::cos(pi * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if math::abs(dz) < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (
        x.iter().map(|v| c + h * v).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

/// Product rule on the unit sphere `S^m ⊂ R^{m+1}`: Gauss–Legendre in the polar
/// angles and the trapezoidal rule in the azimuth.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(m: usize, order: usize) -> Self {
        let mut points = vec![vec![1.0]];
        let mut weights = vec![1.0];
        // Build S^1 then lift S^{k-1} to S^k by a polar angle with weight sin^{k-1}.
        let na = 2 * order;
        let mut pts1 = Vec::with_capacity(na);
        let mut w1 = Vec::with_capacity(na);
        for i in 0..na {
            let phi = 2.0 * core::f64::consts::PI * (i as f64 + 0.5) / na as f64;
            pts1.push(vec![math::cos(phi), math::sin(phi)]);
            w1.push(2.0 * core::f64::consts::PI / na as f64);
        }
        if m >= 1 {
            points = pts1;
            weights = w1;
        }
        for k in 2..=m {
            let (th, wt) = gauss_on(order, 0.0, core::f64::consts::PI);
            let mut np = Vec::with_capacity(points.len() * th.len());
            let mut nw = Vec::with_capacity(points.len() * th.len());
            for (t, w) in th.iter().zip(&wt) {
                let (c, s) = (math::cos(*t), math::sin(*t));
                let jac = math::powi(s, (k - 1) as i32);
                for (p, pw) in points.iter().zip(&weights) {
                    let mut q = Vec::with_capacity(k + 1);
                    q.extend(p.iter().map(|v| v * s));
                    q.push(c);
                    np.push(q);
                    nw.push(pw * w * jac);
                }
            }
            points = np;
            weights = nw;
        }
        SphereRule { points, weights }
    }

    /// Integrate over the unit sphere of the orthogonal complement of `u` in `R^{m+2}`.
    pub fn integrate_complement<F: FnMut(&[f64]) -> f64>(&self, u: &[f64], mut f: F) -> f64 {
        let frame = tangent_frame(u);
        let d = u.len();
        let mut buf = vec![0.0; d];
        let parts: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| {
                for i in 0..d {
                    buf[i] = frame.iter().zip(p).map(|(e, c)| e[i] * c).sum();
                }
                w * f(&buf)
            })
            .collect();
        math::pairwise_sum(&parts)
    }
}

/// `∫_{S^m} g(ω·u) dω = |S^{m-1}| ∫_0^π g(cos ψ) sin^{m-1}ψ dψ` for `m >= 1`.
pub fn sphere_axial_weight(m: usize) -> f64 {
    if m == 1 {
        2.0
    } else {
        sphere_area(m - 1).unwrap()
    }
}

/// `|S^{m-2}|`, the factor in the two-angle reduction on `S^m` (`m >= 2`).
pub fn sphere_two_angle_weight(m: usize) -> f64 {
    if m == 2 {
        2.0
    } else {
        sphere_area(m - 2).unwrap()
    }
}

/// Neville extrapolation of samples `(h_i, v_i)` to `h = 0`, with the last correction as error estimate.
pub fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> (f64, f64) {
    let m = h.len();
    let mut p = v.to_vec();
    let mut last_change = 0.0;
    for k in 1..m {
        for i in 0..m - k {
            let prev = p[i];
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
            if i == 0 {
                last_change = math::abs(p[i] - prev);
            }
        }
    }
    (p[0], last_change)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let e = integrate(
            |x| 1.0 / x.sqrt(),
            &[0.0, 1.0],
            Tolerance::new(1e-10, 1e-12),
        );
        assert!((e.value - 2.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn sphere_rule_area() {
        for m in 1..6 {
            let r = SphereRule::new(m, 16);
            let s: f64 = r.weights.iter().sum();
            assert!((s / sphere_area(m).unwrap() - 1.0).abs() < 1e-12, "{m} {s}");
        }
    }

    #[test]
    fn neville_recovers_polynomial() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let v: Vec<f64> = h
            .iter()
            .map(|t| 3.0 + t - 2.0 * t * t + t * t * t)
            .collect();
        let (x, _) = extrapolate_to_zero(&h, &v);
        assert!((x - 3.0).abs() < 1e-13);
    }
}
