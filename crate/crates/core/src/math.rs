//! Thin wrappers over `libm` so the rest of the crate reads like ordinary float code.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn powi(x: f64, k: i32) -> f64 {
    let mut base = if k < 0 { 1.0 / x } else { x };
    let mut e = k.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[inline]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Euler Beta function via log-gamma.
pub fn beta(a: f64, b: f64) -> f64 {
    exp(lgamma(a) + lgamma(b) - lgamma(a + b))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm with scaling to avoid overflow and underflow.
pub fn norm(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(abs(*v)));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = a.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * sqrt(s)
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max(abs(x - y)));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y) / scale;
            d * d
        })
        .sum();
    scale * sqrt(s)
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pairwise (cascade) summation. The reduction tree depends only on the length,
/// so results are reproducible bit for bit.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if v.len() <= BLOCK {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        return s;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_pow() {
        for k in -7..9 {
            let a = powi(1.37, k);
            let b = pow(1.37, k as f64);
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
    }

    #[test]
    fn beta_half_integer() {
        // B(2, 3/2) = Γ(2)Γ(3/2)/Γ(7/2) = 4/15
        assert!((beta(2.0, 1.5) - 4.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_matches_naive_for_integers() {
        let v: alloc::vec::Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }

    #[test]
    fn norm_is_scaled() {
        assert!((norm(&[3e200, 4e200]) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(dist(&[1.0, 1.0], &[4.0, 5.0]), 5.0);
    }
}
