//! Boundary and interior data for the Poisson and Green integrals.
//!
//! Half-space data are finite sums of radial profiles about arbitrary centers, which covers
//! bubble traces, bumps, rational decays and tabulated radial profiles. Ball data are zonal:
//! functions of `η·a` for a fixed unit axis `a`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Dimension;
use crate::math;

/// A radial profile `φ(r)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Constant,
    /// `(2ε/(ε² + r²))^exponent`, the boundary trace of a bubble raised to a power.
    Bubble {
        eps: f64,
        exponent: f64,
    },
    /// `(1 + r²)^{-a/2}`.
    Rational {
        a: f64,
    },
    /// `exp(1 - 1/(1 - (r/R)²))` for `r < R`, zero outside.
    Bump {
        radius: f64,
    },
    /// `exp(-(r/w)²)`.
    Gaussian {
        width: f64,
    },
    /// Piecewise-linear table on increasing radii, continued by `v_last·(r/r_last)^{-tail}`.
    Table {
        r: Vec<f64>,
        v: Vec<f64>,
        tail: f64,
    },
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::Constant => 1.0,
            Profile::Bubble { eps, exponent } => {
                math::pow(2.0 * eps / (eps * eps + r * r), *exponent)
            }
            Profile::Rational { a } => math::pow(1.0 + r * r, -a / 2.0),
            Profile::Bump { radius } => {
                let u = r / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    math::exp(1.0 - 1.0 / (1.0 - u * u))
                }
            }
            Profile::Gaussian { width } => {
                let u = r / width;
                math::exp(-u * u)
            }
            Profile::Table { r: rs, v, tail } => {
                let last = rs.len() - 1;
                if r >= rs[last] {
                    return v[last] * math::pow(r / rs[last], -tail);
                }
                if r <= rs[0] {
                    return v[0];
                }
                let k = rs.partition_point(|x| *x <= r) - 1;
                let h = (r - rs[k]) / (rs[k + 1] - rs[k]);
                v[k] + h * (v[k + 1] - v[k])
            }
        }
    }

    /// The exponent `a` with `φ(r) = O(r^{-a})`; infinite for compact support or fast decay.
    pub fn decay(&self) -> f64 {
        match self {
            Profile::Constant => 0.0,
            Profile::Bubble { exponent, .. } => 2.0 * exponent,
            Profile::Rational { a } => *a,
            Profile::Bump { .. } | Profile::Gaussian { .. } => f64::INFINITY,
            Profile::Table { tail, .. } => *tail,
        }
    }

    /// A length on which the profile varies.
    pub fn scale(&self) -> f64 {
        match self {
            Profile::Constant => 1.0,
            Profile::Bubble { eps, .. } => *eps,
            Profile::Rational { .. } => 1.0,
            Profile::Bump { radius } => *radius,
            Profile::Gaussian { width } => *width,
            Profile::Table { r, .. } => r[r.len() - 1].max(r[0]).max(1e-3),
        }
    }

    /// Radii at which the profile is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Profile::Bump { radius } => alloc::vec![*radius],
            Profile::Table { r, .. } => r.clone(),
            _ => Vec::new(),
        }
    }

    pub fn table(r: Vec<f64>, v: Vec<f64>, tail: f64) -> Result<Self> {
        if r.len() < 2 || r.len() != v.len() {
            return Err(Error::Contract("table needs at least two matching rows"));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) || r[0] < 0.0 {
            return Err(Error::Contract(
                "table radii must be nonnegative and increasing",
            ));
        }
        if r[r.len() - 1] <= 0.0 || !(tail >= 0.0) {
            return Err(Error::Contract("table tail exponent must be nonnegative"));
        }
        Ok(Profile::Table { r, v, tail })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialTerm {
    pub coef: f64,
    pub center: Vec<f64>,
    pub profile: Profile,
}

impl RadialTerm {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.coef * self.profile.eval(math::dist(y, &self.center))
    }
}

/// Data on `∂ℝⁿ⁺¹₊ = ℝⁿ` with its declared decay rate.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub n: usize,
    pub terms: Vec<RadialTerm>,
    /// `f = O(|x|^{-decay_exponent})`.
    pub decay_exponent: f64,
    pub derivative_bound: Option<f64>,
}

impl BoundaryData {
    pub fn zero(n: usize) -> Self {
        BoundaryData {
            n,
            terms: Vec::new(),
            decay_exponent: f64::INFINITY,
            derivative_bound: None,
        }
    }

    pub fn radial(coef: f64, center: &[f64], profile: Profile) -> Self {
        let decay = if coef == 0.0 {
            f64::INFINITY
        } else {
            profile.decay()
        };
        BoundaryData {
            n: center.len(),
            terms: alloc::vec![RadialTerm {
                coef,
                center: center.to_vec(),
                profile
            }],
            decay_exponent: decay,
            derivative_bound: None,
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::radial(c, &alloc::vec![0.0; n], Profile::Constant)
    }

    pub fn with_decay(mut self, a: f64) -> Self {
        self.decay_exponent = a;
        self
    }

    pub fn with_derivative_bound(mut self, b: f64) -> Self {
        self.derivative_bound = Some(b);
        self
    }

    pub fn plus(&self, o: &BoundaryData) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: o.n,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(BoundaryData {
            n: self.n,
            terms,
            decay_exponent: self.decay_exponent.min(o.decay_exponent),
            derivative_bound: None,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= c;
        }
        if c == 0.0 {
            out.terms.clear();
            out.decay_exponent = f64::INFINITY;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coef == 0.0)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(y)).sum()
    }

    /// Checks the kernel-specific decay hypothesis for data attached to `𝓑_k`:
    /// boundedness for `k = 0`, decay faster than `|x|^{-k}` otherwise.
    pub fn check_admissible(&self, k: usize, dim: Dimension) -> Result<()> {
        if self.n != dim.n() {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                found: self.n,
            });
        }
        if self.is_zero() {
            return Ok(());
        }
        if k > 0 && !(self.decay_exponent > k as f64) {
            return Err(Error::Contract(
                "boundary data decays too slowly for this kernel",
            ));
        }
        if dim.is_critical() && k == 3 && !(self.decay_exponent > dim.nf()) {
            return Err(Error::Contract(
                "logarithmic kernel needs data decaying faster than |x|^{-n}",
            ));
        }
        Ok(())
    }
}

/// A zonal function `η ↦ φ(η·a)` on the unit sphere.
#[derive(Clone)]
pub struct SphereData {
    pub axis: Vec<f64>,
    pub profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl core::fmt::Debug for SphereData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SphereData")
            .field("axis", &self.axis)
            .field("zero", &self.zero)
            .finish()
    }
}

impl SphereData {
    pub fn zero(d: usize) -> Self {
        let mut axis = alloc::vec![0.0; d];
        axis[d - 1] = 1.0;
        SphereData {
            axis,
            profile: Arc::new(|_| 0.0),
            zero: true,
        }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        let mut s = Self::zero(d);
        s.profile = Arc::new(move |_| c);
        s.zero = c == 0.0;
        s
    }

    pub fn zonal<F: Fn(f64) -> f64 + Send + Sync + 'static>(axis: &[f64], f: F) -> Result<Self> {
        let r = math::norm(axis);
        if !(r > 0.0) {
            return Err(Error::Domain("zonal axis must be nonzero"));
        }
        Ok(SphereData {
            axis: axis.iter().map(|v| v / r).collect(),
            profile: Arc::new(f),
            zero: false,
        })
    }

    /// `Σ c_k z^k` in `z = η·a`.
    pub fn polynomial(axis: &[f64], coeffs: &[f64]) -> Result<Self> {
        let c = coeffs.to_vec();
        let zero = c.iter().all(|v| *v == 0.0);
        let mut s = Self::zonal(axis, move |z| {
            c.iter().rev().fold(0.0, |acc, v| acc * z + v)
        })?;
        s.zero = zero;
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn ambient(&self) -> usize {
        self.axis.len()
    }

    pub fn eval(&self, eta: &[f64]) -> f64 {
        if self.zero {
            return 0.0;
        }
        (self.profile)(math::dot(eta, &self.axis))
    }

    pub fn eval_z(&self, z: f64) -> f64 {
        if self.zero {
            0.0
        } else {
            (self.profile)(z)
        }
    }
}

/// Interior data `η ↦ F(η·a, |η|²)` on the closed ball.
#[derive(Clone)]
pub struct BallSource {
    pub axis: Vec<f64>,
    pub profile: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl core::fmt::Debug for BallSource {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BallSource")
            .field("axis", &self.axis)
            .field("zero", &self.zero)
            .finish()
    }
}

impl BallSource {
    pub fn zero(d: usize) -> Self {
        let s = SphereData::zero(d);
        BallSource {
            axis: s.axis,
            profile: Arc::new(|_, _| 0.0),
            zero: true,
        }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        let mut s = Self::zero(d);
        s.profile = Arc::new(move |_, _| c);
        s.zero = c == 0.0;
        s
    }

    pub fn new<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(axis: &[f64], f: F) -> Result<Self> {
        let r = math::norm(axis);
        if !(r > 0.0) {
            return Err(Error::Domain("source axis must be nonzero"));
        }
        Ok(BallSource {
            axis: axis.iter().map(|v| v / r).collect(),
            profile: Arc::new(f),
            zero: false,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn eval(&self, eta: &[f64]) -> f64 {
        if self.zero {
            return 0.0;
        }
        (self.profile)(math::dot(eta, &self.axis), math::norm_sq(eta))
    }
}

/// A unit vector orthogonal to the unit vector `a`.
pub fn orthogonal_unit(a: &[f64]) -> Vec<f64> {
    let d = a.len();
    let k = (0..d)
        .min_by(|i, j| math::abs(a[*i]).partial_cmp(&math::abs(a[*j])).unwrap())
        .unwrap_or(0);
    let mut b = alloc::vec![0.0; d];
    b[k] = 1.0;
    let c = math::dot(&b, a);
    for i in 0..d {
        b[i] -= c * a[i];
    }
    let r = math::norm(&b);
    b.iter().map(|v| v / r).collect()
}

/// A point with `η·a = z` and `|η|² = r2`, for `z² <= r2`.
pub fn representative_point(a: &[f64], z: f64, r2: f64) -> Vec<f64> {
    let b = orthogonal_unit(a);
    let w = math::sqrt((r2 - z * z).max(0.0));
    a.iter().zip(&b).map(|(x, y)| z * x + w * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_and_extends() {
        let p =
            Profile::table(alloc::vec![0.0, 1.0, 2.0], alloc::vec![1.0, 0.5, 0.25], 3.0).unwrap();
        assert_eq!(p.eval(0.5), 0.75);
        assert!((p.eval(4.0) - 0.25 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn admissibility() {
        let d = Dimension::new(4).unwrap();
        let f = BoundaryData::radial(1.0, &[0.0; 4], Profile::Rational { a: 2.0 });
        assert!(f.check_admissible(1, d).is_ok());
        assert!(f.check_admissible(2, d).is_err());
        assert!(BoundaryData::constant(4, 1.0)
            .check_admissible(0, d)
            .is_ok());
    }

    #[test]
    fn representative() {
        let a = [0.0, 0.6, 0.8];
        let p = representative_point(&a, 0.3, 0.5);
        assert!((math::dot(&p, &a) - 0.3).abs() < 1e-15);
        assert!((math::norm_sq(&p) - 0.5).abs() < 1e-15);
    }
}
