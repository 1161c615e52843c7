//! Points, dimensions, the conformal map between the half-space and the ball,
//! and the distance identities the kernels and Green functions rely on.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::math;

/// Which formula family applies: ambient dimension four uses logarithmic kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Generic,
    Critical,
}

/// Boundary dimension `n`; the ambient space has dimension `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dimension {
    n: usize,
    branch: Branch,
    area: f64,
}

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("boundary dimension must be at least 2"));
        }
        let branch = if n == 3 {
            Branch::Critical
        } else {
            Branch::Generic
        };
        Ok(Dimension {
            n,
            branch,
            area: sphere_area(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn ambient(&self) -> usize {
        self.n + 1
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn is_critical(&self) -> bool {
        self.branch == Branch::Critical
    }

    /// `|S^n|`.
    pub fn sphere_area(&self) -> f64 {
        self.area
    }

    /// Critical exponent `p_k* = (n + 2k - 3)/(n - 3)`.
    pub fn p_star(&self, k: usize) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("critical exponents are undefined for n = 3"));
        }
        let n = self.nf();
        Ok((n + 2.0 * k as f64 - 3.0) / (n - 3.0))
    }

    /// Classification results need `n >= 4`.
    pub fn require_classification(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Contract("classification features require n >= 4"));
        }
        Ok(())
    }

    pub fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `|S^n| = 2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("sphere dimension must be at least 1"));
    }
    let h = (n as f64 + 1.0) / 2.0;
    Ok(2.0 * math::pow(core::f64::consts::PI, h) / math::gamma(h))
}

/// A point `X = (x, t)` of the closed upper half-space, stored as `[x.., t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn new(x: &[f64], t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("half-space point needs finite x and t >= 0"));
        }
        let mut coords = Vec::with_capacity(x.len() + 1);
        coords.extend_from_slice(x);
        coords.push(t);
        Ok(HalfSpacePoint { coords })
    }

    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        let (t, x) = coords.split_last().ok_or(Error::Domain("empty point"))?;
        Self::new(x, *t)
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn t(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    /// `X̄ = (x, -t)`; leaves the half-space, so it is returned as raw coordinates.
    pub fn reflected(&self) -> Vec<f64> {
        let mut r = self.coords.clone();
        let last = r.len() - 1;
        r[last] = -r[last];
        r
    }

    pub fn is_boundary(&self) -> bool {
        self.t() == 0.0
    }
}

/// A point of the closed unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    pub fn new(xi: &[f64]) -> Result<Self> {
        if xi.iter().any(|v| !v.is_finite()) || math::norm_sq(xi) > 1.0 + 1e-12 {
            return Err(Error::Domain("ball point must satisfy |xi| <= 1"));
        }
        Ok(BallPoint {
            coords: xi.to_vec(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        math::norm(&self.coords)
    }

    pub fn is_boundary(&self) -> bool {
        math::abs(self.norm() - 1.0) < 1e-14
    }

    /// `ξ* = ξ/|ξ|²`. Not formed near the origin.
    pub fn inversion(&self) -> Result<Vec<f64>> {
        let r2 = math::norm_sq(&self.coords);
        if r2 < 1e-20 {
            return Err(Error::Singularity("inversion at the ball centre"));
        }
        Ok(self.coords.iter().map(|v| v / r2).collect())
    }
}

/// The south pole `-e_{n+1}` in ambient dimension `d`.
pub fn south_pole(d: usize) -> Vec<f64> {
    let mut e = alloc::vec![0.0; d];
    e[d - 1] = -1.0;
    e
}

/// `|X + e_{n+1}|`, the distance to the south pole.
pub fn pole_distance(p: &[f64]) -> f64 {
    let d = p.len();
    let scale = p.iter().enumerate().fold(0.0f64, |m, (i, v)| {
        let w = if i + 1 == d { v + 1.0 } else { *v };
        m.max(math::abs(w))
    });
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = p
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = (if i + 1 == d { v + 1.0 } else { *v }) / scale;
            w * w
        })
        .sum();
    scale * math::sqrt(s)
}

const POLE_GUARD: f64 = 1e-8;

/// `F(X) = -e + 2(X + e)/|X + e|²`, an involution exchanging the half-space and the ball.
pub fn conformal_map(p: &[f64]) -> Result<Vec<f64>> {
    let r = pole_distance(p);
    if r < POLE_GUARD {
        return Err(Error::Singularity(
            "conformal map evaluated at the south pole",
        ));
    }
    let s = 2.0 / (r * r);
    let d = p.len();
    Ok(p.iter()
        .enumerate()
        .map(|(i, v)| {
            if i + 1 == d {
                (v + 1.0) * s - 1.0
            } else {
                v * s
            }
        })
        .collect())
}

pub fn half_to_ball(p: &HalfSpacePoint) -> Result<BallPoint> {
    let xi = conformal_map(p.coords())?;
    Ok(BallPoint {
        coords: clamp_to_ball(xi),
    })
}

pub fn ball_to_half(p: &BallPoint) -> Result<HalfSpacePoint> {
    let mut x = conformal_map(p.coords())?;
    let last = x.len() - 1;
    if x[last] < 0.0 && x[last] > -1e-13 {
        x[last] = 0.0;
    }
    HalfSpacePoint::from_coords(&x)
}

fn clamp_to_ball(mut xi: Vec<f64>) -> Vec<f64> {
    let r = math::norm(&xi);
    if r > 1.0 && r < 1.0 + 1e-12 {
        for v in xi.iter_mut() {
            *v /= r;
        }
    }
    xi
}

/// `U₀(X) = (2/|X + e|²)^{(n-3)/2}`.
pub fn conformal_factor(p: &[f64], dim: Dimension) -> f64 {
    let r = pole_distance(p);
    math::pow(2.0 / (r * r), (dim.nf() - 3.0) / 2.0)
}

/// Relative residuals of the three distance identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceResiduals {
    /// `2|ξ+e|⁻¹|η+e|⁻¹|ξ-η|` against `|F(ξ) - F(η)|`.
    pub map_distance: f64,
    /// `2|ξ||ξ*-η|` against `|ξ+e||η+e||X̄ - Y|`.
    pub reflected: f64,
    /// `|ξ|²|ξ*-η|²` against `|ξ-η|² + (1-|ξ|²)(1-|η|²)`.
    pub extended: f64,
}

impl DistanceResiduals {
    pub fn max(&self) -> f64 {
        self.map_distance.max(self.reflected).max(self.extended)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let s = math::abs(a).max(math::abs(b));
    if s == 0.0 {
        0.0
    } else {
        math::abs(a - b) / s
    }
}

/// The extended product `|ξ||ξ* - η|`, defined for every pair including `ξ = 0`.
pub fn reflected_distance(xi: &[f64], eta: &[f64]) -> f64 {
    let a = math::dist_sq(xi, eta);
    let b = (1.0 - math::norm_sq(xi)) * (1.0 - math::norm_sq(eta));
    math::sqrt((a + b).max(0.0))
}

pub fn distance_identity_residual(xi: &BallPoint, eta: &BallPoint) -> Result<DistanceResiduals> {
    let (a, b) = (xi.coords(), eta.coords());
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (ra, rb) = (pole_distance(a), pole_distance(b));
    if ra < POLE_GUARD || rb < POLE_GUARD {
        return Err(Error::Singularity("distance identity at the south pole"));
    }
    let fa = conformal_map(a)?;
    let fb = conformal_map(b)?;
    let map_distance = rel(2.0 * math::dist(a, b) / (ra * rb), math::dist(&fa, &fb));

    let mut fa_bar = fa.clone();
    let last = fa_bar.len() - 1;
    fa_bar[last] = -fa_bar[last];
    let rhs = ra * rb * math::dist(&fa_bar, &fb);
    let lhs = 2.0 * reflected_distance(a, b);
    let reflected = rel(lhs, rhs);

    let extended = if math::norm_sq(a) < 1e-20 {
        0.0
    } else {
        let star = xi.inversion()?;
        let direct = math::norm_sq(a) * math::dist_sq(&star, b);
        rel(direct, reflected_distance(a, b) * reflected_distance(a, b))
    };
    Ok(DistanceResiduals {
        map_distance,
        reflected,
        extended,
    })
}

/// `u*(X) = |X|^{3-n} u(X/|X|²)`.
pub fn kelvin_transform<F: ScalarField + ?Sized>(u: &F, p: &[f64], dim: Dimension) -> Result<f64> {
    let r2 = math::norm_sq(p);
    if r2 == 0.0 {
        return Err(Error::Singularity("Kelvin transform at the origin"));
    }
    let q: Vec<f64> = p.iter().map(|v| v / r2).collect();
    Ok(math::pow(r2, (3.0 - dim.nf()) / 2.0) * u.value(&q)?)
}

/// Field wrapper evaluating the Kelvin transform of an inner field.
pub struct Kelvin<'a, F: ScalarField + ?Sized> {
    pub inner: &'a F,
    pub dim: Dimension,
}

impl<F: ScalarField + ?Sized> ScalarField for Kelvin<'_, F> {
    fn ambient(&self) -> usize {
        self.dim.ambient()
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        kelvin_transform(self.inner, p, self.dim)
    }
}

/// Parameters of a geometric bubble on either model.
#[derive(Clone, Debug, PartialEq)]
pub enum BubbleParams {
    HalfSpace { x0: Vec<f64>, eps: f64 },
    Ball { xi0: Vec<f64> },
}

impl BubbleParams {
    pub fn half_space(x0: &[f64], eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Domain("bubble scale must be positive"));
        }
        Ok(BubbleParams::HalfSpace {
            x0: x0.to_vec(),
            eps,
        })
    }

    pub fn ball(xi0: &[f64]) -> Result<Self> {
        if !(math::norm_sq(xi0) < 1.0) {
            return Err(Error::Domain("bubble centre must lie in the open ball"));
        }
        Ok(BubbleParams::Ball { xi0: xi0.to_vec() })
    }

    /// The ball centre matched to a half-space bubble: `ξ₀ = F(x₀, ε)`.
    pub fn matched_ball(&self) -> Result<Self> {
        match self {
            BubbleParams::HalfSpace { x0, eps } => {
                let mut p = x0.clone();
                p.push(*eps);
                Ok(BubbleParams::Ball {
                    xi0: conformal_map(&p)?,
                })
            }
            BubbleParams::Ball { .. } => Ok(self.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(4).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn map_fixed_points() {
        let xi = conformal_map(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(xi, alloc::vec![0.0, 0.0, 1.0]);
        let xi = conformal_map(&[0.0, 0.0, 1.0]).unwrap();
        assert!(math::norm(&xi) < 1e-16);
        assert!(conformal_map(&[0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn factor_values() {
        let d5 = Dimension::new(5).unwrap();
        assert!((conformal_factor(&[0.0; 6], d5) - 2.0).abs() < 1e-15);
        let mut p = [0.0; 6];
        p[5] = 1.0;
        assert!((conformal_factor(&p, d5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_branch() {
        assert!(Dimension::new(3).unwrap().is_critical());
        assert!(!Dimension::new(4).unwrap().is_critical());
        assert!(Dimension::new(1).is_err());
        assert!(Dimension::new(3).unwrap().require_classification().is_err());
    }
}
