//! Sharp constants `d_n`, `e_n`, the extremal functions `U_a` and the two geometric ratios.

use alloc::vec::Vec;

use crate::bvp::QuadratureConfig;
use crate::classification::Bubble;
use crate::error::{Error, Result};
use crate::field::{Jet3, ScalarField};
use crate::geometry::{BubbleParams, Dimension};
use crate::math;
use crate::operators::{
    apply_operator, biharmonic_residual, t_constant, BoundaryOperatorId, Measured, Model,
};
use crate::polynomial::{Polynomial, PolynomialField};
use crate::quadrature::{gauss_on, integrate, SphereRule, Tolerance};
use crate::stencil::StencilConfig;

fn integrand(n: f64, r: f64) -> f64 {
    math::powi(r, n as i32)
        * math::pow(
            1.0 + (n - 3.0) / 4.0 * (1.0 - r * r),
            2.0 * (n + 1.0) / (n - 3.0),
        )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpConstants {
    pub n: usize,
    /// `∫₀¹ rⁿ(1 + (n-3)(1-r²)/4)^{2(n+1)/(n-3)} dr`.
    pub integral: f64,
    pub d_n: f64,
    pub e_n: f64,
    pub quadrature_error: f64,
}

fn constants_from(dim: Dimension, integral: f64, quadrature_error: f64) -> SharpConstants {
    let n = dim.nf();
    let area = dim.sphere_area();
    SharpConstants {
        n: dim.n(),
        integral,
        d_n: math::pow(area, -1.0 / n) * integral,
        e_n: math::pow(area, -(7.0 * n + 3.0) / (2.0 * n * (n + 1.0))) / t_constant(dim, 3)
            * math::pow(integral, (n - 3.0) / (2.0 * (n + 1.0))),
        quadrature_error,
    }
}

/// `d_n` and `e_n` from adaptive Gauss–Kronrod quadrature of the radial integral.
pub fn sharp_constants(dim: Dimension, q: &QuadratureConfig) -> Result<SharpConstants> {
    dim.require_classification()?;
    let n = dim.nf();
    let e = integrate(
        |r| integrand(n, r),
        &[0.0, 0.5, 1.0],
        Tolerance::new(q.target_tol * 1e-3, 1e-15),
    );
    Ok(constants_from(dim, e.strict()?, e.error))
}

/// The same radial integral by composite Simpson with `panels` (even) panels.
pub fn radial_integral_simpson(dim: Dimension, panels: usize) -> Result<f64> {
    dim.require_classification()?;
    if panels < 2 || panels % 2 != 0 {
        return Err(Error::Domain("Simpson's rule needs an even panel count"));
    }
    let n = dim.nf();
    let h = 1.0 / panels as f64;
    let terms: Vec<f64> = (0..=panels)
        .map(|k| {
            let w = if k == 0 || k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * integrand(n, k as f64 * h)
        })
        .collect();
    Ok(math::pairwise_sum(&terms) * h / 3.0)
}

/// The extremal `U_a = b^{(n-3)/2} + ((n-3)/4)(1-|ξ|²) b^{(n-1)/2}`,
/// `b = (1-|a|²)/(|a|²|ξ|² - 2a·ξ + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extremal {
    bubble: Bubble,
}

impl Extremal {
    pub fn new(a: &[f64]) -> Result<Self> {
        let bubble = Bubble::new(BubbleParams::ball(a)?)?;
        bubble.dim().require_classification()?;
        Ok(Extremal { bubble })
    }

    pub fn dim(&self) -> Dimension {
        self.bubble.dim()
    }
}

impl ScalarField for Extremal {
    fn ambient(&self) -> usize {
        self.bubble.ambient()
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        let n = self.dim().nf();
        let b = self.bubble.value(p)?;
        Ok(b + (n - 3.0) / 4.0 * (1.0 - math::norm_sq(p)) * math::pow(b, (n - 1.0) / (n - 3.0)))
    }

    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        let n = self.dim().nf();
        let b = self.bubble.jet(p)?;
        let w = Jet3::dist_sq(p, &alloc::vec![0.0; p.len()])
            .scale(-(n - 3.0) / 4.0)
            .add_const((n - 3.0) / 4.0);
        Some(b.add(&w.mul(&b.powf((n - 1.0) / (n - 3.0)))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalCheck {
    pub value: f64,
    /// `Δ²U_a` at an interior point, by finite differences.
    pub bilaplacian: Option<Measured>,
    /// `𝓑₁U_a` at a boundary point, from the exact jet.
    pub b1: Option<f64>,
}

/// Evaluates `U_a` at `ξ`; interior points also get the `Δ²` residual, boundary points the
/// `𝓑₁` residual (membership in the class with vanishing `Q` and mean curvature).
pub fn extremal_eval_and_check(a: &[f64], xi: &[f64], s: StencilConfig) -> Result<ExtremalCheck> {
    let u = Extremal::new(a)?;
    let dim = u.dim();
    dim.check_len(xi)?;
    let r = math::norm(xi);
    let value = u.value(xi)?;
    let on_sphere = math::abs(r - 1.0) < 1e-12;
    let bilaplacian = if r < 1.0 && !on_sphere {
        Some(biharmonic_residual(&u, xi, s)?)
    } else {
        None
    };
    let b1 = if on_sphere {
        Some(apply_operator(
            BoundaryOperatorId::new(1, Model::Ball)?,
            &u,
            xi,
            dim,
            s,
        )?)
    } else {
        None
    };
    Ok(ExtremalCheck {
        value,
        bilaplacian,
        b1,
    })
}

/// Competitors in the same class: `U₀ + δ(H + ((k + 𝕋₁)/2)(1-|ξ|²)H)` with `H` a harmonic
/// polynomial homogeneous of degree `k`. Both summands are biharmonic and the bracket has
/// vanishing `𝓑₁`.
pub fn competitor(dim: Dimension, harmonic: &Polynomial, delta: f64) -> Result<PolynomialField> {
    dim.require_classification()?;
    let d = dim.ambient();
    if harmonic.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: harmonic.dim(),
        });
    }
    if !harmonic.laplacian().is_zero() {
        return Err(Error::Contract("competitor direction must be harmonic"));
    }
    let k = harmonic.degree() as f64;
    let n = dim.nf();
    let one_minus = Polynomial::constant(d, 1.0).add(&Polynomial::norm_sq(d).scale(-1.0));
    let u0 = Polynomial::constant(d, 1.0).add(&one_minus.scale((n - 3.0) / 4.0));
    let beta = (k + t_constant(dim, 1)) / 2.0;
    let dir = harmonic.add(&one_minus.mul(harmonic).scale(beta));
    Ok(PolynomialField::new(u0.add(&dir.scale(delta))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioKind {
    /// `|𝔹|_g / |𝕊ⁿ|_g^{(n+1)/n}`.
    Isoperimetric,
    /// `|𝔹|_g^{(n-3)/(2(n+1))} / ‖T₃‖_{L^{2n/(n+3)}}`.
    T3Ratio,
}

/// Which quantity enters the `L^{2n/(n+3)}` norm of the `T₃` ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T3Normalization {
    /// `𝓑₃U` in `L^q(𝕊ⁿ, dσ)`, the scaling in which `𝓑₃(1) = 𝕋₃`.
    Operator,
    /// `(T₃)_g = (2/(n-3))U^{-(n+3)/(n-3)}𝓑₃U` in `L^q(𝕊ⁿ, dV_g)`.
    Geometric,
}

/// Evaluates a geometric ratio of the metric `U^{4/(n-3)}|dξ|²` by product quadrature of
/// order `q.sphere_order` in each direction.
pub fn ratio_eval<F: ScalarField + ?Sized>(
    kind: RatioKind,
    u: &F,
    dim: Dimension,
    norm: T3Normalization,
    q: &QuadratureConfig,
) -> Result<f64> {
    dim.require_classification()?;
    if u.ambient() != dim.ambient() {
        return Err(Error::DimensionMismatch {
            expected: dim.ambient(),
            found: u.ambient(),
        });
    }
    let n = dim.nf();
    let m = q.sphere_order.max(4);
    let rule = SphereRule::new(dim.n(), m);
    let (rs, ws) = gauss_on(m, 0.0, 1.0);
    let positive = |v: f64| -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Contract("the conformal factor must be positive"))
        }
    };
    let mut vol_parts = Vec::with_capacity(rs.len());
    for (r, wr) in rs.iter().zip(&ws) {
        let mut shell = Vec::with_capacity(rule.points.len());
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x: Vec<f64> = p.iter().map(|c| c * r).collect();
            shell.push(w * math::pow(positive(u.value(&x)?)?, 2.0 * (n + 1.0) / (n - 3.0)));
        }
        vol_parts.push(wr * math::powi(*r, dim.n() as i32) * math::pairwise_sum(&shell));
    }
    let volume = math::pairwise_sum(&vol_parts);
    match kind {
        RatioKind::Isoperimetric => {
            let mut parts = Vec::with_capacity(rule.points.len());
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                parts.push(w * math::pow(positive(u.value(p)?)?, 2.0 * n / (n - 3.0)));
            }
            let area = math::pairwise_sum(&parts);
            Ok(volume / math::pow(area, (n + 1.0) / n))
        }
        RatioKind::T3Ratio => {
            let qexp = 2.0 * n / (n + 3.0);
            let op = BoundaryOperatorId::new(3, Model::Ball)?;
            let s = StencilConfig::new(1e-2, 4)?;
            let mut parts = Vec::with_capacity(rule.points.len());
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let b3 = apply_operator(op, u, p, dim, s)?;
                let v = match norm {
                    T3Normalization::Operator => math::pow(math::abs(b3), qexp),
                    T3Normalization::Geometric => {
                        let uv = positive(u.value(p)?)?;
                        let t3 = 2.0 / (n - 3.0) * math::pow(uv, -(n + 3.0) / (n - 3.0)) * b3;
                        math::pow(math::abs(t3), qexp) * math::pow(uv, 2.0 * n / (n - 3.0))
                    }
                };
                parts.push(w * v);
            }
            let lq = math::pow(math::pairwise_sum(&parts), 1.0 / qexp);
            Ok(math::pow(volume, (n - 3.0) / (2.0 * (n + 1.0))) / lq)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrand_is_one_at_the_rim() {
        for n in 4..9 {
            assert_eq!(integrand(n as f64, 1.0), 1.0);
        }
    }

    #[test]
    fn two_quadratures_agree() {
        let dim = Dimension::new(4).unwrap();
        let c = sharp_constants(dim, &QuadratureConfig::default()).unwrap();
        let s = radial_integral_simpson(dim, 2000).unwrap();
        assert!((c.integral - s).abs() < 1e-10);
        assert!((c.integral - 0.449).abs() < 1e-3, "{c:?}");
        assert!((c.d_n - 0.198).abs() < 1e-3, "{c:?}");
    }

    #[test]
    fn extremal_at_origin() {
        let c = extremal_eval_and_check(&[0.0; 6], &[0.0; 6], StencilConfig::new(0.05, 4).unwrap())
            .unwrap();
        assert!((c.value - 1.5).abs() < 1e-15);
        let mut eta = [0.0; 6];
        eta[2] = 1.0;
        let c = extremal_eval_and_check(&[0.0; 6], &eta, StencilConfig::default()).unwrap();
        assert!(c.b1.unwrap().abs() < 1e-14);
    }

    #[test]
    fn competitors_have_vanishing_b1() {
        let dim = Dimension::new(5).unwrap();
        let d = 6;
        let h = Polynomial::coordinate(d, 0)
            .pow(2)
            .add(&Polynomial::coordinate(d, 1).pow(2).scale(-1.0));
        let u = competitor(dim, &h, 0.1).unwrap();
        let eta = [0.6, 0.0, 0.0, 0.8, 0.0, 0.0];
        let b1 = apply_operator(
            BoundaryOperatorId::new(1, Model::Ball).unwrap(),
            &u,
            &eta,
            dim,
            StencilConfig::default(),
        );
        assert!(b1.unwrap().abs() < 1e-14);
        assert!(u.bilaplacian(&eta).unwrap().abs() < 1e-12);
    }
}
