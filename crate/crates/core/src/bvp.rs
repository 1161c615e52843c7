//! Quadrature for the Poisson integrals on both models, the ball volume potential,
//! the Green-formula solve and the boundary-limit, decay, comparison and GJMS checks.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::{
    representative_point, BallSource, BoundaryData, Profile, RadialTerm, SphereData,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::ScalarField;
use crate::geometry::{sphere_area, Dimension};
use crate::green::{green_from_gap, green_from_squares, GreenSpec, OperatorPair};
use crate::kernels::{
    ball_kernel_radial, half_space_kernel, half_space_kernel_expr, operator_kernel_expr,
};
use crate::math;
use crate::operators::{BallTrace, Model};
use crate::polynomial::{Polynomial, PolynomialField};
use crate::quadrature::{
    extrapolate_to_zero, gauss_on, integrate, sphere_axial_weight, sphere_two_angle_weight,
    Estimate, Tolerance,
};

/// Accuracy controls shared by every integral in this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute accuracy requested from each adaptive integral.
    pub target_tol: f64,
    pub max_refinements: usize,
    /// Cut the half-space integrals at this radius instead of mapping the tail to a finite interval.
    pub truncation_radius: Option<f64>,
    /// Gauss–Legendre order per direction for the volume potential.
    pub sphere_order: usize,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            target_tol: 1e-9,
            max_refinements: 1,
            truncation_radius: None,
            sphere_order: 12,
            max_intervals: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(target_tol: f64) -> Result<Self> {
        if !(target_tol > 0.0) {
            return Err(Error::Contract("target tolerance must be positive"));
        }
        Ok(QuadratureConfig {
            target_tol,
            ..Default::default()
        })
    }

    /// One refinement step: tighter tolerance and higher fixed orders.
    pub fn refined(&self) -> Self {
        QuadratureConfig {
            target_tol: self.target_tol / 16.0,
            sphere_order: self.sphere_order + self.sphere_order / 2,
            max_intervals: self.max_intervals * 2,
            ..*self
        }
    }

    fn tol(&self, share: f64) -> Tolerance {
        Tolerance {
            abs: self.target_tol * share,
            rel: 1e-14,
            max_intervals: self.max_intervals,
        }
    }
}

/// A well-posed pair on a given dimension, with the free constant of the `n = 3` kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Problem {
    pub pair: OperatorPair,
    pub dim: Dimension,
    pub log_constant: f64,
}

impl Problem {
    pub fn new(pair: OperatorPair, dim: Dimension) -> Self {
        Problem {
            pair,
            dim,
            log_constant: 0.0,
        }
    }
}

fn combine(parts: &[Estimate]) -> Estimate {
    let values: Vec<f64> = parts.iter().map(|e| e.value).collect();
    Estimate {
        value: math::pairwise_sum(&values),
        error: parts.iter().map(|e| e.error).sum(),
        converged: parts.iter().all(|e| e.converged),
    }
}

pub(crate) fn accept(e: Estimate, q: &QuadratureConfig) -> Result<f64> {
    if e.converged || e.error <= q.target_tol {
        Ok(e.value)
    } else {
        Err(Error::Quadrature {
            estimate: e.value,
            error: e.error,
        })
    }
}

fn sorted_points(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p > lo && *p < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(l) if p - l <= 1e-12 * p.abs().max(1e-300) => {}
            _ => out.push(p),
        }
    }
    out
}

/// Breakpoints toward 1 for integrands mapped from an infinite tail.
fn tail_points() -> Vec<f64> {
    let mut p = vec![0.0];
    let mut h = 0.5;
    for _ in 0..12 {
        p.push(1.0 - h);
        h *= 0.5;
    }
    p.push(1.0);
    p
}

/// `∫_{S^{n-1}} [φ(|x + ρω - c|) - b] dω` for a radial profile, with `D = |x - c|` and
/// baseline `b = φ(D)` when `centered`, else `b = 0`.
fn ring_excess(
    n: usize,
    profile: &Profile,
    d: f64,
    rho: f64,
    breaks: &[f64],
    centered: bool,
) -> Estimate {
    let full = sphere_area(n - 1).unwrap_or(2.0);
    let phi_d = if centered { profile.eval(d) } else { 0.0 };
    if let Profile::Constant = profile {
        return Estimate {
            value: full * (1.0 - phi_d),
            error: 0.0,
            converged: true,
        };
    }
    if d == 0.0 || rho == 0.0 {
        return Estimate {
            value: full * (profile.eval(rho.max(d)) - phi_d),
            error: 0.0,
            converged: true,
        };
    }
    let w = sphere_axial_weight(n - 1);
    let mut pts = Vec::with_capacity(breaks.len());
    for k in breaks {
        let c = (k * k - rho * rho - d * d) / (2.0 * rho * d);
        if c > -1.0 && c < 1.0 {
            pts.push(math::acos(c));
        }
    }
    let pts = sorted_points(pts, 0.0, core::f64::consts::PI);
    let e = integrate(
        |psi| {
            let r2 = (rho * rho + d * d + 2.0 * rho * d * math::cos(psi)).max(0.0);
            let s = if n == 2 {
                1.0
            } else {
                math::powi(math::sin(psi), n as i32 - 2)
            };
            (profile.eval(math::sqrt(r2)) - phi_d) * s
        },
        &pts,
        Tolerance {
            abs: 1e-16 * (1.0 + math::abs(phi_d)),
            rel: 1e-13,
            max_intervals: 200,
        },
    );
    Estimate {
        value: w * e.value,
        error: w * e.error,
        converged: e.converged,
    }
}

fn radial_term_convolution<K: Fn(f64, f64) -> f64>(
    kernel: &K,
    n: usize,
    term: &RadialTerm,
    x: &[f64],
    t: f64,
    q: &QuadratureConfig,
    share: f64,
) -> Estimate {
    let profile = &term.profile;
    let d = math::dist(x, &term.center);
    let l = profile.scale();
    let full = sphere_area(n - 1).unwrap_or(2.0);
    // Splitting off the mean pays when the kernel is the narrower factor; when the data are
    // the narrower one it would integrate a possibly divergent kernel mass only to cancel it.
    let centered = t <= 4.0 * l;
    let a0 = if centered {
        full * profile.eval(d)
    } else {
        0.0
    };
    let mut scales: Vec<f64> = Vec::new();
    for k in -3..=3 {
        scales.push(l * math::powi(2.0, k));
    }
    scales.extend(profile.kinks());
    let mut pts = Vec::new();
    for k in -10..=3 {
        let f = math::powi(2.0, k);
        pts.push(t * f);
        pts.push(l * f);
    }
    if d > 0.0 {
        pts.push(d);
        for s in &scales {
            pts.push(d + s);
            pts.push(math::abs(d - s));
        }
    } else {
        pts.extend(profile.kinks());
    }
    let top = pts.iter().fold(0.0f64, |m, v| m.max(*v)) * 2.0;
    let end = match q.truncation_radius {
        Some(r) if r < top => r,
        _ => top,
    };
    let pts = sorted_points(pts, 0.0, end);
    let rpow = |rho: f64| math::powi(rho, n as i32 - 1);

    let tol = q.tol(share / 3.0);
    let p1 = integrate(
        |rho| {
            let ex = ring_excess(n, profile, d, rho, &scales, centered).value;
            if ex == 0.0 {
                0.0
            } else {
                rpow(rho) * kernel(t, rho * rho) * ex
            }
        },
        &pts,
        tol,
    );
    let mass_pts = {
        let mut m = pts.clone();
        for k in -12..=0 {
            m.push(t * math::powi(2.0, k));
        }
        sorted_points(m, 0.0, end)
    };
    let p2 = if a0 == 0.0 {
        Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        }
    } else {
        let m = integrate(
            |rho| rpow(rho) * kernel(t, rho * rho),
            &mass_pts,
            Tolerance {
                abs: tol.abs / math::abs(a0),
                ..tol
            },
        );
        Estimate {
            value: a0 * m.value,
            error: math::abs(a0) * m.error,
            converged: m.converged,
        }
    };
    let p3 = match q.truncation_radius {
        Some(r) if r <= end => Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        },
        Some(r) => integrate(
            |rho| {
                rpow(rho)
                    * kernel(t, rho * rho)
                    * ring_excess(n, profile, d, rho, &scales, false).value
            },
            &sorted_points(vec![], end, r),
            tol,
        ),
        None => integrate(
            |tau| {
                let rho = end / (1.0 - tau);
                let jac = end / ((1.0 - tau) * (1.0 - tau));
                let v = rpow(rho) * kernel(t, rho * rho);
                if v == 0.0 {
                    0.0
                } else {
                    v * jac * ring_excess(n, profile, d, rho, &scales, false).value
                }
            },
            &tail_points(),
            tol,
        ),
    };
    let e = combine(&[p1, p2, p3]);
    Estimate {
        value: term.coef * e.value,
        error: math::abs(term.coef) * e.error,
        converged: e.converged,
    }
}

/// `∫_{ℝⁿ} K(t, |x - y|²) f(y) dy` by polar coordinates about `x`.
///
/// When the kernel is narrower than the data, the spherical mean at `ρ = 0` is split off and
/// integrated against the kernel alone, so strongly peaked or sign-changing kernels cost no
/// accuracy. The tail beyond the last breakpoint is mapped onto a finite interval unless a
/// truncation radius is configured.
pub fn kernel_convolution<K: Fn(f64, f64) -> f64>(
    kernel: K,
    dim: Dimension,
    data: &BoundaryData,
    x: &[f64],
    t: f64,
    q: &QuadratureConfig,
) -> Result<Estimate> {
    if x.len() != dim.n() {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            found: x.len(),
        });
    }
    if !(t > 0.0) {
        return Err(Error::Domain("kernel convolution needs t > 0"));
    }
    let active: Vec<&RadialTerm> = data.terms.iter().filter(|t| t.coef != 0.0).collect();
    if active.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    }
    let share = 1.0 / active.len() as f64;
    let parts: Vec<Estimate> = active
        .iter()
        .map(|term| radial_term_convolution(&kernel, dim.n(), term, x, t, q, share))
        .collect();
    Ok(combine(&parts))
}

/// `[P_i ∗ f_i + P_j ∗ f_j](X)` on the half-space, `X = [x.., t]` with `t > 0`.
pub fn half_space_poisson(
    prob: &Problem,
    fi: &BoundaryData,
    fj: &BoundaryData,
    p: &[f64],
    q: &QuadratureConfig,
) -> Result<f64> {
    let dim = prob.dim;
    dim.check_len(p)?;
    let (x, t) = (&p[..dim.n()], p[dim.n()]);
    let mut total = Vec::with_capacity(2);
    for (k, f) in [(prob.pair.i(), fi), (prob.pair.j(), fj)] {
        f.check_admissible(k, dim)?;
        let c = prob.log_constant;
        let e = kernel_convolution(|t, s| half_space_kernel(k, dim, t, s, c), dim, f, x, t, q)?;
        total.push(accept(e, q)?);
    }
    Ok(total[0] + total[1])
}

/// `∫_{𝕊ⁿ} f`, for zonal `f`.
pub fn sphere_integral(dim: Dimension, f: &SphereData, q: &QuadratureConfig) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let n = dim.n();
    let w = sphere_axial_weight(n);
    let e = integrate(
        |th| f.eval_z(math::cos(th)) * math::powi(math::sin(th), n as i32 - 1),
        &[0.0, 0.5 * core::f64::consts::PI, core::f64::consts::PI],
        q.tol(0.1 / w),
    );
    Ok(w * accept(e, q)?)
}

/// `∫_{𝕊ⁿ} P̄_k(ξ, η) f(η) dV(η)` for zonal `f`, including boundary `ξ` for `k = 3`.
pub fn ball_kernel_integral(
    k: usize,
    dim: Dimension,
    xi: &[f64],
    f: &SphereData,
    log_constant: f64,
    q: &QuadratureConfig,
) -> Result<Estimate> {
    dim.check_len(xi)?;
    if f.ambient() != dim.ambient() {
        return Err(Error::DimensionMismatch {
            expected: dim.ambient(),
            found: f.ambient(),
        });
    }
    let zero = Estimate {
        value: 0.0,
        error: 0.0,
        converged: true,
    };
    if f.is_zero() {
        return Ok(zero);
    }
    let n = dim.n();
    let r = math::norm(xi);
    if r > 1.0 + 1e-12 {
        return Err(Error::Domain("point outside the closed ball"));
    }
    let r = r.min(1.0);
    let delta = 1.0 - r;
    if delta == 0.0 && k < 3 {
        return Ok(zero);
    }
    let w = delta * (1.0 + r);
    let kern = |th: f64| {
        let s = math::sin(0.5 * th);
        let dist = math::sqrt(delta * delta + 4.0 * r * s * s);
        ball_kernel_radial(k, dim, w, dist, log_constant)
    };
    let full = sphere_area(n - 1).unwrap_or(2.0);
    let ring = sphere_two_angle_weight(n);
    let pi = core::f64::consts::PI;
    let (alpha, beta) = if r == 0.0 {
        (1.0, 0.0)
    } else {
        let u: Vec<f64> = xi.iter().map(|v| v / r).collect();
        let al = math::dot(&u, &f.axis).clamp(-1.0, 1.0);
        (al, math::sqrt((1.0 - al * al).max(0.0)))
    };
    let phi0 = f.eval_z(alpha);
    let excess = |th: f64| -> f64 {
        let (c, s) = (math::cos(th), math::sin(th));
        if beta < 1e-15 {
            return full * (f.eval_z(alpha * c) - phi0);
        }
        let e = integrate(
            |psi| {
                let sp = if n == 2 {
                    1.0
                } else {
                    math::powi(math::sin(psi), n as i32 - 2)
                };
                (f.eval_z(alpha * c + beta * s * math::cos(psi)) - phi0) * sp
            },
            &[0.0, 0.5 * pi, pi],
            Tolerance {
                abs: 1e-16 * (1.0 + math::abs(phi0)),
                rel: 1e-13,
                max_intervals: 200,
            },
        );
        ring * e.value
    };
    let mut pts = Vec::new();
    let lo = delta.max(1e-7);
    let mut h = lo / 4.0;
    while h < pi {
        pts.push(h);
        h *= 2.0;
    }
    pts.push(0.5 * pi);
    let pts = sorted_points(pts, 0.0, pi);
    let sin_pow = |th: f64| math::powi(math::sin(th), n as i32 - 1);
    let p1 = integrate(|th| sin_pow(th) * kern(th) * excess(th), &pts, q.tol(0.3));
    let p2 = if phi0 == 0.0 {
        zero
    } else {
        let m = integrate(
            |th| sin_pow(th) * kern(th),
            &pts,
            q.tol(0.3 / (full * math::abs(phi0))),
        );
        Estimate {
            value: full * phi0 * m.value,
            error: full * math::abs(phi0) * m.error,
            converged: m.converged,
        }
    };
    Ok(combine(&[p1, p2]))
}

/// `[P̄_i ∗ f_i + P̄_j ∗ f_j](ξ)` on the ball.
pub fn ball_poisson(
    prob: &Problem,
    fi: &SphereData,
    fj: &SphereData,
    xi: &[f64],
    q: &QuadratureConfig,
) -> Result<f64> {
    let dim = prob.dim;
    if dim.is_critical() && prob.pair.j() == 3 {
        let m = sphere_integral(dim, fj, q)?;
        if math::abs(m) > 1e3 * q.target_tol.max(1e-12) {
            return Err(Error::Contract(
                "data for the logarithmic kernel must have zero mean on the sphere",
            ));
        }
    }
    let mut total = 0.0;
    for (k, f) in [(prob.pair.i(), fi), (prob.pair.j(), fj)] {
        total += accept(
            ball_kernel_integral(k, dim, xi, f, prob.log_constant, q)?,
            q,
        )?;
    }
    Ok(total)
}

/// `∫_{𝔹ⁿ⁺¹} Ḡ^{(i,j)}(ξ, η) f(η) dη` by tensor Gauss–Legendre in polar coordinates about `ξ`.
///
/// Directions are parametrized by the angle to `ξ/|ξ|` and the angle of the remaining component
/// to the data axis; the `|ξ-η|^{3-n}` singularity is absorbed by the Jacobian `ρⁿ`.
pub fn volume_potential(
    prob: &Problem,
    f: &BallSource,
    xi: &[f64],
    q: &QuadratureConfig,
) -> Result<f64> {
    let dim = prob.dim;
    dim.check_len(xi)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let r = math::norm(xi);
    if r > 1.0 + 1e-12 {
        return Err(Error::Domain("point outside the closed ball"));
    }
    let n = dim.n();
    let spec = GreenSpec {
        pair: prob.pair,
        model: Model::Ball,
        dim,
        log_constant: prob.log_constant,
    };
    let m = q.sphere_order.max(4);
    let pi = core::f64::consts::PI;
    let u: Vec<f64> = if r > 0.0 {
        xi.iter().map(|v| v / r).collect()
    } else {
        f.axis.clone()
    };
    let au = math::dot(&f.axis, &u);
    let perp = math::sqrt((1.0 - au * au).max(0.0));
    let xa = math::dot(xi, &f.axis);
    let wwt = sphere_two_angle_weight(n);
    let (th, wth) = gauss_on(m, 0.0, pi);
    let (ph, wph) = gauss_on(m, 0.0, pi);
    let (s, ws) = gauss_on(m, 0.0, 1.0);
    let mut parts = Vec::with_capacity(m * m);
    for (t, wt) in th.iter().zip(&wth) {
        let (ct, st) = (math::cos(*t), math::sin(*t));
        let xo = r * ct;
        let rmax = -xo + math::sqrt(xo * xo + (1.0 - r * r).max(0.0));
        if rmax <= 0.0 {
            continue;
        }
        let jt = wt * math::powi(st, n as i32 - 1);
        for (p, wp) in ph.iter().zip(&wph) {
            let oa = ct * au + st * math::cos(*p) * perp;
            let jp = if n == 2 {
                *wp
            } else {
                wp * math::powi(math::sin(*p), n as i32 - 2)
            };
            let mut acc = 0.0;
            for (sv, sw) in s.iter().zip(&ws) {
                let rho = sv * rmax;
                let eta2 = r * r + 2.0 * rho * xo + rho * rho;
                let q1 = rho * rho;
                let gap = (1.0 - r * r) * (1.0 - eta2).max(0.0);
                let g = green_from_gap(&spec, q1, q1 + gap, gap);
                let val = (f.profile)(xa + rho * oa, eta2);
                acc += sw * math::powi(rho, n as i32) * g * val;
            }
            parts.push(jt * jp * acc * rmax);
        }
    }
    Ok(wwt * math::pairwise_sum(&parts))
}

/// `|𝕊ⁿ| ∫₀¹ rⁿ Ḡ(0, r) dr`: the volume potential of `f ≡ 1` at the center by radial shells.
pub fn volume_potential_center_shells(prob: &Problem, q: &QuadratureConfig) -> Result<f64> {
    let dim = prob.dim;
    let spec = GreenSpec {
        pair: prob.pair,
        model: Model::Ball,
        dim,
        log_constant: prob.log_constant,
    };
    let n = dim.n();
    let e = integrate(
        |r| math::powi(r, n as i32) * green_from_squares(&spec, r * r, 1.0),
        &[0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0],
        q.tol(0.1),
    );
    Ok(dim.sphere_area() * accept(e, q)?)
}

/// A manufactured solution `U(ξ) = Σ c·(a·ξ)^p |ξ|^{2m}`, zonal about the unit axis `a`.
#[derive(Clone, Debug)]
pub struct ZonalPolynomial {
    pub axis: Vec<f64>,
    pub coeffs: Vec<(u32, u32, f64)>,
    field: Arc<PolynomialField>,
}

impl ZonalPolynomial {
    pub fn new(axis: &[f64], coeffs: &[(u32, u32, f64)]) -> Result<Self> {
        let r = math::norm(axis);
        if !(r > 0.0) {
            return Err(Error::Domain("axis must be nonzero"));
        }
        let a: Vec<f64> = axis.iter().map(|v| v / r).collect();
        let d = a.len();
        let lin = Polynomial::linear(&a);
        let sq = Polynomial::norm_sq(d);
        let mut p = Polynomial::zero(d);
        for (pw, mw, c) in coeffs {
            p = p.add(&lin.pow(*pw).mul(&sq.pow(*mw)).scale(*c));
        }
        Ok(ZonalPolynomial {
            axis: a,
            coeffs: coeffs.to_vec(),
            field: Arc::new(PolynomialField::new(p)),
        })
    }

    pub fn field(&self) -> &PolynomialField {
        &self.field
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        self.field.polynomial().eval(xi)
    }

    /// `𝓑_k U` on the sphere, as zonal data.
    pub fn boundary_data(&self, k: usize, dim: Dimension) -> Result<SphereData> {
        let field = self.field.clone();
        let a = self.axis.clone();
        SphereData::zonal(&self.axis, move |z| {
            let eta = representative_point(&a, z.clamp(-1.0, 1.0), 1.0);
            let j = field.jet(&eta).expect("polynomial jets are exact");
            BallTrace::from_jet(&j, &eta).apply(k, dim)
        })
    }

    /// `Δ²U`.
    pub fn source(&self) -> Result<BallSource> {
        let field = self.field.clone();
        let a = self.axis.clone();
        BallSource::new(&self.axis, move |z, r2| {
            let eta = representative_point(&a, z, r2.max(z * z));
            field
                .bilaplacian(&eta)
                .expect("polynomial bilaplacian is exact")
        })
    }
}

/// `[Ḡ ∗ f + P̄_i ∗ f_i + P̄_j ∗ f_j](ξ)`.
pub fn green_formula(
    prob: &Problem,
    f: &BallSource,
    fi: &SphereData,
    fj: &SphereData,
    xi: &[f64],
    q: &QuadratureConfig,
) -> Result<f64> {
    Ok(volume_potential(prob, f, xi, q)? + ball_poisson(prob, fi, fj, xi, q)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrip {
    pub max_error: f64,
    pub errors: Vec<f64>,
}

/// Rebuilds a manufactured solution from its data through the Green formula.
pub fn solve_and_roundtrip(
    prob: &Problem,
    u: &ZonalPolynomial,
    q: &QuadratureConfig,
    samples: &[Vec<f64>],
) -> Result<RoundTrip> {
    let dim = prob.dim;
    if dim.is_critical() && prob.pair.j() == 3 {
        return Err(Error::Contract(
            "for n = 3 the pairs (1,3) and (2,3) determine U only up to a constant",
        ));
    }
    if u.axis.len() != dim.ambient() {
        return Err(Error::DimensionMismatch {
            expected: dim.ambient(),
            found: u.axis.len(),
        });
    }
    let f = u.source()?;
    let fi = u.boundary_data(prob.pair.i(), dim)?;
    let fj = u.boundary_data(prob.pair.j(), dim)?;
    let mut errors = Vec::with_capacity(samples.len());
    for s in samples {
        let v = green_formula(prob, &f, &fi, &fj, s, q)?;
        errors.push(math::abs(v - u.value(s)));
    }
    let max_error = errors.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(RoundTrip { max_error, errors })
}

/// Extrapolated boundary traces of `v = P_i ∗ f_i + P_j ∗ f_j` at `(x, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLimit {
    /// `lim 𝓑_i v` and `lim 𝓑_j v`.
    pub traces: [f64; 2],
    /// `lim (𝓑_i P_i) ∗ f_i` and `lim (𝓑_j P_j) ∗ f_j`.
    pub own: [f64; 2],
    /// `lim (𝓑_i P_j) ∗ f_j` and `lim (𝓑_j P_i) ∗ f_i`.
    pub cross: [f64; 2],
    /// `f_i(x)` and `f_j(x)`.
    pub data: [f64; 2],
    /// Size of the last Neville correction for each trace.
    pub changes: [f64; 2],
}

pub(crate) fn extrapolated_convolution(
    kernel: &Expr,
    dim: Dimension,
    f: &BoundaryData,
    x: &[f64],
    ts: &[f64],
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let mut vals = Vec::with_capacity(ts.len());
    for t in ts {
        let e = kernel_convolution(|t, s| kernel.eval(t, s), dim, f, x, *t, q)?;
        vals.push(accept(e, q)?);
    }
    Ok(extrapolate_to_zero(ts, &vals))
}

/// The default heights `0.05·2^{-k}`, `k = 0..6`.
pub fn default_heights() -> Vec<f64> {
    (0..6).map(|k| 0.05 * math::powi(0.5, k)).collect()
}

fn check_heights(ts: &[f64]) -> Result<()> {
    if ts.len() < 4 {
        return Err(Error::Contract("extrapolation needs at least four heights"));
    }
    if ts.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) || ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Contract("heights must be decreasing within (0, 1]"));
    }
    Ok(())
}

/// Applies `𝓑_i`, `𝓑_j` to the Poisson integral through exact kernel derivatives and
/// extrapolates `t → 0`.
pub fn boundary_limit_check(
    prob: &Problem,
    fi: &BoundaryData,
    fj: &BoundaryData,
    x: &[f64],
    ts: &[f64],
    q: &QuadratureConfig,
) -> Result<BoundaryLimit> {
    check_heights(ts)?;
    let dim = prob.dim;
    let (i, j) = (prob.pair.i(), prob.pair.j());
    fi.check_admissible(i, dim)?;
    fj.check_admissible(j, dim)?;
    let (own_i, ci) =
        extrapolated_convolution(&operator_kernel_expr(i, i, dim), dim, fi, x, ts, q)?;
    let (own_j, cj) =
        extrapolated_convolution(&operator_kernel_expr(j, j, dim), dim, fj, x, ts, q)?;
    let (cross_i, di) =
        extrapolated_convolution(&operator_kernel_expr(i, j, dim), dim, fj, x, ts, q)?;
    let (cross_j, dj) =
        extrapolated_convolution(&operator_kernel_expr(j, i, dim), dim, fi, x, ts, q)?;
    Ok(BoundaryLimit {
        traces: [own_i + cross_i, own_j + cross_j],
        own: [own_i, own_j],
        cross: [cross_i, cross_j],
        data: [fi.eval(x), fj.eval(x)],
        changes: [ci + di, cj + dj],
    })
}

/// `lim_{t→0} ∂_t ∫ K_α(x - y, t) f(y) dy` for the `t^α` kernels: `α = 3` is `P_0`,
/// `α = 1` is the classical Poisson kernel `2t/(|𝕊ⁿ|(t² + |x|²)^{(n+1)/2})`.
pub fn derivative_limit(
    alpha: u32,
    dim: Dimension,
    f: &BoundaryData,
    x: &[f64],
    ts: &[f64],
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    check_heights(ts)?;
    let kernel = match alpha {
        3 => half_space_kernel_expr(0, dim),
        1 => Expr::monomial(
            dim.n(),
            2.0 / dim.sphere_area(),
            1,
            -(dim.nf() + 1.0) / 2.0,
            0,
        ),
        _ => {
            return Err(Error::Domain(
                "derivative limit is implemented for alpha in {1, 3}",
            ))
        }
    };
    extrapolated_convolution(&kernel.dt(), dim, f, x, ts, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayKind {
    /// `v = ∫ f(y)(t² + |x-y|²)^{-α} dy`.
    SingularPower,
    /// `w = ∫ t^β f(y)(t² + |x-y|²)^{-(n+β)/2} dy`.
    PoissonType,
}

/// Where along `|X| → ∞` the samples are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `X = (0, R)`: `t ≫ |x|`.
    Normal,
    /// `X = (R e₁, R/10)`: `t ≪ |x|`.
    Tangential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFitReport {
    pub fitted_slope: f64,
    pub predicted_slope: f64,
    pub r_squared: f64,
    pub sample_range: (f64, f64),
    /// The fit divided out a `log |X|` factor (the borderline decay case).
    pub log_corrected: bool,
    pub samples: Vec<(f64, f64)>,
}

/// Least-squares line `y = a + b x`; returns `(b, a, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (b, my - b * mx, r2)
}

/// Fits the far-field slope of the two prototype singular integrals.
pub fn decay_asymptotics_fit(
    kind: DecayKind,
    param: f64,
    dim: Dimension,
    f: &BoundaryData,
    radii: &[f64],
    regime: Regime,
    q: &QuadratureConfig,
) -> Result<DecayFitReport> {
    let n = dim.nf();
    let a = f.decay_exponent;
    if radii.len() < 3 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Contract("need at least three positive radii"));
    }
    let (lo, hi) = radii
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::Contract("radii must span at least one decade"));
    }
    let borderline = math::abs(a - n) < 1e-12;
    let predicted = match kind {
        DecayKind::SingularPower => {
            if !(param > 0.0 && param < n / 2.0) || !(a + 2.0 * param > n) {
                return Err(Error::Contract("need 0 < alpha < n/2 and a + 2 alpha > n"));
            }
            if borderline {
                -2.0 * param
            } else {
                n - 2.0 * param - a.min(n)
            }
        }
        DecayKind::PoissonType => {
            if !(param > 0.0) {
                return Err(Error::Contract("need beta > 0"));
            }
            -a.min(n)
        }
    };
    let kernel = |t: f64, s: f64| match kind {
        DecayKind::SingularPower => math::pow(t * t + s, -param),
        DecayKind::PoissonType => math::pow(t, param) * math::pow(t * t + s, -(n + param) / 2.0),
    };
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    let mut samples = Vec::with_capacity(radii.len());
    for r in radii {
        let mut x = vec![0.0; dim.n()];
        let t = match regime {
            Regime::Normal => *r,
            Regime::Tangential => {
                x[0] = *r;
                0.1 * r
            }
        };
        let big_x = math::sqrt(math::norm_sq(&x) + t * t);
        let v = accept(kernel_convolution(kernel, dim, f, &x, t, q)?, q)?;
        samples.push((big_x, v));
        let mut y = math::ln(math::abs(v));
        if borderline {
            y -= math::ln(math::ln(big_x));
        }
        xs.push(math::ln(big_x));
        ys.push(y);
    }
    let (b, _, r2) = linear_fit(&xs, &ys);
    Ok(DecayFitReport {
        fitted_slope: b,
        predicted_slope: predicted,
        r_squared: r2,
        sample_range: (lo, hi),
        log_corrected: borderline,
        samples,
    })
}

/// Minimum of the Green-formula solution over `samples`, after checking the sign hypotheses
/// `f ≥ 0`, `f_i ≥ 0`, `f_j ≤ 0` on a grid.
pub fn comparison_check(
    prob: &Problem,
    f: &BallSource,
    fi: &SphereData,
    fj: &SphereData,
    samples: &[Vec<f64>],
    q: &QuadratureConfig,
) -> Result<f64> {
    let (i, j) = (prob.pair.i(), prob.pair.j());
    if !((i == 0 || i == 3) && (j == 1 || j == 2)) {
        return Err(Error::Contract(
            "comparison principle needs i in {0,3} and j in {1,2}",
        ));
    }
    if prob.dim.n() < 4 {
        return Err(Error::Contract(
            "comparison principle is checked for n >= 4",
        ));
    }
    let grid = 64;
    for a in 0..=grid {
        let z = -1.0 + 2.0 * a as f64 / grid as f64;
        if fi.eval_z(z) < 0.0 || fj.eval_z(z) > 0.0 {
            return Err(Error::Contract("boundary data violate the sign hypotheses"));
        }
        if !f.is_zero() {
            for b in 0..=grid / 4 {
                let r2 = z * z + (1.0 - z * z) * b as f64 / (grid / 4) as f64;
                if (f.profile)(z, r2) < 0.0 {
                    return Err(Error::Contract("interior data must be nonnegative"));
                }
            }
        }
    }
    let mut min = f64::INFINITY;
    for s in samples {
        min = min.min(green_formula(prob, f, fi, fj, s, q)?);
    }
    Ok(min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GjmsReport {
    /// `U` extrapolated from inside to the boundary point.
    pub extrapolated: f64,
    /// `∫ P̄₃(ξ, η) f(η) dV(η)` evaluated on the sphere.
    pub direct: f64,
    pub residual: f64,
    pub change: f64,
}

/// Compares the boundary value of `U = P̄₃ ∗ f₃` (pair (1,3), zero `f₁`) with the
/// sphere convolution, whose kernel `2P̄₃` restricted to the sphere is the Green function of `P₃`.
pub fn gjms_trace_check(
    dim: Dimension,
    f3: &SphereData,
    xi: &[f64],
    q: &QuadratureConfig,
) -> Result<GjmsReport> {
    if dim.is_critical() {
        return Err(Error::Contract("GJMS trace check is stated for n != 3"));
    }
    dim.check_len(xi)?;
    if math::abs(math::norm(xi) - 1.0) > 1e-12 {
        return Err(Error::Contract(
            "GJMS trace check needs a point on the sphere",
        ));
    }
    let prob = Problem::new(OperatorPair::new(1, 3)?, dim);
    let zero = SphereData::zero(dim.ambient());
    let deltas: Vec<f64> = (0..6).map(|k| 0.02 * math::powi(0.5, k)).collect();
    let mut vals = Vec::with_capacity(deltas.len());
    for d in &deltas {
        let p: Vec<f64> = xi.iter().map(|v| v * (1.0 - d)).collect();
        vals.push(ball_poisson(&prob, &zero, f3, &p, q)?);
    }
    let (extrapolated, change) = extrapolate_to_zero(&deltas, &vals);
    let direct = accept(ball_kernel_integral(3, dim, xi, f3, 0.0, q)?, q)?;
    Ok(GjmsReport {
        extrapolated,
        direct,
        residual: math::abs(extrapolated - direct),
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p0_reproduces_constants() {
        let dim = Dimension::new(4).unwrap();
        let prob = Problem::new(OperatorPair::new(0, 2).unwrap(), dim);
        let one = BoundaryData::constant(4, 1.0);
        let zero = BoundaryData::zero(4);
        let v = half_space_poisson(
            &prob,
            &one,
            &zero,
            &[0.3, 0.0, -0.2, 0.1, 0.7],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn ball_pair_reproduces_constants() {
        let dim = Dimension::new(5).unwrap();
        let q = QuadratureConfig::default();
        let one = SphereData::constant(6, 1.0);
        let t2 = SphereData::constant(6, crate::operators::t_constant(dim, 2));
        let prob = Problem::new(OperatorPair::new(0, 2).unwrap(), dim);
        for xi in [
            [0.0; 6],
            [0.1, 0.2, 0.0, -0.3, 0.5, 0.1],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.97],
        ] {
            let v = ball_poisson(&prob, &one, &t2, &xi, &q).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "{xi:?} {v}");
        }
    }
}
