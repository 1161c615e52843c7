//! Conformal boundary operators on the half-space and the ball, the constants
//! `𝕋_k`, and the bilaplacian probe.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Jet3, ScalarField};
use crate::geometry::Dimension;
use crate::math;
use crate::stencil::{central, one_sided, StencilConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    HalfSpace,
    Ball,
}

/// Boundary operator `𝓑_k` of order `k ∈ {0, 1, 2, 3}` on one of the two models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryOperatorId {
    pub k: usize,
    pub model: Model,
}

impl BoundaryOperatorId {
    pub fn new(k: usize, model: Model) -> Result<Self> {
        if k > 3 {
            return Err(Error::Domain("boundary operator order must be 0..=3"));
        }
        Ok(BoundaryOperatorId { k, model })
    }
}

/// `(𝕋₁, 𝕋₂, 𝕋₃) = ((n-3)/2, (n-1)(n-3)/2, (n²-1)(n-3)/4)`.
pub fn t_constants(dim: Dimension) -> (f64, f64, f64) {
    let n = dim.nf();
    (
        (n - 3.0) / 2.0,
        (n - 1.0) * (n - 3.0) / 2.0,
        (n * n - 1.0) * (n - 3.0) / 4.0,
    )
}

/// `𝕋_k` with `𝕋₀ = 1`.
pub fn t_constant(dim: Dimension, k: usize) -> f64 {
    let (a, b, c) = t_constants(dim);
    match k {
        0 => 1.0,
        1 => a,
        2 => b,
        _ => c,
    }
}

/// A value together with an error estimate it should be compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub tolerance: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured {
            value,
            tolerance: 0.0,
        }
    }

    /// Whether `|value - target|` lies within the tolerance.
    pub fn agrees_with(&self, target: f64) -> bool {
        math::abs(self.value - target) <= self.tolerance
    }
}

/// Boundary derivatives that determine every half-space operator at `t = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HalfSpaceTrace {
    pub u: f64,
    pub u_t: f64,
    pub u_tt: f64,
    pub u_ttt: f64,
    /// `Δ̄u`, the Laplacian in the boundary variables.
    pub lap_x: f64,
    /// `Δ̄∂_t u`.
    pub lap_x_t: f64,
}

impl HalfSpaceTrace {
    /// Read the trace off an exact jet; the last coordinate is `t`.
    pub fn from_jet(j: &Jet3) -> Self {
        let t = j.d - 1;
        HalfSpaceTrace {
            u: j.value,
            u_t: j.grad[t],
            u_tt: j.h(t, t),
            u_ttt: j.t(t, t, t),
            lap_x: (0..t).map(|i| j.h(i, i)).sum(),
            lap_x_t: (0..t).map(|i| j.t(i, i, t)).sum(),
        }
    }

    /// `𝓑₀ = u`, `𝓑₁ = -∂_t u`, `𝓑₂ = ∂_t²u - Δ̄u`, `𝓑₃ = ∂_tΔu + 2Δ̄∂_t u`.
    pub fn apply(&self, k: usize) -> f64 {
        match k {
            0 => self.u,
            1 => -self.u_t,
            2 => self.u_tt - self.lap_x,
            _ => self.u_ttt + 3.0 * self.lap_x_t,
        }
    }
}

/// Boundary derivatives that determine every ball operator on the unit sphere.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BallTrace {
    pub u: f64,
    pub u_r: f64,
    pub u_rr: f64,
    pub u_rrr: f64,
    /// `Δ_S U`, the Laplacian of the restriction to the sphere.
    pub lap_s: f64,
    /// `Δ_S ∂_r U`.
    pub lap_s_r: f64,
}

impl BallTrace {
    /// Read the trace off an exact jet at the unit vector `eta`.
    pub fn from_jet(j: &Jet3, eta: &[f64]) -> Self {
        let d = j.d;
        let n = (d - 1) as f64;
        let mut u_r = 0.0;
        let mut u_rr = 0.0;
        let mut u_rrr = 0.0;
        let mut e_lap = 0.0;
        for a in 0..d {
            u_r += eta[a] * j.grad[a];
            e_lap += eta[a] * j.laplacian_grad(a);
            for b in 0..d {
                u_rr += eta[a] * eta[b] * j.h(a, b);
                for c in 0..d {
                    u_rrr += eta[a] * eta[b] * eta[c] * j.t(a, b, c);
                }
            }
        }
        let lap = j.laplacian();
        let lap_s = lap - u_rr - n * u_r;
        // With E = ξ·∇ and ∂_r U = EU on the sphere: Δ_S(EU) = Δ(EU) - ∂_r²(EU) - n∂_r(EU).
        let lap_s_r = (2.0 * lap + e_lap) - (2.0 * u_rr + u_rrr) - n * (u_r + u_rr);
        BallTrace {
            u: j.value,
            u_r,
            u_rr,
            u_rrr,
            lap_s,
            lap_s_r,
        }
    }

    /// `∂_r ΔU` on the sphere.
    pub fn radial_of_laplacian(&self, dim: Dimension) -> f64 {
        let n = dim.nf();
        self.u_rrr + n * self.u_rr - n * self.u_r + self.lap_s_r - 2.0 * self.lap_s
    }

    pub fn apply(&self, k: usize, dim: Dimension) -> f64 {
        let n = dim.nf();
        let (t1, t2, t3) = t_constants(dim);
        match k {
            0 => self.u,
            1 => self.u_r + t1 * self.u,
            2 => self.u_rr - self.lap_s + (n - 2.0) * self.u_r + t2 * self.u,
            _ => {
                -self.radial_of_laplacian(dim)
                    - 2.0 * self.lap_s_r
                    - (n - 3.0) / 2.0 * self.u_rr
                    - (3.0 * n - 5.0) / 2.0 * self.lap_s
                    + (n - 3.0) / 2.0 * self.u_r
                    + t3 * self.u
            }
        }
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(
            "non-finite field value at a stencil node",
        ))
    }
}

/// Half-space trace at `(x, 0)` from one-sided differences in `t` and central differences in `x`.
pub fn half_space_trace_stencil<F: ScalarField + ?Sized>(
    f: &F,
    p: &[f64],
    s: StencilConfig,
) -> Result<HalfSpaceTrace> {
    let d = p.len();
    let h = s.h;
    let (xs, w) = one_sided(s.order);
    let (offs, w2) = central(2, s.order);
    let mut u = Vec::with_capacity(xs.len());
    let mut lap = Vec::with_capacity(xs.len());
    let mut q = p.to_vec();
    for level in &xs {
        q[d - 1] = p[d - 1] + level * h;
        u.push(finite(f.value(&q)?)?);
        let mut acc = 0.0;
        for i in 0..d - 1 {
            let base = q[i];
            for (o, wt) in offs.iter().zip(&w2) {
                q[i] = base + *o as f64 * h;
                acc += wt * finite(f.value(&q)?)?;
            }
            q[i] = base;
        }
        lap.push(acc / (h * h));
    }
    let diff = |k: usize, vals: &[f64]| -> f64 {
        let s: f64 = w[k].iter().zip(vals).map(|(a, b)| a * b).sum();
        s / math::powi(h, k as i32)
    };
    Ok(HalfSpaceTrace {
        u: u[0],
        u_t: diff(1, &u),
        u_tt: diff(2, &u),
        u_ttt: diff(3, &u),
        lap_x: lap[0],
        lap_x_t: diff(1, &lap),
    })
}

/// An orthonormal basis of the tangent space of the sphere at `eta`.
pub fn tangent_frame(eta: &[f64]) -> Vec<Vec<f64>> {
    let d = eta.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|a, b| math::abs(eta[*a]).partial_cmp(&math::abs(eta[*b])).unwrap());
    for &c in &order {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[c] = 1.0;
        for _ in 0..2 {
            let pe = math::dot(&v, eta);
            for i in 0..d {
                v[i] -= pe * eta[i];
            }
            for b in &basis {
                let pb = math::dot(&v, b);
                for i in 0..d {
                    v[i] -= pb * b[i];
                }
            }
        }
        let nv = math::norm(&v);
        if nv > 1e-6 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    basis
}

/// Ball trace at a unit vector from one-sided radial differences and great-circle second differences.
pub fn ball_trace_stencil<F: ScalarField + ?Sized>(
    f: &F,
    eta: &[f64],
    s: StencilConfig,
) -> Result<BallTrace> {
    let d = eta.len();
    let h = s.h;
    let (xs, w) = one_sided(s.order);
    // Nodes sit at r = 1 - jh, so odd derivatives change sign.
    let radial = |zeta: &[f64]| -> Result<[f64; 4]> {
        let mut vals = Vec::with_capacity(xs.len());
        for level in &xs {
            let r = 1.0 - level * h;
            let q: Vec<f64> = zeta.iter().map(|v| v * r).collect();
            vals.push(finite(f.value(&q)?)?);
        }
        let mut out = [vals[0], 0.0, 0.0, 0.0];
        for k in 1..4 {
            let sgn = if k % 2 == 1 { -1.0 } else { 1.0 };
            let sum: f64 = w[k].iter().zip(&vals).map(|(a, b)| a * b).sum();
            out[k] = sgn * sum / math::powi(h, k as i32);
        }
        Ok(out)
    };
    let centre = radial(eta)?;
    let (offs, w2) = central(2, s.order);
    let mut lap_s = 0.0;
    let mut lap_s_r = 0.0;
    for e in tangent_frame(eta) {
        for (o, wt) in offs.iter().zip(&w2) {
            let th = *o as f64 * h;
            let (c, sn) = (math::cos(th), math::sin(th));
            let zeta: Vec<f64> = (0..d).map(|i| c * eta[i] + sn * e[i]).collect();
            let vals = if *o == 0 { centre } else { radial(&zeta)? };
            lap_s += wt * vals[0];
            lap_s_r += wt * vals[1];
        }
    }
    Ok(BallTrace {
        u: centre[0],
        u_r: centre[1],
        u_rr: centre[2],
        u_rrr: centre[3],
        lap_s: lap_s / (h * h),
        lap_s_r: lap_s_r / (h * h),
    })
}

fn check_boundary(model: Model, p: &[f64]) -> Result<()> {
    let ok = match model {
        Model::HalfSpace => p[p.len() - 1] == 0.0,
        Model::Ball => math::abs(math::norm(p) - 1.0) < 1e-12,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Contract(
            "boundary operator applied away from the boundary",
        ))
    }
}

/// `𝓑_k f` at a boundary point, from exact jets when the field provides them.
pub fn apply_operator<F: ScalarField + ?Sized>(
    op: BoundaryOperatorId,
    f: &F,
    p: &[f64],
    dim: Dimension,
    s: StencilConfig,
) -> Result<f64> {
    dim.check_len(p)?;
    check_boundary(op.model, p)?;
    if op.k == 0 {
        return f.value(p);
    }
    match op.model {
        Model::HalfSpace => {
            let tr = match f.jet(p) {
                Some(j) => HalfSpaceTrace::from_jet(&j),
                None => half_space_trace_stencil(f, p, s)?,
            };
            Ok(tr.apply(op.k))
        }
        Model::Ball => {
            let tr = match f.jet(p) {
                Some(j) => BallTrace::from_jet(&j, p),
                None => ball_trace_stencil(f, p, s)?,
            };
            Ok(tr.apply(op.k, dim))
        }
    }
}

/// Stencil-only evaluation with a Richardson error estimate from steps `h` and `2h`.
pub fn apply_operator_stencil<F: ScalarField + ?Sized>(
    op: BoundaryOperatorId,
    f: &F,
    p: &[f64],
    dim: Dimension,
    s: StencilConfig,
) -> Result<Measured> {
    dim.check_len(p)?;
    check_boundary(op.model, p)?;
    let eval = |s: StencilConfig| -> Result<f64> {
        Ok(match op.model {
            Model::HalfSpace => half_space_trace_stencil(f, p, s)?.apply(op.k),
            Model::Ball => ball_trace_stencil(f, p, s)?.apply(op.k, dim),
        })
    };
    let a = eval(s)?;
    let b = eval(s.with_h(2.0 * s.h))?;
    let gain = (1u32 << s.order) as f64 - 1.0;
    Ok(Measured {
        value: a,
        tolerance: 4.0 * math::abs(a - b) / gain + 1e-9 * (1.0 + math::abs(a)),
    })
}

fn bilaplacian_stencil<F: ScalarField + ?Sized>(
    f: &F,
    p: &[f64],
    s: StencilConfig,
) -> Result<(f64, f64)> {
    let d = p.len();
    let h = s.h;
    let (o4, w4) = central(4, s.order);
    let (o2, w2) = central(2, s.order);
    let mut q = p.to_vec();
    let mut terms: Vec<f64> = Vec::new();
    for i in 0..d {
        for (o, w) in o4.iter().zip(&w4) {
            q[i] = p[i] + *o as f64 * h;
            terms.push(w * finite(f.value(&q)?)?);
        }
        q[i] = p[i];
    }
    for i in 0..d {
        for j in i + 1..d {
            for (oi, wi) in o2.iter().zip(&w2) {
                for (oj, wj) in o2.iter().zip(&w2) {
                    q[i] = p[i] + *oi as f64 * h;
                    q[j] = p[j] + *oj as f64 * h;
                    terms.push(2.0 * wi * wj * finite(f.value(&q)?)?);
                }
            }
            q[i] = p[i];
            q[j] = p[j];
        }
    }
    let h4 = math::powi(h, 4);
    let value = math::pairwise_sum(&terms) / h4;
    let roundoff = terms.iter().map(|t| math::abs(*t)).sum::<f64>() / h4 * f64::EPSILON;
    Ok((value, roundoff))
}

/// `Δ²f(p)` with a self-calibrated tolerance.
///
/// Exact bilaplacians are used when the field provides them. Otherwise the
/// stencil is evaluated at steps `h` and `2h`; the tolerance is the Richardson
/// truncation estimate plus a rounding bound from the stencil's own terms.
pub fn biharmonic_residual<F: ScalarField + ?Sized>(
    f: &F,
    p: &[f64],
    s: StencilConfig,
) -> Result<Measured> {
    if let Some(v) = f.bilaplacian(p) {
        return Ok(Measured {
            value: v,
            tolerance: 64.0 * f64::EPSILON * (1.0 + math::abs(v)),
        });
    }
    let (a, ra) = bilaplacian_stencil(f, p, s)?;
    let (b, rb) = bilaplacian_stencil(f, p, s.with_h(2.0 * s.h))?;
    let gain = (1u32 << s.order) as f64 - 1.0;
    let truncation = math::abs(a - b) / gain;
    Ok(Measured {
        value: a,
        tolerance: 4.0 * truncation + 16.0 * (ra + rb),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::polynomial::{Polynomial, PolynomialField};

    #[test]
    fn t_constant_values() {
        assert_eq!(t_constants(Dimension::new(4).unwrap()), (0.5, 1.5, 3.75));
        assert_eq!(t_constants(Dimension::new(5).unwrap()), (1.0, 4.0, 12.0));
        assert_eq!(t_constants(Dimension::new(3).unwrap()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn half_space_polynomials() {
        let dim = Dimension::new(3).unwrap();
        let d = 4;
        let t = PolynomialField::new(Polynomial::coordinate(d, 3));
        let t3 = PolynomialField::new(Polynomial::coordinate(d, 3).pow(3));
        let p = [0.2, -0.1, 0.4, 0.0];
        let s = StencilConfig::default();
        let op = |k| BoundaryOperatorId::new(k, Model::HalfSpace).unwrap();
        assert_eq!(apply_operator(op(1), &t, &p, dim, s).unwrap(), -1.0);
        assert_eq!(apply_operator(op(3), &t3, &p, dim, s).unwrap(), 6.0);
        let fd = FnField::new(d, |q: &[f64]| q[3] * q[3] * q[3]);
        let m = apply_operator_stencil(op(3), &fd, &p, dim, StencilConfig::new(1e-2, 4).unwrap())
            .unwrap();
        assert!((m.value - 6.0).abs() < 1e-6);
    }

    #[test]
    fn ball_constant_gives_t_constants() {
        for n in [4usize, 5, 7] {
            let dim = Dimension::new(n).unwrap();
            let one = PolynomialField::new(Polynomial::constant(n + 1, 1.0));
            let mut eta = vec![0.0; n + 1];
            eta[0] = 1.0;
            for k in 1..4 {
                let op = BoundaryOperatorId::new(k, Model::Ball).unwrap();
                let v = apply_operator(op, &one, &eta, dim, StencilConfig::default()).unwrap();
                assert_eq!(v, t_constant(dim, k));
            }
        }
    }

    #[test]
    fn bilaplacian_examples() {
        let d = 5;
        let f = FnField::new(d, |q: &[f64]| {
            let r2: f64 = q.iter().map(|v| v * v).sum();
            r2 * r2
        });
        let m = biharmonic_residual(
            &f,
            &[0.3, 0.1, -0.2, 0.5, 0.7],
            StencilConfig::new(0.05, 4).unwrap(),
        )
        .unwrap();
        assert!((m.value - 280.0).abs() < 1e-5, "{m:?}");
        let cubic = FnField::new(d, |q: &[f64]| q[4] * q[4] * q[4] + q[0] * q[4]);
        let m = biharmonic_residual(
            &cubic,
            &[0.3, 0.1, -0.2, 0.5, 0.7],
            StencilConfig::new(0.05, 4).unwrap(),
        )
        .unwrap();
        assert!(m.value.abs() <= m.tolerance, "{m:?}");
    }
}
