//! Biharmonic Poisson kernels on both models, the fundamental solution of `Δ²`,
//! and the kernel–fundamental-solution relations.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::Dimension;
use crate::math;
use crate::operators::Model;
use crate::quadrature::{integrate, Tolerance};

/// Which kernel `P_k` (or `P̄_k`) to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub k: usize,
    pub model: Model,
    pub dim: Dimension,
    /// The free additive constant of the logarithmic kernel when `n = 3`.
    pub log_constant: f64,
}

impl KernelSpec {
    pub fn new(k: usize, model: Model, dim: Dimension) -> Result<Self> {
        if k > 3 {
            return Err(Error::Domain("kernel index must be 0..=3"));
        }
        Ok(KernelSpec {
            k,
            model,
            dim,
            log_constant: 0.0,
        })
    }

    pub fn with_log_constant(self, c: f64) -> Self {
        KernelSpec {
            log_constant: c,
            ..self
        }
    }
}

/// Half-space kernel `P_k(x, t)` as a function of `t` and `s = |x|²`.
pub fn half_space_kernel(k: usize, dim: Dimension, t: f64, s: f64, log_constant: f64) -> f64 {
    let n = dim.nf();
    let a = dim.sphere_area();
    let q = s + t * t;
    match k {
        0 => 2.0 * (n + 1.0) / a * t * t * t * math::pow(q, -(n + 3.0) / 2.0),
        1 => -2.0 / a * t * t * math::pow(q, -(n + 1.0) / 2.0),
        2 => -1.0 / ((n - 1.0) * a) * t * math::pow(q, -(n - 1.0) / 2.0),
        _ => {
            if dim.is_critical() {
                -1.0 / (4.0 * a) * math::ln(q) + log_constant
            } else {
                1.0 / ((n - 1.0) * (n - 3.0) * a) * math::pow(q, -(n - 3.0) / 2.0)
            }
        }
    }
}

/// The kernel `P_k` in the exact-differentiation algebra (without the additive constant).
pub fn half_space_kernel_expr(k: usize, dim: Dimension) -> Expr {
    let n = dim.nf();
    let a = dim.sphere_area();
    let nn = dim.n();
    match k {
        0 => Expr::monomial(nn, 2.0 * (n + 1.0) / a, 3, -(n + 3.0) / 2.0, 0),
        1 => Expr::monomial(nn, -2.0 / a, 2, -(n + 1.0) / 2.0, 0),
        2 => Expr::monomial(nn, -1.0 / ((n - 1.0) * a), 1, -(n - 1.0) / 2.0, 0),
        _ => {
            if dim.is_critical() {
                Expr::log_q(nn, -1.0 / (4.0 * a))
            } else {
                Expr::monomial(
                    nn,
                    1.0 / ((n - 1.0) * (n - 3.0) * a),
                    0,
                    -(n - 3.0) / 2.0,
                    0,
                )
            }
        }
    }
}

/// `𝓑_i P_k` as a function of `(t, |x|²)`, with `𝓑_i` acting in `X = (x, t)`.
pub fn operator_kernel_expr(i: usize, k: usize, dim: Dimension) -> Expr {
    half_space_kernel_expr(k, dim).boundary_op(i)
}

/// Ball kernel `P̄_k(ξ, η)` for interior `ξ` and boundary `η`.
pub fn ball_kernel(
    k: usize,
    dim: Dimension,
    xi: &[f64],
    eta: &[f64],
    log_constant: f64,
) -> Result<f64> {
    let dist = math::dist(xi, eta);
    if dist == 0.0 {
        return Err(Error::Singularity("ball kernel at coincident points"));
    }
    Ok(ball_kernel_radial(
        k,
        dim,
        1.0 - math::norm_sq(xi),
        dist,
        log_constant,
    ))
}

/// Ball kernel from `w = 1 - |ξ|²` and `|ξ - η|`.
pub fn ball_kernel_radial(k: usize, dim: Dimension, w: f64, dist: f64, log_constant: f64) -> f64 {
    let n = dim.nf();
    let a = dim.sphere_area();
    match k {
        0 => (n + 1.0) / (4.0 * a) * w * w * w * math::pow(dist, -(n + 3.0)),
        1 => -1.0 / (2.0 * a) * w * w * math::pow(dist, -(n + 1.0)),
        2 => -1.0 / (2.0 * (n - 1.0) * a) * w * math::pow(dist, -(n - 1.0)),
        _ => {
            if dim.is_critical() {
                -1.0 / (2.0 * a) * math::ln(dist) + log_constant
            } else {
                1.0 / ((n - 1.0) * (n - 3.0) * a) * math::pow(dist, 3.0 - n)
            }
        }
    }
}

/// `P_k` or `P̄_k` between an interior point `p` and a boundary point `q`.
///
/// Half-space boundary points are given in ambient coordinates with `t = 0`.
pub fn poisson_kernel(spec: KernelSpec, p: &[f64], q: &[f64]) -> Result<f64> {
    spec.dim.check_len(p)?;
    spec.dim.check_len(q)?;
    match spec.model {
        Model::HalfSpace => {
            let d = p.len();
            if q[d - 1] != 0.0 {
                return Err(Error::Contract(
                    "second kernel argument must lie on the boundary",
                ));
            }
            let t = p[d - 1];
            let s = math::dist_sq(&p[..d - 1], &q[..d - 1]);
            if t == 0.0 && s == 0.0 {
                return Err(Error::Singularity("kernel at coincident boundary points"));
            }
            Ok(half_space_kernel(spec.k, spec.dim, t, s, spec.log_constant))
        }
        Model::Ball => ball_kernel(spec.k, spec.dim, p, q, spec.log_constant),
    }
}

/// `Γ` as a function of the distance `r = |X - Y|`.
pub fn fundamental_radial(dim: Dimension, r: f64, log_constant: f64) -> f64 {
    let n = dim.nf();
    let a = dim.sphere_area();
    if dim.is_critical() {
        -1.0 / (4.0 * a) * math::ln(r) + log_constant
    } else {
        1.0 / (2.0 * (n - 1.0) * (n - 3.0) * a) * math::pow(r, 3.0 - n)
    }
}

/// The fundamental solution `Γ(X - Y)` of `Δ²` in `R^{n+1}`.
pub fn fundamental_solution(
    dim: Dimension,
    x: &[f64],
    y: &[f64],
    log_constant: f64,
) -> Result<f64> {
    dim.check_len(x)?;
    dim.check_len(y)?;
    let r = math::dist(x, y);
    if r == 0.0 {
        return Err(Error::Singularity("fundamental solution on the diagonal"));
    }
    Ok(fundamental_radial(dim, r, log_constant))
}

/// `Γ` in the exact-differentiation algebra, written in `q = |X - Y|²`.
pub fn fundamental_expr(dim: Dimension) -> Expr {
    let n = dim.nf();
    let a = dim.sphere_area();
    if dim.is_critical() {
        Expr::log_q(dim.n(), -1.0 / (8.0 * a))
    } else {
        Expr::monomial(
            dim.n(),
            1.0 / (2.0 * (n - 1.0) * (n - 3.0) * a),
            0,
            (3.0 - n) / 2.0,
            0,
        )
    }
}

/// `∫_{R^n} P₀(x, t) dx` by radial quadrature under `ρ = t·tan θ`.
pub fn kernel_mass(dim: Dimension, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("kernel mass needs t > 0"));
    }
    let n = dim.n();
    let shell = crate::geometry::sphere_area(n - 1)?;
    let half_pi = core::f64::consts::FRAC_PI_2;
    let e = integrate(
        |th| {
            if th >= half_pi {
                return 0.0;
            }
            let rho = t * math::tan(th);
            let sec = 1.0 / math::cos(th);
            let jac = t * sec * sec;
            math::powi(rho, n as i32 - 1) * half_space_kernel(0, dim, t, rho * rho, 0.0) * jac
        },
        &[
            0.0,
            half_pi / 4.0,
            half_pi / 2.0,
            3.0 * half_pi / 4.0,
            half_pi,
        ],
        Tolerance::new(1e-14, 1e-14),
    );
    Ok(shell * e.strict()?)
}

/// Left side, right side and relative residual of a kernel relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Relation {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Relation {
    fn new(lhs: f64, rhs: f64) -> Self {
        let scale = math::abs(lhs).max(math::abs(rhs));
        let residual = if scale == 0.0 {
            0.0
        } else {
            math::abs(lhs - rhs) / scale
        };
        Relation { lhs, rhs, residual }
    }
}

/// `𝓑_k Γ(X - ·)` at `Y = (y, 0)` against `±½P_{3-k}(x - y, t)`.
///
/// The left side differentiates `Γ` exactly in the `Y` variable; the right side
/// is the closed-form kernel. Signs: `+` for `k ∈ {0, 1}`, `-` for `k ∈ {2, 3}`.
pub fn kernel_operator_relation(
    k: usize,
    dim: Dimension,
    x: &[f64],
    y: &[f64],
) -> Result<Relation> {
    if k > 3 {
        return Err(Error::Domain("operator index must be 0..=3"));
    }
    dim.check_len(x)?;
    let d = x.len();
    if y.len() != d - 1 {
        return Err(Error::DimensionMismatch {
            expected: d - 1,
            found: y.len(),
        });
    }
    let t = x[d - 1];
    if !(t > 0.0) {
        return Err(Error::Contract("relation needs an interior point"));
    }
    let s = math::dist_sq(&x[..d - 1], y);
    // In Y = (y, h) the offset from X is w = h - t, so at h = 0 we evaluate at w = -t.
    let lhs = fundamental_expr(dim).boundary_op(k).eval(-t, s);
    let sign = if k < 2 { 0.5 } else { -0.5 };
    let rhs = sign * half_space_kernel(3 - k, dim, t, s, 0.0);
    Ok(Relation::new(lhs, rhs))
}

/// For `n = 3`: `𝓑₁P₃ = -P₂`, `𝓑₂P₃ = -P₁`, `𝓑₃P₃ = P₀`, with `𝓑_k` acting in `X`.
pub fn critical_self_relation(k: usize, dim: Dimension, t: f64, s: f64) -> Result<Relation> {
    if !dim.is_critical() {
        return Err(Error::Contract("self relations are stated for n = 3"));
    }
    if !(1..=3).contains(&k) {
        return Err(Error::Domain("self relations exist for k = 1, 2, 3"));
    }
    let lhs = half_space_kernel_expr(3, dim).boundary_op(k).eval(t, s);
    let rhs = match k {
        1 => -half_space_kernel(2, dim, t, s, 0.0),
        2 => -half_space_kernel(1, dim, t, s, 0.0),
        _ => half_space_kernel(0, dim, t, s, 0.0),
    };
    Ok(Relation::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p0_value_at_unit_height() {
        let d4 = Dimension::new(4).unwrap();
        let spec = KernelSpec::new(0, Model::HalfSpace, d4).unwrap();
        let v = poisson_kernel(spec, &[0.0, 0.0, 0.0, 0.0, 1.0], &[0.0; 5]).unwrap();
        let pi = core::f64::consts::PI;
        assert!((v - 15.0 / (4.0 * pi * pi)).abs() < 1e-14);
    }

    #[test]
    fn fundamental_values() {
        let d3 = Dimension::new(3).unwrap();
        assert_eq!(fundamental_radial(d3, 1.0, 0.0), 0.0);
        let d5 = Dimension::new(5).unwrap();
        let pi = core::f64::consts::PI;
        assert!((fundamental_radial(d5, 1.0, 0.0) - 1.0 / (16.0 * pi * pi * pi)).abs() < 1e-15);
        assert!(
            (fundamental_radial(d5, 2.0, 0.0) * 4.0 - fundamental_radial(d5, 1.0, 0.0)).abs()
                < 1e-16
        );
    }

    #[test]
    fn expr_matches_closed_form() {
        for n in [3usize, 4, 5, 7] {
            let dim = Dimension::new(n).unwrap();
            for k in 0..4 {
                let e = half_space_kernel_expr(k, dim);
                let (a, b) = (e.eval(0.7, 1.3), half_space_kernel(k, dim, 0.7, 1.3, 0.0));
                assert!((a - b).abs() < 1e-14 * b.abs().max(1.0));
            }
        }
    }
}
