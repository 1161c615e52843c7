//! Closed-form biharmonic Green functions on the half-space and the ball.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FnField, Jet3};
use crate::geometry::{
    conformal_factor, conformal_map, pole_distance, reflected_distance, Dimension,
};
use crate::kernels::fundamental_radial;
use crate::math;
use crate::operators::{biharmonic_residual, BallTrace, HalfSpaceTrace, Measured, Model};
use crate::stencil::StencilConfig;

/// A well-posed pair of boundary operators `(𝓑_i, 𝓑_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorPair {
    i: usize,
    j: usize,
}

impl OperatorPair {
    /// Accepts `0 <= i < j <= 3` with `i + j != 3`.
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if !(i < j && j <= 3) {
            return Err(Error::Contract("operator pair needs 0 <= i < j <= 3"));
        }
        if i + j == 3 {
            return Err(Error::Contract("pairs (0,3) and (1,2) are ill-posed"));
        }
        Ok(OperatorPair { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// `(0,1), (0,2), (1,3), (2,3)`, in the order of the Green-function chain.
    pub fn all() -> [OperatorPair; 4] {
        [
            OperatorPair { i: 0, j: 1 },
            OperatorPair { i: 0, j: 2 },
            OperatorPair { i: 1, j: 3 },
            OperatorPair { i: 2, j: 3 },
        ]
    }
}

impl core::fmt::Display for OperatorPair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenSpec {
    pub pair: OperatorPair,
    pub model: Model,
    pub dim: Dimension,
    /// The free constant of the `n = 3` Green functions for `(1,3)` and `(2,3)`.
    pub log_constant: f64,
}

impl GreenSpec {
    pub fn new(pair: OperatorPair, model: Model, dim: Dimension) -> Self {
        GreenSpec {
            pair,
            model,
            dim,
            log_constant: 0.0,
        }
    }
}

/// `G` from `q₁ = |X-Y|²` and `q₂ = |X̄-Y|²` (or their ball counterparts).
pub fn green_from_squares(spec: &GreenSpec, q1: f64, q2: f64) -> f64 {
    green_from_gap(spec, q1, q2, q2 - q1)
}

/// `ln(1+y) - y`, accurate for small `y`.
fn log1p_tail(y: f64) -> f64 {
    if math::abs(y) < 0.1 {
        let mut term = y;
        let mut acc = 0.0;
        for k in 2..40 {
            term *= -y;
            acc += term / k as f64;
        }
        acc
    } else {
        libm::log1p(y) - y
    }
}

/// `eˣ - 1 - x`, accurate for small `x`.
fn expm1_tail(x: f64) -> f64 {
    if math::abs(x) < 0.1 {
        let mut term = x;
        let mut acc = 0.0;
        for k in 2..30 {
            term *= x / k as f64;
            acc += term;
        }
        acc
    } else {
        libm::expm1(x) - x
    }
}

/// As [`green_from_squares`], with `gap = q₂ - q₁` supplied by the caller. Near the
/// boundary `q₁ ≈ q₂` and the combinations of `Γ(q₁)` and `Γ(q₂)` cancel; an exact
/// gap keeps the result accurate to working precision there.
pub fn green_from_gap(spec: &GreenSpec, q1: f64, q2: f64, gap: f64) -> f64 {
    let dim = spec.dim;
    let n = dim.nf();
    let (i, j) = (spec.pair.i, spec.pair.j);
    // q₁/q₂ = 1 - δ
    let delta = gap / q2;
    if dim.is_critical() {
        let c = 1.0 / (8.0 * dim.sphere_area());
        let g1 = fundamental_radial(dim, math::sqrt(q1), 0.0);
        let g2 = fundamental_radial(dim, math::sqrt(q2), 0.0);
        // Γ(q₁) - Γ(q₂) = -c ln(1-δ)
        let diff = -c * libm::log1p(-delta);
        match (i, j) {
            (0, 1) => -c * log1p_tail(-delta),
            (0, 2) => diff,
            (1, 3) => g1 + g2 + spec.log_constant,
            _ => g1 + g2 + c * delta + spec.log_constant,
        }
    } else {
        let m = (n - 3.0) / 2.0;
        let g1 = fundamental_radial(dim, math::sqrt(q1), 0.0);
        let g2 = fundamental_radial(dim, math::sqrt(q2), 0.0);
        // Γ(q₁)/Γ(q₂) = eˣ
        let x = -m * libm::log1p(-delta);
        match (i, j) {
            (0, 1) => g2 * (expm1_tail(x) - m * log1p_tail(-delta)),
            (0, 2) => g2 * libm::expm1(x),
            (1, 3) => g1 + g2,
            _ => g1 + g2 + m * delta * g2,
        }
    }
}

fn gamma_jet(dim: Dimension, q: &Jet3) -> Jet3 {
    let n = dim.nf();
    let a = dim.sphere_area();
    if dim.is_critical() {
        q.ln().scale(-1.0 / (8.0 * a))
    } else {
        q.powf((3.0 - n) / 2.0)
            .scale(1.0 / (2.0 * (n - 1.0) * (n - 3.0) * a))
    }
}

/// Exact jet of `G` in its first argument, from the jets of `q₁` and `q₂`.
pub fn green_jet_from_squares(spec: &GreenSpec, q1: &Jet3, q2: &Jet3) -> Jet3 {
    let dim = spec.dim;
    let n = dim.nf();
    let g1 = gamma_jet(dim, q1);
    let g2 = gamma_jet(dim, q2);
    let ratio = q1.mul(&q2.powf(-1.0));
    let (i, j) = (spec.pair.i, spec.pair.j);
    if dim.is_critical() {
        let corr = ratio.add_const(-1.0).scale(1.0 / (8.0 * dim.sphere_area()));
        match (i, j) {
            (0, 1) => g1.sub(&g2).add(&corr),
            (0, 2) => g1.sub(&g2),
            (1, 3) => g1.add(&g2).add_const(spec.log_constant),
            _ => g1.add(&g2).sub(&corr).add_const(spec.log_constant),
        }
    } else {
        let bracket = g2
            .mul(&ratio.scale(n - 3.0).add_const(-(n - 1.0)))
            .scale(0.5);
        match (i, j) {
            (0, 1) => g1.add(&bracket),
            (0, 2) => g1.sub(&g2),
            (1, 3) => g1.add(&g2),
            _ => g1.sub(&bracket),
        }
    }
}

/// `(q₁, q₂, q₂ - q₁)`, the gap formed directly rather than by subtraction.
fn squares(model: Model, p: &[f64], q: &[f64]) -> (f64, f64, f64) {
    let q1 = math::dist_sq(p, q);
    match model {
        Model::HalfSpace => {
            let d = p.len();
            let s = p[d - 1] + q[d - 1];
            let q2 = math::dist_sq(&p[..d - 1], &q[..d - 1]) + s * s;
            (q1, q2, 4.0 * p[d - 1] * q[d - 1])
        }
        Model::Ball => {
            let r = reflected_distance(p, q);
            (
                q1,
                r * r,
                (1.0 - math::norm_sq(p)) * (1.0 - math::norm_sq(q)),
            )
        }
    }
}

/// `G^{(i,j)}(P, Q)` or `Ḡ^{(i,j)}(P, Q)`.
pub fn green_value(spec: &GreenSpec, p: &[f64], q: &[f64]) -> Result<f64> {
    spec.dim.check_len(p)?;
    spec.dim.check_len(q)?;
    let (q1, q2, gap) = squares(spec.model, p, q);
    if q1 == 0.0 {
        return Err(Error::Singularity("Green function on the diagonal"));
    }
    Ok(green_from_gap(spec, q1, q2, gap))
}

/// The regular part `H = G - Γ`.
pub fn regular_part(spec: &GreenSpec, p: &[f64], q: &[f64]) -> Result<f64> {
    let g = green_value(spec, p, q)?;
    Ok(g - fundamental_radial(spec.dim, math::dist(p, q), 0.0))
}

/// Exact jet of `P ↦ G(P, Q)`.
pub fn green_jet(spec: &GreenSpec, p: &[f64], q: &[f64]) -> Result<Jet3> {
    spec.dim.check_len(p)?;
    spec.dim.check_len(q)?;
    let q1 = Jet3::dist_sq(p, q);
    if q1.value == 0.0 {
        return Err(Error::Singularity("Green function on the diagonal"));
    }
    let q2 = match spec.model {
        Model::HalfSpace => {
            let mut qbar: Vec<f64> = q.to_vec();
            let d = q.len();
            qbar[d - 1] = -qbar[d - 1];
            Jet3::dist_sq(p, &qbar)
        }
        Model::Ball => {
            let w = 1.0 - math::norm_sq(q);
            let zero = alloc::vec![0.0; p.len()];
            let r2 = Jet3::dist_sq(p, &zero);
            q1.add(&r2.scale(-w).add_const(w))
        }
    };
    Ok(green_jet_from_squares(spec, &q1, &q2))
}

/// `(G01, G02, G13, G23)` at one pair of points.
pub fn ordering_check(model: Model, dim: Dimension, p: &[f64], q: &[f64]) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, pair) in out.iter_mut().zip(OperatorPair::all()) {
        *slot = green_value(&GreenSpec::new(pair, model, dim), p, q)?;
    }
    Ok(out)
}

/// Whether a 4-tuple satisfies `0 <= G01 <= G02 <= G13 <= G23` within `slack`, and strictly if `strict`.
pub fn is_ordered(g: &[f64; 4], slack: f64, strict: bool) -> bool {
    if strict {
        g[0] > 0.0 && g[0] < g[1] && g[1] < g[2] && g[2] < g[3]
    } else {
        g[0] >= -slack && g[0] <= g[1] + slack && g[1] <= g[2] + slack && g[2] <= g[3] + slack
    }
}

/// Boundary residuals `|𝓑_i G|` and `|𝓑_j G|` at a boundary point, relative to `|𝓑 Γ|`,
/// with `𝓑` acting on the first argument.
pub fn regular_part_residual(
    spec: &GreenSpec,
    y: &[f64],
    x_boundary: &[f64],
) -> Result<(f64, f64)> {
    let g = green_jet(spec, x_boundary, y)?;
    let q1 = Jet3::dist_sq(x_boundary, y);
    let gam = gamma_jet(spec.dim, &q1);
    let ops = |j: &Jet3, k: usize| -> f64 {
        match spec.model {
            Model::HalfSpace => HalfSpaceTrace::from_jet(j).apply(k),
            Model::Ball => BallTrace::from_jet(j, x_boundary).apply(k, spec.dim),
        }
    };
    let res = |k: usize| {
        let scale = math::abs(ops(&gam, k)).max(f64::MIN_POSITIVE);
        math::abs(ops(&g, k)) / scale
    };
    Ok((res(spec.pair.i), res(spec.pair.j)))
}

/// Values of `(𝓑_i G, 𝓑_j G)` on the boundary that the closed forms actually attain.
///
/// Zero except on the ball with `n = 3` and pairs `(1,3)`, `(2,3)`, where the formulas carry
/// constant boundary values: `𝓑₃Ḡ = -1/|𝕊³|` (forced by the flux of `Δ²Ḡ = δ` through a
/// bounded domain whose homogeneous problem has constants in its kernel) and
/// `𝓑₁Ḡ = -1/(4|𝕊³|)`, `𝓑₂Ḡ = -1/(2|𝕊³|)` respectively. The latter two vanish after adding
/// `(|ξ|² + |η|²)/(8|𝕊³|)`, see [`critical_ball_adjustment`].
pub fn boundary_defect(spec: &GreenSpec) -> (f64, f64) {
    if spec.model != Model::Ball || !spec.dim.is_critical() {
        return (0.0, 0.0);
    }
    let a = spec.dim.sphere_area();
    match (spec.pair.i, spec.pair.j) {
        (1, 3) => (-0.25 / a, -1.0 / a),
        (2, 3) => (-0.5 / a, -1.0 / a),
        _ => (0.0, 0.0),
    }
}

/// `(|ξ|² + |η|²)/(8|𝕊³|)`: biharmonic, symmetric, and cancels the removable part of
/// [`boundary_defect`] without touching `𝓑₃`.
pub fn critical_ball_adjustment(dim: Dimension, xi: &[f64], eta: &[f64]) -> f64 {
    (math::norm_sq(xi) + math::norm_sq(eta)) / (8.0 * dim.sphere_area())
}

/// Finite-difference `Δ²` of `X ↦ H(X, Y)` at an interior point.
pub fn regular_part_bilaplacian(
    spec: &GreenSpec,
    y: &[f64],
    x: &[f64],
    s: StencilConfig,
) -> Result<Measured> {
    let f = FnField::new(spec.dim.ambient(), |p: &[f64]| {
        regular_part(spec, p, y).unwrap_or(f64::NAN)
    });
    biharmonic_residual(&f, x, s)
}

/// `|Ḡ(ξ,η) - G(X,Y)·w(ξ)w(η)|` relative to `|Ḡ|`, with `X = F(ξ)`, `Y = F(η)` and
/// `w = (2/|·+e|²)^{(n-3)/2}` (no weight when `n = 3`).
pub fn conformal_correspondence_check(
    pair: OperatorPair,
    xi: &[f64],
    eta: &[f64],
    dim: Dimension,
) -> Result<f64> {
    dim.check_len(xi)?;
    dim.check_len(eta)?;
    if pole_distance(xi) < 1e-8 || pole_distance(eta) < 1e-8 {
        return Err(Error::Singularity("correspondence at the south pole"));
    }
    let ball = GreenSpec::new(pair, Model::Ball, dim);
    let half = GreenSpec::new(pair, Model::HalfSpace, dim);
    let lhs = green_value(&ball, xi, eta)?;
    let x = conformal_map(xi)?;
    let y = conformal_map(eta)?;
    let w = if dim.is_critical() {
        1.0
    } else {
        conformal_factor(xi, dim) * conformal_factor(eta, dim)
    };
    let rhs = green_value(&half, &x, &y)? * w;
    let scale = math::abs(lhs).max(math::abs(rhs));
    Ok(if scale == 0.0 {
        0.0
    } else {
        math::abs(lhs - rhs) / scale
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        let d5 = Dimension::new(5).unwrap();
        let y = [0.1, 0.2, -0.3, 0.4, 0.1, 0.7];
        let x = [0.5, -0.2, 0.3, 0.0, 0.2, 0.0];
        let g = ordering_check(Model::HalfSpace, d5, &x, &y).unwrap();
        assert!(g[0].abs() < 1e-15 && g[1].abs() < 1e-15);
        let gam = fundamental_radial(d5, math::dist(&x, &y), 0.0);
        assert!((g[2] - 2.0 * gam).abs() < 1e-14 && (g[3] - 2.0 * gam).abs() < 1e-14);
    }

    #[test]
    fn ill_posed_rejected() {
        assert!(OperatorPair::new(0, 3).is_err());
        assert!(OperatorPair::new(1, 2).is_err());
        assert!(OperatorPair::new(2, 1).is_err());
    }

    #[test]
    fn boundary_conditions_hold_exactly() {
        for n in [3usize, 4, 5, 6] {
            let dim = Dimension::new(n).unwrap();
            let d = dim.ambient();
            let mut y = alloc::vec![0.0; d];
            y[0] = 0.2;
            y[d - 1] = 0.6;
            let mut x = alloc::vec![0.0; d];
            x[0] = -0.3;
            x[1] = 0.4;
            let mut eta = alloc::vec![0.0; d];
            eta[0] = 0.3;
            eta[1] = -0.2;
            let mut xb = alloc::vec![0.0; d];
            xb[0] = 0.6;
            xb[1] = 0.8;
            for pair in OperatorPair::all() {
                let (a, b) =
                    regular_part_residual(&GreenSpec::new(pair, Model::HalfSpace, dim), &y, &x)
                        .unwrap();
                assert!(a < 1e-12 && b < 1e-12, "half n={n} {pair} {a} {b}");
                let spec = GreenSpec::new(pair, Model::Ball, dim);
                let (di, dj) = boundary_defect(&spec);
                let g = green_jet(&spec, &xb, &eta).unwrap();
                let tr = BallTrace::from_jet(&g, &xb);
                let a = (tr.apply(pair.i(), dim) - di).abs();
                let b = (tr.apply(pair.j(), dim) - dj).abs();
                assert!(a < 1e-12 && b < 1e-12, "ball n={n} {pair} {a} {b}");
            }
        }
    }

    #[test]
    fn critical_adjustment_removes_lower_defect() {
        let dim = Dimension::new(3).unwrap();
        let eta = [0.3, -0.2, 0.1, 0.0];
        let xb = [0.0, 0.6, 0.0, 0.8];
        for pair in [
            OperatorPair::new(1, 3).unwrap(),
            OperatorPair::new(2, 3).unwrap(),
        ] {
            let spec = GreenSpec::new(pair, Model::Ball, dim);
            let w = (
                1.0 / (8.0 * dim.sphere_area()),
                math::norm_sq(&eta) / (8.0 * dim.sphere_area()),
            );
            let g = green_jet(&spec, &xb, &eta)
                .unwrap()
                .add(&Jet3::dist_sq(&xb, &[0.0; 4]).scale(w.0).add_const(w.1));
            let tr = BallTrace::from_jet(&g, &xb);
            assert!(tr.apply(pair.i(), dim).abs() < 1e-13);
            assert!((tr.apply(3, dim) + 1.0 / dim.sphere_area()).abs() < 1e-13);
        }
    }

    #[test]
    fn conformal_correspondence() {
        let xi = [0.1, -0.3, 0.2, 0.25];
        let eta = [-0.4, 0.1, 0.3, -0.2];
        for n in [3usize] {
            let dim = Dimension::new(n).unwrap();
            for pair in [
                OperatorPair::new(0, 1).unwrap(),
                OperatorPair::new(0, 2).unwrap(),
            ] {
                let r = conformal_correspondence_check(pair, &xi, &eta, dim).unwrap();
                assert!(r < 1e-12, "{pair} {r}");
            }
        }
        let xi = [0.1, -0.3, 0.2, 0.25, 0.1, 0.0];
        let eta = [-0.4, 0.1, 0.3, -0.2, 0.0, 0.3];
        let dim = Dimension::new(5).unwrap();
        for pair in OperatorPair::all() {
            let r = conformal_correspondence_check(pair, &xi, &eta, dim).unwrap();
            assert!(r < 1e-12, "{pair} {r}");
        }
    }
}
