//! Bubbles on both models, the classification profiles `M₁, M₂, M₃`, the family with one
//! boundary singularity, and the homogeneous solution families.

use alloc::vec;
use alloc::vec::Vec;

use crate::bvp::{
    accept, default_heights, extrapolated_convolution, kernel_convolution, linear_fit,
    QuadratureConfig,
};
use crate::data::{BoundaryData, Profile};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::{Jet3, ScalarField};
use crate::geometry::{conformal_factor, conformal_map, pole_distance, BubbleParams, Dimension};
use crate::kernels::half_space_kernel;
use crate::math;
use crate::operators::{
    biharmonic_residual, t_constant, BallTrace, HalfSpaceTrace, Measured, Model,
};
use crate::polynomial::{Polynomial, PolynomialField};
use crate::stencil::StencilConfig;

/// A geometric bubble as a field with exact jets.
#[derive(Clone, Debug, PartialEq)]
pub struct Bubble {
    params: BubbleParams,
    dim: Dimension,
}

impl Bubble {
    pub fn new(params: BubbleParams) -> Result<Self> {
        let n = match &params {
            BubbleParams::HalfSpace { x0, .. } => x0.len(),
            BubbleParams::Ball { xi0 } => xi0.len().saturating_sub(1),
        };
        Ok(Bubble {
            params,
            dim: Dimension::new(n)?,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn params(&self) -> &BubbleParams {
        &self.params
    }

    pub fn model(&self) -> Model {
        match self.params {
            BubbleParams::HalfSpace { .. } => Model::HalfSpace,
            BubbleParams::Ball { .. } => Model::Ball,
        }
    }

    fn exponent(&self) -> f64 {
        (self.dim.nf() - 3.0) / 2.0
    }

    /// `(numerator, Q)` with `U = (numerator / Q)^{(n-3)/2}`.
    fn parts(&self, p: &[f64]) -> (f64, f64) {
        match &self.params {
            BubbleParams::HalfSpace { x0, eps } => {
                let n = x0.len();
                let t = p[n] + eps;
                (2.0 * eps, t * t + math::dist_sq(&p[..n], x0))
            }
            BubbleParams::Ball { xi0 } => {
                let a2 = math::norm_sq(xi0);
                (
                    1.0 - a2,
                    math::norm_sq(p) * a2 - 2.0 * math::dot(xi0, p) + 1.0,
                )
            }
        }
    }

    /// The boundary trace raised to `power`, as half-space data.
    pub fn trace_power(&self, power: f64) -> Result<BoundaryData> {
        match &self.params {
            BubbleParams::HalfSpace { x0, eps } => Ok(BoundaryData::radial(
                1.0,
                x0,
                Profile::Bubble {
                    eps: *eps,
                    exponent: power * self.exponent(),
                },
            )),
            BubbleParams::Ball { .. } => Err(Error::Contract(
                "trace data are defined for half-space bubbles",
            )),
        }
    }
}

impl ScalarField for Bubble {
    fn ambient(&self) -> usize {
        self.dim.ambient()
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        self.dim.check_len(p)?;
        let (num, q) = self.parts(p);
        if !(q > 0.0) {
            return Err(Error::Singularity("bubble evaluated at its pole"));
        }
        Ok(math::pow(num / q, self.exponent()))
    }

    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        if p.len() != self.dim.ambient() {
            return None;
        }
        let (num, q) = self.parts(p);
        if !(q > 0.0) {
            return None;
        }
        let a = self.exponent();
        let qj = match &self.params {
            BubbleParams::HalfSpace { x0, eps } => {
                let mut c = x0.clone();
                c.push(-eps);
                Jet3::dist_sq(p, &c)
            }
            BubbleParams::Ball { xi0 } => {
                let mut j = Jet3::dist_sq(p, &vec![0.0; p.len()])
                    .scale(math::norm_sq(xi0))
                    .add_const(1.0);
                for (i, c) in xi0.iter().enumerate() {
                    j = j.add(&Jet3::coordinate(p, i).scale(-2.0 * c));
                }
                j
            }
        };
        Some(qj.powf(-a).scale(math::pow(num, a)))
    }

    /// Exact only for the centred ball bubble, which is the constant 1.
    fn bilaplacian(&self, p: &[f64]) -> Option<f64> {
        match &self.params {
            BubbleParams::Ball { xi0 } if p.len() == xi0.len() && xi0.iter().all(|c| *c == 0.0) => {
                Some(0.0)
            }
            _ => None,
        }
    }
}

/// Closed-form bubble value at `p`.
pub fn bubble_eval(params: &BubbleParams, p: &[f64]) -> Result<f64> {
    Bubble::new(params.clone())?.value(p)
}

/// Relative residual of `U₀(X)·U_{ξ₀}(F(X)) = U_{x₀,ε}(X)` with `ξ₀ = F(x₀, ε)`.
pub fn matched_bubble_residual(params: &BubbleParams, p: &[f64]) -> Result<f64> {
    let half = Bubble::new(params.clone())?;
    if half.model() != Model::HalfSpace {
        return Err(Error::Contract("matching starts from a half-space bubble"));
    }
    let ball = Bubble::new(params.matched_ball()?)?;
    let lhs = conformal_factor(p, half.dim) * ball.value(&conformal_map(p)?)?;
    let rhs = half.value(p)?;
    Ok(math::abs(lhs - rhs) / math::abs(rhs))
}

/// Worst case over a sample set of residuals that carry their own tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSummary {
    pub max_abs: f64,
    pub tolerance: f64,
    /// Every individual residual was within its own tolerance.
    pub within: bool,
}

impl ResidualSummary {
    fn of(ms: &[Measured]) -> Self {
        ResidualSummary {
            max_abs: ms.iter().fold(0.0, |m, r| m.max(math::abs(r.value))),
            tolerance: ms.iter().fold(0.0, |m, r| m.max(r.tolerance)),
            within: ms.iter().all(|r| math::abs(r.value) <= r.tolerance),
        }
    }
}

/// Interior `Δ²` residuals and the two nonlinear boundary residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvpResiduals {
    pub interior: ResidualSummary,
    pub boundary: [ResidualSummary; 2],
}

impl BvpResiduals {
    pub fn within(&self) -> bool {
        self.interior.within && self.boundary.iter().all(|b| b.within)
    }
}

fn check_critical_pair(i: usize, j: usize) -> Result<()> {
    if !(1 <= i && i < j && j <= 3) {
        return Err(Error::Domain("critical pairs need 1 <= i < j <= 3"));
    }
    Ok(())
}

/// `𝓑_k U - 𝕋_k U^{p_k*}` from the exact jet at a boundary point.
fn nonlinear_residual<F: ScalarField + ?Sized>(
    u: &F,
    model: Model,
    dim: Dimension,
    k: usize,
    p: &[f64],
) -> Result<Measured> {
    let jet = u
        .jet(p)
        .ok_or(Error::Evaluation("closed form has no jet at the sample"))?;
    let lhs = match model {
        Model::HalfSpace => HalfSpaceTrace::from_jet(&jet).apply(k),
        Model::Ball => BallTrace::from_jet(&jet, p).apply(k, dim),
    };
    let rhs = t_constant(dim, k) * math::pow(jet.value, dim.p_star(k)?);
    let scale = 1.0 + math::abs(lhs) + math::abs(rhs) + math::abs(jet.value);
    Ok(Measured {
        value: lhs - rhs,
        tolerance: 1e-10 * scale,
    })
}

fn check_boundary_sample(model: Model, p: &[f64]) -> Result<()> {
    let ok = match model {
        Model::HalfSpace => p[p.len() - 1] == 0.0,
        Model::Ball => math::abs(math::norm(p) - 1.0) < 1e-12,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Contract("boundary sample is not on the boundary"))
    }
}

#[allow(clippy::too_many_arguments)]
fn bvp_residuals<F: ScalarField + ?Sized>(
    u: &F,
    model: Model,
    dim: Dimension,
    i: usize,
    j: usize,
    interior: &[Vec<f64>],
    boundary: &[Vec<f64>],
    s: StencilConfig,
) -> Result<BvpResiduals> {
    let mut inner = Vec::with_capacity(interior.len());
    for p in interior {
        dim.check_len(p)?;
        inner.push(biharmonic_residual(u, p, s)?);
    }
    let mut bi = Vec::with_capacity(boundary.len());
    let mut bj = Vec::with_capacity(boundary.len());
    for p in boundary {
        dim.check_len(p)?;
        check_boundary_sample(model, p)?;
        bi.push(nonlinear_residual(u, model, dim, i, p)?);
        bj.push(nonlinear_residual(u, model, dim, j, p)?);
    }
    Ok(BvpResiduals {
        interior: ResidualSummary::of(&inner),
        boundary: [ResidualSummary::of(&bi), ResidualSummary::of(&bj)],
    })
}

/// Residuals of `Δ²U = 0`, `𝓑_iU = 𝕋_iU^{p_i*}`, `𝓑_jU = 𝕋_jU^{p_j*}` for a bubble.
///
/// `Δ²` is probed by finite differences; the boundary operators use exact jets.
pub fn bubble_bvp_residual(
    i: usize,
    j: usize,
    params: &BubbleParams,
    interior: &[Vec<f64>],
    boundary: &[Vec<f64>],
    s: StencilConfig,
) -> Result<BvpResiduals> {
    check_critical_pair(i, j)?;
    let u = Bubble::new(params.clone())?;
    u.dim.require_classification()?;
    bvp_residuals(&u, u.model(), u.dim, i, j, interior, boundary, s)
}

/// Which classification profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MProfile {
    /// `𝕋₁P₁∗U^{p₁} + 𝕋₃P₃∗U^{p₃*}`, for the pair `(𝓑₁, 𝓑₃)`.
    M1,
    /// `P₀∗U^{p₁*/p₁} + 𝕋₂P₂∗U^{p₂*}`, for `(𝓑₁, 𝓑₂)`.
    M2,
    /// `P₀∗U + 𝕋₂P₂∗U^{p₂}`, for `(𝓑₂, 𝓑₃)`.
    M3,
}

impl MProfile {
    pub fn pair(&self) -> (usize, usize) {
        match self {
            MProfile::M1 => (1, 3),
            MProfile::M2 => (1, 2),
            MProfile::M3 => (2, 3),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    math::abs(a - b) <= 1e-12 * math::abs(b)
}

/// A classification profile with its exponents `(p_i, p_j)` and half-space bubble.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationCase {
    which: MProfile,
    exponents: (f64, f64),
    bubble: Bubble,
}

impl ClassificationCase {
    /// Checks the exponent relation of the theorem behind `which` and its decay hypothesis
    /// against the bubble trace's decay `n - 3`.
    pub fn new(which: MProfile, exponents: (f64, f64), params: BubbleParams) -> Result<Self> {
        let bubble = Bubble::new(params)?;
        if bubble.model() != Model::HalfSpace {
            return Err(Error::Contract(
                "classification profiles use half-space bubbles",
            ));
        }
        let dim = bubble.dim;
        dim.require_classification()?;
        let (a, b) = exponents;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain("exponents must be positive"));
        }
        let n = dim.nf();
        let ok = match which {
            MProfile::M1 => close(b, dim.p_star(3)?) && a > 1.0 / (n - 3.0),
            MProfile::M2 => close(b / a, (n + 1.0) / (n - 1.0)),
            MProfile::M3 => close(b, dim.p_star(3)?) && a > 2.0 / (n - 3.0),
        };
        if !ok {
            return Err(Error::Contract(
                "exponents outside the critical branch of the theorem",
            ));
        }
        let case = ClassificationCase {
            which,
            exponents,
            bubble,
        };
        if !(n - 3.0 > case.decay_threshold()) {
            return Err(Error::Contract(
                "bubble trace decay does not meet the theorem's hypothesis",
            ));
        }
        Ok(case)
    }

    /// The fully critical case `p_i = p_i*`, `p_j = p_j*`.
    pub fn critical(which: MProfile, params: BubbleParams) -> Result<Self> {
        let dim = Bubble::new(params.clone())?.dim;
        dim.require_classification()?;
        let (i, j) = which.pair();
        Self::new(which, (dim.p_star(i)?, dim.p_star(j)?), params)
    }

    pub fn which(&self) -> MProfile {
        self.which
    }

    pub fn exponents(&self) -> (f64, f64) {
        self.exponents
    }

    pub fn bubble(&self) -> &Bubble {
        &self.bubble
    }

    pub fn dim(&self) -> Dimension {
        self.bubble.dim
    }

    /// The decay the theorem asks of `u(x, 0)`: `c > threshold`.
    pub fn decay_threshold(&self) -> f64 {
        let (a, b) = self.exponents;
        match self.which {
            MProfile::M1 => (3.0 / b).max(1.0 / a),
            MProfile::M2 => 2.0 / b,
            MProfile::M3 => (2.0 / a).max(3.0 / b),
        }
    }

    pub fn is_critical(&self) -> bool {
        let dim = self.dim();
        let (a, b) = self.exponents;
        let (i, j) = self.which.pair();
        let (pi, pj) = match (dim.p_star(i), dim.p_star(j)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return false,
        };
        close(a, pi) && close(b, pj)
    }

    /// `(kernel order, coefficient, power of the bubble trace)` for each convolution.
    fn terms(&self) -> Result<[(usize, f64, f64); 2]> {
        let dim = self.dim();
        let (a, b) = self.exponents;
        Ok(match self.which {
            MProfile::M1 => [(1, t_constant(dim, 1), a), (3, t_constant(dim, 3), b)],
            MProfile::M2 => [
                (0, 1.0, dim.p_star(1)? / a),
                (2, t_constant(dim, 2), dim.p_star(2)?),
            ],
            MProfile::M3 => [(0, 1.0, 1.0), (2, t_constant(dim, 2), a)],
        })
    }
}

/// Evaluates the profile at an interior half-space point.
pub fn m_profile_eval(case: &ClassificationCase, p: &[f64], q: &QuadratureConfig) -> Result<f64> {
    let dim = case.dim();
    dim.check_len(p)?;
    let (x, t) = (&p[..dim.n()], p[dim.n()]);
    if !(t > 0.0) {
        return Err(Error::Domain("profiles are evaluated at interior points"));
    }
    let mut sum = 0.0;
    for (k, c, power) in case.terms()? {
        let data = case.bubble.trace_power(power)?;
        data.check_admissible(k, dim)?;
        let e = kernel_convolution(
            |t, s| half_space_kernel(k, dim, t, s, 0.0),
            dim,
            &data,
            x,
            t,
            q,
        )?;
        sum += c * accept(e, q)?;
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub max_deviation: f64,
    pub deviations: Vec<f64>,
}

/// `max |M_k - U_{x₀,ε}|` over interior samples; only the critical case carries the identity.
pub fn classification_identity_check(
    case: &ClassificationCase,
    samples: &[Vec<f64>],
    q: &QuadratureConfig,
) -> Result<IdentityReport> {
    if !case.is_critical() {
        return Err(Error::Contract(
            "the identity is only claimed for critical exponents",
        ));
    }
    let mut deviations = Vec::with_capacity(samples.len());
    for p in samples {
        let m = m_profile_eval(case, p, q)?;
        deviations.push(math::abs(m - case.bubble.value(p)?));
    }
    Ok(IdentityReport {
        max_deviation: deviations.iter().fold(0.0, |a, b| a.max(*b)),
        deviations,
    })
}

/// Log-log slope of the profile along `X = (x₀, R)`, with `|X - (x₀, 0)| = R`.
///
/// Returns `(slope, r²)`.
pub fn m_profile_decay_fit(
    case: &ClassificationCase,
    radii: &[f64],
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if radii.len() < 3 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Contract("need at least three positive radii"));
    }
    let x0 = match case.bubble.params() {
        BubbleParams::HalfSpace { x0, .. } => x0.clone(),
        BubbleParams::Ball { .. } => unreachable!(),
    };
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for r in radii {
        let mut p = x0.clone();
        p.push(*r);
        xs.push(math::ln(*r));
        ys.push(math::ln(math::abs(m_profile_eval(case, &p, q)?)));
    }
    let (b, _, r2) = linear_fit(&xs, &ys);
    Ok((b, r2))
}

/// Log-log slope of the bubble trace `U_{x₀,ε}(x, 0)` over `|x - x₀| ∈ radii`.
pub fn bubble_trace_decay_fit(params: &BubbleParams, radii: &[f64]) -> Result<f64> {
    let u = Bubble::new(params.clone())?;
    let x0 = match params {
        BubbleParams::HalfSpace { x0, .. } => x0.clone(),
        BubbleParams::Ball { .. } => {
            return Err(Error::Contract("trace decay is a half-space notion"))
        }
    };
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for r in radii {
        let mut p = x0.clone();
        p[0] += r;
        p.push(0.0);
        xs.push(math::ln(*r));
        ys.push(math::ln(u.value(&p)?));
    }
    Ok(linear_fit(&xs, &ys).0)
}

/// `U_{ξ₀} + c̄ S` on the ball with a singular term `S` at `-e_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSolutionParams {
    pub i: usize,
    pub j: usize,
    pub xi0: Vec<f64>,
    pub cbar: f64,
}

impl SingularSolutionParams {
    pub fn new(i: usize, j: usize, xi0: &[f64], cbar: f64) -> Result<Self> {
        check_critical_pair(i, j)?;
        BubbleParams::ball(xi0)?;
        if !(cbar >= 0.0) || !cbar.is_finite() {
            return Err(Error::Domain(
                "the singular coefficient must be nonnegative",
            ));
        }
        Ok(SingularSolutionParams {
            i,
            j,
            xi0: xi0.to_vec(),
            cbar,
        })
    }

    /// The power `6 - i - j` of the polynomial factor.
    pub fn power(&self) -> u32 {
        (6 - self.i - self.j) as u32
    }
}

/// How the singular term is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularForm {
    /// `|ξ+e|^{3-n}((1-|ξ|²)/|ξ+e|²)^m`, the pullback of `t^m` under the conformal map.
    Pullback,
    /// `|ξ+e|^{3-n}((1-|ξ|²)/|ξ+e|)^m`, the variant with an unsquared denominator.
    Unsquared,
}

/// The field `U_{ξ₀} + c̄ S` with exact jets.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSolution {
    params: SingularSolutionParams,
    bubble: Bubble,
    form: SingularForm,
}

impl SingularSolution {
    pub fn new(params: SingularSolutionParams, form: SingularForm) -> Result<Self> {
        let bubble = Bubble::new(BubbleParams::ball(&params.xi0)?)?;
        bubble.dim.require_classification()?;
        Ok(SingularSolution {
            params,
            bubble,
            form,
        })
    }

    fn singular_jet(&self, p: &[f64]) -> Jet3 {
        let d = p.len();
        let n = self.bubble.dim.nf();
        let m = self.params.power();
        let mut e = vec![0.0; d];
        e[d - 1] = -1.0;
        let a = Jet3::dist_sq(p, &e);
        let w = Jet3::dist_sq(p, &vec![0.0; d]).scale(-1.0).add_const(1.0);
        let mut wm = Jet3::constant(d, 1.0);
        for _ in 0..m {
            wm = wm.mul(&w);
        }
        let denom = match self.form {
            SingularForm::Pullback => 2.0 * m as f64,
            SingularForm::Unsquared => m as f64,
        };
        wm.mul(&a.powf((3.0 - n - denom) / 2.0))
    }
}

impl ScalarField for SingularSolution {
    fn ambient(&self) -> usize {
        self.bubble.ambient()
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        self.bubble.dim.check_len(p)?;
        if pole_distance(p) == 0.0 {
            return Err(Error::Singularity("evaluated at the boundary singularity"));
        }
        Ok(self.bubble.value(p)? + self.params.cbar * self.singular_jet(p).value)
    }

    fn jet(&self, p: &[f64]) -> Option<Jet3> {
        if p.len() != self.ambient() || pole_distance(p) == 0.0 {
            return None;
        }
        let b = self.bubble.jet(p)?;
        Some(b.add(&self.singular_jet(p).scale(self.params.cbar)))
    }
}

/// Residuals of the singular family in the pullback form; every sample must lie at least
/// `margin` away from `-e_{n+1}`.
pub fn singular_solution_check(
    params: &SingularSolutionParams,
    interior: &[Vec<f64>],
    boundary: &[Vec<f64>],
    margin: f64,
    s: StencilConfig,
) -> Result<BvpResiduals> {
    singular_form_check(
        params,
        SingularForm::Pullback,
        interior,
        boundary,
        margin,
        s,
    )
}

/// As [`singular_solution_check`] for an explicit form of the singular term.
pub fn singular_form_check(
    params: &SingularSolutionParams,
    form: SingularForm,
    interior: &[Vec<f64>],
    boundary: &[Vec<f64>],
    margin: f64,
    s: StencilConfig,
) -> Result<BvpResiduals> {
    let u = SingularSolution::new(params.clone(), form)?;
    for p in interior.iter().chain(boundary) {
        u.bubble.dim.check_len(p)?;
        if pole_distance(p) < margin {
            return Err(Error::Contract(
                "sample too close to the boundary singularity",
            ));
        }
    }
    bvp_residuals(
        &u,
        Model::Ball,
        u.bubble.dim,
        params.i,
        params.j,
        interior,
        boundary,
        s,
    )
}

/// Solutions of the homogeneous problems left over by the classification.
#[derive(Clone, Debug, PartialEq)]
pub enum HomogeneousFamily {
    /// `c₁t` under `(𝓑₂, 𝓑₃)`.
    Linear(f64),
    /// `c₂t²` under `(𝓑₁, 𝓑₃)`.
    Quadratic(f64),
    /// `c₃t³` under `u = Δu = 0`.
    Cubic(f64),
    /// `tP(x)` with `deg P ≤ 2` under `u = Δu = 0`; `P` is a polynomial in the `n` boundary variables.
    TimesQuadratic(Polynomial),
    /// `-(2/|𝕊ⁿ|)∫ t²φ(y)(t² + |x-y|²)^{-(n+1)/2} dy` under `(𝓑₀, 𝓑₃)`.
    PhiZeroThree(BoundaryData),
    /// `((n-1)(n-3)|𝕊ⁿ|)^{-1}∫ φ(y)(t² + |x-y|²)^{-(n-3)/2} dy` under `(𝓑₁, 𝓑₂)`.
    PhiOneTwo(BoundaryData),
}

/// Boundary conditions a family is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Operator(usize),
    /// `Δu` on the boundary.
    Laplacian,
}

impl HomogeneousFamily {
    pub fn conditions(&self) -> [Condition; 2] {
        use Condition::*;
        match self {
            HomogeneousFamily::Linear(_) => [Operator(2), Operator(3)],
            HomogeneousFamily::Quadratic(_) => [Operator(1), Operator(3)],
            HomogeneousFamily::Cubic(_) | HomogeneousFamily::TimesQuadratic(_) => {
                [Operator(0), Laplacian]
            }
            HomogeneousFamily::PhiZeroThree(_) => [Operator(0), Operator(3)],
            HomogeneousFamily::PhiOneTwo(_) => [Operator(1), Operator(2)],
        }
    }

    fn polynomial(&self, dim: Dimension) -> Result<Option<Polynomial>> {
        let d = dim.ambient();
        let t = Polynomial::coordinate(d, dim.n());
        Ok(match self {
            HomogeneousFamily::Linear(c) => Some(t.scale(*c)),
            HomogeneousFamily::Quadratic(c) => Some(t.pow(2).scale(*c)),
            HomogeneousFamily::Cubic(c) => Some(t.pow(3).scale(*c)),
            HomogeneousFamily::TimesQuadratic(p) => {
                if p.dim() != dim.n() {
                    return Err(Error::DimensionMismatch {
                        expected: dim.n(),
                        found: p.dim(),
                    });
                }
                if p.degree() > 2 {
                    return Err(Error::Domain(
                        "the boundary polynomial must have degree at most 2",
                    ));
                }
                Some(t.mul(&p.extend_dim(d)))
            }
            _ => None,
        })
    }

    fn kernel(&self, dim: Dimension) -> Option<(&BoundaryData, Expr)> {
        let n = dim.nf();
        let a = dim.sphere_area();
        match self {
            HomogeneousFamily::PhiZeroThree(phi) => Some((
                phi,
                Expr::monomial(dim.n(), -2.0 / a, 2, -(n + 1.0) / 2.0, 0),
            )),
            HomogeneousFamily::PhiOneTwo(phi) => Some((
                phi,
                Expr::monomial(
                    dim.n(),
                    1.0 / ((n - 1.0) * (n - 3.0) * a),
                    0,
                    -(n - 3.0) / 2.0,
                    0,
                ),
            )),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousReport {
    pub conditions: [Condition; 2],
    /// Largest boundary residual of each condition.
    pub boundary: [f64; 2],
    pub boundary_tolerance: f64,
    /// Largest `|Δ²u|` over the interior samples.
    pub interior_bilaplacian: f64,
    /// Largest `|u|` over the interior samples; nonzero means the family is nontrivial.
    pub interior_value: f64,
}

impl HomogeneousReport {
    pub fn within(&self) -> bool {
        self.boundary.iter().all(|b| *b <= self.boundary_tolerance)
            && self.interior_bilaplacian <= self.boundary_tolerance
            && self.interior_value > 0.0
    }
}

fn condition_of_trace(tr: &HalfSpaceTrace, c: Condition) -> f64 {
    match c {
        Condition::Operator(k) => tr.apply(k),
        Condition::Laplacian => tr.u_tt + tr.lap_x,
    }
}

fn condition_of_expr(e: &Expr, c: Condition) -> Expr {
    match c {
        Condition::Operator(k) => e.boundary_op(k),
        Condition::Laplacian => e.lap(),
    }
}

/// Checks that a family satisfies its homogeneous conditions at `boundary` points `x ∈ ℝⁿ`,
/// is biharmonic and is nonzero at the `interior` points `(x, t)`.
///
/// Polynomial families are checked exactly; the `φ` families through boundary limits
/// extrapolated from the default heights.
pub fn homogeneous_family_check(
    family: &HomogeneousFamily,
    dim: Dimension,
    boundary: &[Vec<f64>],
    interior: &[Vec<f64>],
    q: &QuadratureConfig,
) -> Result<HomogeneousReport> {
    dim.require_classification()?;
    let conditions = family.conditions();
    let mut report = HomogeneousReport {
        conditions,
        boundary: [0.0; 2],
        boundary_tolerance: 0.0,
        interior_bilaplacian: 0.0,
        interior_value: 0.0,
    };
    if let Some(poly) = family.polynomial(dim)? {
        let f = PolynomialField::new(poly);
        let mut scale: f64 = 1.0;
        for x in boundary {
            if x.len() != dim.n() {
                return Err(Error::DimensionMismatch {
                    expected: dim.n(),
                    found: x.len(),
                });
            }
            let mut p = x.clone();
            p.push(0.0);
            let tr = HalfSpaceTrace::from_jet(&f.jet(&p).unwrap_or_else(|| unreachable!()));
            scale = scale.max(math::abs(tr.u_ttt) + math::abs(tr.lap_x_t) + math::abs(tr.u_tt));
            for (slot, c) in conditions.iter().enumerate() {
                report.boundary[slot] =
                    report.boundary[slot].max(math::abs(condition_of_trace(&tr, *c)));
            }
        }
        for p in interior {
            dim.check_len(p)?;
            report.interior_bilaplacian = report
                .interior_bilaplacian
                .max(math::abs(f.bilaplacian(p).unwrap_or(f64::NAN)));
            report.interior_value = report.interior_value.max(math::abs(f.value(p)?));
        }
        report.boundary_tolerance = 1e-12 * scale;
        return Ok(report);
    }
    let (phi, kernel) = family
        .kernel(dim)
        .ok_or(Error::Contract("family has no kernel"))?;
    let heights = default_heights();
    let mut change: f64 = 0.0;
    for x in boundary {
        for (slot, c) in conditions.iter().enumerate() {
            let (v, dv) = extrapolated_convolution(
                &condition_of_expr(&kernel, *c),
                dim,
                phi,
                x,
                &heights,
                q,
            )?;
            report.boundary[slot] = report.boundary[slot].max(math::abs(v));
            change = change.max(dv);
        }
    }
    let bilap = kernel.lap().lap();
    for p in interior {
        dim.check_len(p)?;
        let (x, t) = (&p[..dim.n()], p[dim.n()]);
        let v = accept(
            kernel_convolution(|t, s| kernel.eval(t, s), dim, phi, x, t, q)?,
            q,
        )?;
        let b = accept(
            kernel_convolution(|t, s| bilap.eval(t, s), dim, phi, x, t, q)?,
            q,
        )?;
        report.interior_value = report.interior_value.max(math::abs(v));
        report.interior_bilaplacian = report.interior_bilaplacian.max(math::abs(b));
    }
    report.boundary_tolerance = 4.0 * change + 100.0 * q.target_tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::half_space_kernel_expr;

    fn half(n: usize, eps: f64) -> BubbleParams {
        BubbleParams::half_space(&vec![0.0; n], eps).unwrap()
    }

    #[test]
    fn bubble_values() {
        let mut p = vec![0.0; 6];
        assert!((bubble_eval(&half(5, 1.0), &p).unwrap() - 2.0).abs() < 1e-15);
        // (2ε/(ε + t)²)^{(n-3)/2} at t = ε = 1, n = 5
        p[5] = 1.0;
        assert!((bubble_eval(&half(5, 1.0), &p).unwrap() - 0.5).abs() < 1e-15);
        let ball = BubbleParams::ball(&[0.0; 6]).unwrap();
        assert_eq!(
            bubble_eval(&ball, &[0.3, 0.1, 0.0, 0.2, 0.0, -0.4]).unwrap(),
            1.0
        );
    }

    #[test]
    fn jets_match_values() {
        let b = Bubble::new(BubbleParams::ball(&[0.2, -0.1, 0.3, 0.0, 0.1]).unwrap()).unwrap();
        let p = [0.1, 0.2, -0.3, 0.4, 0.05];
        let j = b.jet(&p).unwrap();
        assert!((j.value - b.value(&p).unwrap()).abs() < 1e-15);
        let h = 1e-6;
        let mut q = p;
        q[2] += h;
        let fd = (b.value(&q).unwrap() - j.value) / h;
        assert!((fd - j.grad[2]).abs() < 1e-5);
    }

    #[test]
    fn ball_unit_bubble_is_exact() {
        let params = BubbleParams::ball(&[0.0; 6]).unwrap();
        let boundary = vec![
            vec![0.6, 0.0, 0.8, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        ];
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let r = bubble_bvp_residual(i, j, &params, &[], &boundary, StencilConfig::default())
                .unwrap();
            assert_eq!(r.boundary[0].max_abs, 0.0);
            assert_eq!(r.boundary[1].max_abs, 0.0);
        }
    }

    #[test]
    fn matched_bubbles_agree() {
        let params = BubbleParams::half_space(&[0.3, -0.2, 0.1, 0.0, 0.5], 0.7).unwrap();
        for p in [
            [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            [2.0, -1.0, 0.0, 0.5, 0.0, 0.0],
        ] {
            assert!(matched_bubble_residual(&params, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn scaling_covariance() {
        let (x0, eps) = ([0.4, -0.3, 0.2, 0.1], 0.6);
        let u = BubbleParams::half_space(&x0, eps).unwrap();
        let p = [1.0, 0.5, -0.2, 0.3, 0.9];
        let mut s: Vec<f64> = (0..4).map(|i| (p[i] - x0[i]) / eps).collect();
        s.push(p[4] / eps);
        let lhs = bubble_eval(&u, &p).unwrap();
        let rhs = math::pow(eps, -0.5) * bubble_eval(&half(4, 1.0), &s).unwrap();
        assert!((lhs - rhs).abs() < 1e-14 * lhs);
    }

    #[test]
    fn exponent_branches() {
        let p = half(5, 1.0);
        assert!(ClassificationCase::new(MProfile::M1, (2.0, 4.0), p.clone()).is_ok());
        assert!(ClassificationCase::new(MProfile::M1, (2.0, 3.0), p.clone()).is_err());
        assert!(ClassificationCase::new(MProfile::M1, (0.4, 4.0), p.clone()).is_err());
        assert!(ClassificationCase::critical(MProfile::M2, p.clone())
            .unwrap()
            .is_critical());
        assert!(!ClassificationCase::new(MProfile::M1, (1.5, 4.0), p)
            .unwrap()
            .is_critical());
        assert!(ClassificationCase::critical(MProfile::M1, half(3, 1.0)).is_err());
    }

    #[test]
    fn phi_kernels_are_poisson_kernels() {
        let dim = Dimension::new(5).unwrap();
        let f03 = HomogeneousFamily::PhiZeroThree(BoundaryData::zero(5));
        let f12 = HomogeneousFamily::PhiOneTwo(BoundaryData::zero(5));
        let (t, s) = (0.3, 0.7);
        let a = f03.kernel(dim).unwrap().1.eval(t, s);
        let b = f12.kernel(dim).unwrap().1.eval(t, s);
        assert!((a - half_space_kernel_expr(1, dim).eval(t, s)).abs() < 1e-15);
        assert!((b - half_space_kernel_expr(3, dim).eval(t, s)).abs() < 1e-15);
    }

    #[test]
    fn polynomial_families() {
        let dim = Dimension::new(4).unwrap();
        let q = QuadratureConfig::default();
        let boundary = vec![vec![0.3, -0.2, 0.5, 1.0]];
        let interior = vec![vec![0.3, -0.2, 0.5, 1.0, 0.7]];
        let p2 = Polynomial::coordinate(4, 0)
            .mul(&Polynomial::coordinate(4, 1))
            .add(&Polynomial::coordinate(4, 2).pow(2));
        for fam in [
            HomogeneousFamily::Linear(1.0),
            HomogeneousFamily::Quadratic(2.0),
            HomogeneousFamily::Cubic(0.5),
            HomogeneousFamily::TimesQuadratic(p2.clone()),
        ] {
            let r = homogeneous_family_check(&fam, dim, &boundary, &interior, &q).unwrap();
            assert!(r.within(), "{fam:?}: {r:?}");
        }
        // B₃(tP) = 3Δ̄P, so the (𝓑₀, 𝓑₃) pair is not what annihilates tP.
        let f = PolynomialField::new(Polynomial::coordinate(5, 4).mul(&p2.extend_dim(5)));
        let tr = HalfSpaceTrace::from_jet(&f.jet(&[0.3, -0.2, 0.5, 1.0, 0.0]).unwrap());
        assert!((tr.apply(3) - 6.0).abs() < 1e-12);
    }
}
