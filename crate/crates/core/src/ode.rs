//! Radial solutions on the cylinder `[0, ∞) × Sⁿ`.
//!
//! A radial `U` on the ball becomes `V(t) = e^{(3-n)t/2} U(e^{-t})`, and the
//! equation `Δ²U = U^{p*}` becomes the autonomous fourth-order ODE
//! `V'''' - βV'' + λμV = V^{p*}` with `β = λ + μ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Dimension;
use crate::math;
use crate::operators::{t_constant, BallTrace};

pub type State = [f64; 4];

/// Right-hand side convention of the ODE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `V^{p*}`.
    Unit,
    /// `((n-3)/2) Q V^{p*}` with `Q` the Q-curvature of `S^{n+1}`.
    Geometric,
}

/// `Q = (n+1)((n+1)² - 4)/8`, the Q-curvature of the round `S^{n+1}`.
pub fn sphere_q_curvature(dim: Dimension) -> f64 {
    let m = dim.nf() + 1.0;
    m * (m * m - 4.0) / 8.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeParams {
    pub dim: Dimension,
    pub lambda: f64,
    pub mu: f64,
    pub zeroth: f64,
    pub damping: f64,
    pub p_star: f64,
    pub normalization: Normalization,
}

impl OdeParams {
    pub fn new(n: usize, normalization: Normalization) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain("the cylinder ODE needs n >= 4"));
        }
        let dim = Dimension::new(n)?;
        let nf = dim.nf();
        let lambda = math::powi((nf - 3.0) / 2.0, 2);
        let mu = math::powi((nf + 1.0) / 2.0, 2);
        let zeroth = math::powi((nf + 1.0) * (nf - 3.0) / 4.0, 2);
        let damping = (nf * nf - 2.0 * nf + 5.0) / 2.0;
        let p_star = (nf + 5.0) / (nf - 3.0);
        // both sides are dyadic rationals, so equality is exact
        assert_eq!(lambda + mu, damping);
        assert_eq!(lambda * mu, zeroth);
        Ok(OdeParams {
            dim,
            lambda,
            mu,
            zeroth,
            damping,
            p_star,
            normalization,
        })
    }

    /// Coefficient in front of `V^{p*}`.
    pub fn source_coefficient(&self) -> f64 {
        match self.normalization {
            Normalization::Unit => 1.0,
            Normalization::Geometric => (self.dim.nf() - 3.0) / 2.0 * sphere_q_curvature(self.dim),
        }
    }

    /// The positive constant solution.
    pub fn fixed_point(&self) -> f64 {
        math::pow(
            self.zeroth / self.source_coefficient(),
            1.0 / (self.p_star - 1.0),
        )
    }

    /// `κ` with `κV` solving the unit equation whenever `V` solves the geometric one.
    pub fn scaling_to_unit(&self) -> f64 {
        let c = (self.dim.nf() - 3.0) / 2.0 * sphere_q_curvature(self.dim);
        math::pow(c, (self.dim.nf() - 3.0) / 8.0)
    }

    /// Source minus the zeroth-order term, written as `V·g(V)`.
    ///
    /// `g` is snapped to zero within a few ulps of the constant solution so that
    /// roundoff in `pow` does not seed the unstable modes there.
    fn restoring(&self, v: f64) -> f64 {
        let g =
            self.source_coefficient() * math::pow(math::abs(v), self.p_star - 1.0) - self.zeroth;
        if math::abs(g) <= 8.0 * f64::EPSILON * self.zeroth {
            0.0
        } else {
            v * g
        }
    }

    /// First-order system for `(V, V', V'', V''')`.
    pub fn rhs(&self, y: &State) -> State {
        [y[1], y[2], y[3], self.damping * y[2] + self.restoring(y[0])]
    }

    /// Factored system for `(V, V', W, W')` with `W = V'' - λV` and `W'' - μW = V^{p*}`.
    pub fn cascade_rhs(&self, y: &State) -> State {
        [
            y[1],
            y[2] + self.lambda * y[0],
            y[3],
            self.mu * y[2] + self.zeroth * y[0] + self.restoring(y[0]),
        ]
    }

    pub fn to_cascade(&self, y: &State) -> State {
        [
            y[0],
            y[1],
            y[2] - self.lambda * y[0],
            y[3] - self.lambda * y[1],
        ]
    }

    pub fn from_cascade(&self, z: &State) -> State {
        [
            z[0],
            z[1],
            z[2] + self.lambda * z[0],
            z[3] + self.lambda * z[1],
        ]
    }

    /// `(3n² - 6n + 7)/4`, the first-order coefficient in the third boundary operator.
    pub fn b3_coefficient(&self) -> f64 {
        let n = self.dim.nf();
        (3.0 * n * n - 6.0 * n + 7.0) / 4.0
    }

    /// `(n-3)(n+1)/4`, the zeroth-order coefficient in the second boundary operator.
    pub fn b2_coefficient(&self) -> f64 {
        let n = self.dim.nf();
        (n - 3.0) * (n + 1.0) / 4.0
    }

    /// Cylinder boundary operators at `t = 0`: `𝓑₁ = -V'`, `𝓑₂ = V'' + cV`, `𝓑₃ = V''' - c'V'`.
    pub fn boundary_operator(&self, k: usize, y: &State) -> f64 {
        match k {
            0 => y[0],
            1 => -y[1],
            2 => y[2] + self.b2_coefficient() * y[0],
            _ => y[3] - self.b3_coefficient() * y[1],
        }
    }
}

/// Boundary data of the cylinder problem: `V(0) = C₀`, `𝓑_i V = C_i`, `𝓑₃V = C₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeBoundary {
    pub i: usize,
    pub c0: f64,
    pub ci: f64,
    pub c3: f64,
}

impl OdeBoundary {
    pub fn new(i: usize, c0: f64, ci: f64, c3: f64) -> Result<Self> {
        if i != 1 && i != 2 {
            return Err(Error::Domain("boundary index must be 1 or 2"));
        }
        if !(c0 > 0.0) {
            return Err(Error::Domain("boundary value C0 must be positive"));
        }
        Ok(OdeBoundary { i, c0, ci, c3 })
    }

    /// The data a given initial state satisfies.
    pub fn of_state(params: &OdeParams, i: usize, y: &State) -> Result<Self> {
        OdeBoundary::new(
            i,
            y[0],
            params.boundary_operator(i, y),
            params.boundary_operator(3, y),
        )
    }

    /// Initial state for a value of the free datum: `V''(0)` when `i = 1`, `V'(0)` when `i = 2`.
    pub fn initial_state(&self, params: &OdeParams, free: f64) -> State {
        let k3 = params.b3_coefficient();
        match self.i {
            1 => {
                let v1 = -self.ci;
                [self.c0, v1, free, self.c3 + k3 * v1]
            }
            _ => [
                self.c0,
                free,
                self.ci - params.b2_coefficient() * self.c0,
                self.c3 + k3 * free,
            ],
        }
    }

    pub fn free_datum(&self, y: &State) -> f64 {
        if self.i == 1 {
            y[2]
        } else {
            y[1]
        }
    }
}

/// `V(t) = e^{(3-n)t/2} U(e^{-t})` for a radial field, read along the first axis.
pub fn cylinder_transform<F: ScalarField + ?Sized>(u: &F, dim: Dimension, t: f64) -> Result<f64> {
    let mut p = vec![0.0; u.ambient()];
    p[0] = math::exp(-t);
    Ok(math::exp((3.0 - dim.nf()) * t / 2.0) * u.value(&p)?)
}

/// The same transform for a radial profile `r ↦ U(r)`.
pub fn cylinder_transform_profile<G: Fn(f64) -> f64>(u: G, dim: Dimension, t: f64) -> f64 {
    math::exp((3.0 - dim.nf()) * t / 2.0) * u(math::exp(-t))
}

/// `U(r) = r^{(3-n)/2} V(-ln r)`.
pub fn inverse_cylinder_transform<G: Fn(f64) -> f64>(v: G, dim: Dimension, r: f64) -> f64 {
    math::pow(r, (3.0 - dim.nf()) / 2.0) * v(-math::ln(r))
}

/// `sech(t + ln ε)^{(n-3)/2}`, the image of the radial bubble with geometric normalization.
pub fn sech_bubble(dim: Dimension, eps: f64, t: f64) -> f64 {
    math::pow(1.0 / math::cosh(t + math::ln(eps)), (dim.nf() - 3.0) / 2.0)
}

/// Derivatives through third order of `sech(s)^a`, via `w = tanh s`.
fn sech_power_state(a: f64, s: f64) -> State {
    let f = math::pow(1.0 / math::cosh(s), a);
    let w = libm::tanh(s);
    let w2 = w * w;
    let d1 = -a * w;
    let d2 = a * a * w2 - a * (1.0 - w2);
    let d3 = -a * a * a * w2 * w + 3.0 * a * a * w * (1.0 - w2) + 2.0 * a * w * (1.0 - w2);
    [f, f * d1, f * d2, f * d3]
}

/// State `(V, V', V'', V''')` of the bubble profile at `t`, scaled by `scale`.
pub fn bubble_state(dim: Dimension, eps: f64, scale: f64, t: f64) -> State {
    let s = sech_power_state((dim.nf() - 3.0) / 2.0, t + math::ln(eps));
    [scale * s[0], scale * s[1], scale * s[2], scale * s[3]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedT,
    SignChange,
    Blowup,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ReachedT => "reachedT",
            Termination::SignChange => "signChange",
            Termination::Blowup => "blowup",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Integration stops once `|V|` exceeds this.
    pub bound: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-10,
            bound: 1e6,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub termination: Termination,
    /// Where integration stopped; for a sign change, the interpolated zero of `V`.
    pub exit_time: f64,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory has at least the initial node")
    }

    /// The state at a node time, if `t` is one.
    pub fn at(&self, t: f64) -> Option<&State> {
        let k = self
            .times
            .iter()
            .position(|s| math::abs(s - t) <= 1e-12 * (1.0 + math::abs(t)))?;
        Some(&self.states[k])
    }

    pub fn max_value(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step<R: Fn(&State) -> State>(rhs: &R, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 4]; 7];
    k[0] = rhs(y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for c in 0..4 {
                ys[c] += h * A[s][j] * kj[c];
            }
        }
        k[s] = rhs(&ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; 4];
    for s in 0..7 {
        for c in 0..4 {
            y5[c] += h * B5[s] * k[s][c];
            err[c] += h * (B5[s] - B4[s]) * k[s][c];
        }
    }
    (y5, err)
}

fn error_norm(y: &State, y_new: &State, err: &State, cfg: &IntegratorConfig) -> f64 {
    let mut m: f64 = 0.0;
    for c in 0..4 {
        let sc = cfg.atol + cfg.rtol * math::abs(y[c]).max(math::abs(y_new[c]));
        m = m.max(math::abs(err[c]) / sc);
    }
    m
}

/// Adaptive integration of `y' = rhs(y)` on `[0, T]`, landing exactly on every `stops` time.
pub fn integrate_system<R: Fn(&State) -> State>(
    rhs: R,
    init: State,
    t_end: f64,
    stops: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !(cfg.rtol > 0.0) || !(cfg.atol > 0.0) {
        return Err(Error::Domain(
            "integration needs T > 0 and positive tolerances",
        ));
    }
    let mut marks: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|s| *s > 0.0 && *s < t_end)
        .collect();
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    marks.push(t_end);
    let mut next_mark = 0;

    let mut t = 0.0;
    let mut y = init;
    let mut times = vec![0.0];
    let mut states = vec![init];
    let mut h = 1e-3_f64.min(t_end);
    let mut steps = 0;

    while next_mark < marks.len() {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Stiffness { t });
        }
        let target = marks[next_mark];
        let lands = t + h >= target;
        let step = if lands { target - t } else { h };
        let (y_new, err) = dp_step(&rhs, &y, step);
        let e = error_norm(&y, &y_new, &err, cfg);
        if !e.is_finite() || e > 1.0 {
            if !y_new.iter().all(|v| v.is_finite()) && step <= cfg.h_min {
                times.push(t + step);
                states.push(y_new);
                return Ok(Trajectory {
                    times,
                    states,
                    termination: Termination::Blowup,
                    exit_time: t + step,
                });
            }
            let factor = if e.is_finite() {
                (0.9 * math::pow(e, -0.2)).max(0.2)
            } else {
                0.2
            };
            h = step * factor;
            if h < cfg.h_min {
                return Err(Error::Stiffness { t });
            }
            continue;
        }
        let t_new = if lands { target } else { t + step };
        if lands {
            next_mark += 1;
        }
        if !lands {
            h = step
                * if e == 0.0 {
                    5.0
                } else {
                    (0.9 * math::pow(e, -0.2)).min(5.0)
                };
        }

        if y[0] > 0.0 && y_new[0] <= 0.0 {
            let exit = t + step * y[0] / (y[0] - y_new[0]);
            times.push(t_new);
            states.push(y_new);
            return Ok(Trajectory {
                times,
                states,
                termination: Termination::SignChange,
                exit_time: exit,
            });
        }
        if !y_new.iter().all(|v| v.is_finite()) || math::abs(y_new[0]) > cfg.bound {
            times.push(t_new);
            states.push(y_new);
            return Ok(Trajectory {
                times,
                states,
                termination: Termination::Blowup,
                exit_time: t_new,
            });
        }
        t = t_new;
        y = y_new;
        times.push(t);
        states.push(y);
    }
    Ok(Trajectory {
        times,
        states,
        termination: Termination::ReachedT,
        exit_time: t,
    })
}

/// Integrate the fourth-order equation on `[0, T]`.
pub fn integrate_ode(
    params: &OdeParams,
    init: State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_ode_with_stops(params, init, t_end, &[], cfg)
}

pub fn integrate_ode_with_stops(
    params: &OdeParams,
    init: State,
    t_end: f64,
    stops: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_system(|y| params.rhs(y), init, t_end, stops, cfg)
}

/// Integrate the factored cascade and return the trajectory in `(V, V', V'', V''')` coordinates.
pub fn integrate_cascade(
    params: &OdeParams,
    init: State,
    t_end: f64,
    stops: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut tr = integrate_system(
        |z| params.cascade_rhs(z),
        params.to_cascade(&init),
        t_end,
        stops,
        cfg,
    )?;
    for s in tr.states.iter_mut() {
        *s = params.from_cascade(s);
    }
    Ok(tr)
}

/// Largest `|V_a - V_b|` over the shared stop times of two trajectories.
pub fn max_value_gap(a: &Trajectory, b: &Trajectory, stops: &[f64]) -> Option<f64> {
    let mut m: f64 = 0.0;
    for t in stops {
        m = m.max(math::abs(a.at(*t)?[0] - b.at(*t)?[0]));
    }
    Some(m)
}

/// Truncated Taylor series `Σ c_k (r - r₀)^k` through fourth order.
#[derive(Clone, Copy, Debug)]
struct Taylor4([f64; 5]);

impl Taylor4 {
    fn powf(&self, alpha: f64) -> Taylor4 {
        let g = &self.0;
        let mut h = [0.0; 5];
        h[0] = math::pow(g[0], alpha);
        for k in 1..5 {
            let mut s = 0.0;
            for j in 1..=k {
                s += (alpha * j as f64 - (k - j) as f64) * g[j] * h[k - j];
            }
            h[k] = s / (k as f64 * g[0]);
        }
        Taylor4(h)
    }

    fn derivatives(&self) -> [f64; 5] {
        let c = &self.0;
        [c[0], c[1], 2.0 * c[2], 6.0 * c[3], 24.0 * c[4]]
    }
}

/// Derivatives through fourth order of `(2ε/(ε² + r²))^{(n-3)/2}` at `r`.
pub fn radial_bubble_derivatives(dim: Dimension, eps: f64, r: f64) -> [f64; 5] {
    let a = (dim.nf() - 3.0) / 2.0;
    let g = Taylor4([eps * eps + r * r, 2.0 * r, 1.0, 0.0, 0.0]);
    let d = g.powf(-a).derivatives();
    let c = math::pow(2.0 * eps, a);
    [c * d[0], c * d[1], c * d[2], c * d[3], c * d[4]]
}

/// `Δ²` of a radial function in `n + 1` variables from its radial derivatives.
pub fn radial_bilaplacian(dim: Dimension, r: f64, d: &[f64; 5]) -> f64 {
    let n = dim.nf();
    d[4] + 2.0 * n / r * d[3] + n * (n - 2.0) / (r * r) * d[2] - n * (n - 2.0) / (r * r * r) * d[1]
}

/// Constants attached to the explicit radial solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplicitConstants {
    /// `c_i` from the closed form in `ε`.
    pub ci: f64,
    /// `c₃` from the constraint relation.
    pub c3: f64,
    /// `c_i` back-solved from `𝓑_i U` on the sphere.
    pub ci_measured: f64,
    pub c3_measured: f64,
    /// `|c₃ - (3/2)c₁ - c₁³|` for `i = 1`, `|c₃² - (c₂ - ½)(1 + c₂)²|` for `i = 2`.
    pub constraint_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplicitCheck {
    /// Largest relative interior residual of `Δ²U - ((n-3)/2)Q U^{p*}` over sample radii.
    pub pde_residual: f64,
    /// Boundary residuals of `𝓑_i U - c_i𝕋_iU^{p_i*}` and `𝓑₃U - c₃𝕋₃U^{p₃*}`.
    pub boundary: [f64; 2],
    pub constants: ExplicitConstants,
}

/// Check the radial bubble `(2ε/(ε² + r²))^{(n-3)/2}` against the geometric equation and its
/// boundary conditions on the unit sphere.
pub fn explicit_solution_check(eps: f64, n: usize, i: usize) -> Result<ExplicitCheck> {
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive"));
    }
    if i != 1 && i != 2 {
        return Err(Error::Domain("boundary index must be 1 or 2"));
    }
    let params = OdeParams::new(n, Normalization::Geometric)?;
    let dim = params.dim;
    let source = params.source_coefficient();

    let mut pde: f64 = 0.0;
    for k in 1..=20 {
        let r = k as f64 / 20.0;
        let d = radial_bubble_derivatives(dim, eps, r);
        let lhs = radial_bilaplacian(dim, r, &d);
        let rhs = source * math::pow(d[0], params.p_star);
        pde = pde.max(math::abs(lhs - rhs) / (1.0 + math::abs(rhs)));
    }

    let d = radial_bubble_derivatives(dim, eps, 1.0);
    let trace = BallTrace {
        u: d[0],
        u_r: d[1],
        u_rr: d[2],
        u_rrr: d[3],
        lap_s: 0.0,
        lap_s_r: 0.0,
    };
    let rhs_unit =
        |k: usize| -> Result<f64> { Ok(t_constant(dim, k) * math::pow(d[0], dim.p_star(k)?)) };
    let ci_measured = trace.apply(i, dim) / rhs_unit(i)?;
    let c3_measured = trace.apply(3, dim) / rhs_unit(3)?;

    let c1 = (eps * eps - 1.0) / (2.0 * eps);
    let c2 = (math::powi(eps, 4) + 1.0) / (4.0 * eps * eps);
    let c3 = 1.5 * c1 + c1 * c1 * c1;
    let ci = if i == 1 { c1 } else { c2 };
    let constraint_residual = if i == 1 {
        math::abs(c3_measured - (1.5 * ci_measured + math::powi(ci_measured, 3)))
    } else {
        math::abs(
            c3_measured * c3_measured - (ci_measured - 0.5) * math::powi(1.0 + ci_measured, 2),
        )
    };
    let boundary = [
        math::abs(trace.apply(i, dim) - ci * rhs_unit(i)?),
        math::abs(trace.apply(3, dim) - c3 * rhs_unit(3)?),
    ];
    Ok(ExplicitCheck {
        pde_residual: pde,
        boundary,
        constants: ExplicitConstants {
            ci,
            c3,
            ci_measured,
            c3_measured,
            constraint_residual,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    /// Admissible trajectories stay below this on `[0, T]`.
    pub ceiling: f64,
    /// Bisection stops once a bracket is narrower than this.
    pub resolution: f64,
    pub integrator: IntegratorConfig,
}

impl ScanConfig {
    /// Ceiling of ten times the reference maximum.
    pub fn for_reference(reference_max: f64) -> Self {
        ScanConfig {
            ceiling: 10.0 * reference_max,
            resolution: 1e-13,
            integrator: IntegratorConfig {
                rtol: 1e-12,
                atol: 1e-12,
                ..IntegratorConfig::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `V` reached zero.
    Below,
    Admissible,
    /// `V` exceeded the ceiling.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSample {
    pub free: f64,
    pub termination: Termination,
    pub exit_time: f64,
}

/// An interval of the free datum with admissible trajectories at its interior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// Whether an admissible trajectory was actually found inside; otherwise the
    /// interval is a bracket narrower than the scan resolution.
    pub witnessed: bool,
}

impl AdmissibleInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub t_end: f64,
    pub samples: Vec<ScanSample>,
    pub intervals: Vec<AdmissibleInterval>,
}

impl ScanReport {
    pub fn total_width(&self) -> f64 {
        self.intervals.iter().map(|i| i.width()).sum()
    }
}

fn classify(
    params: &OdeParams,
    bc: &OdeBoundary,
    free: f64,
    t_end: f64,
    cfg: &ScanConfig,
) -> Result<ScanSample> {
    let icfg = IntegratorConfig {
        bound: cfg.ceiling,
        ..cfg.integrator
    };
    let init = bc.initial_state(params, free);
    let sample = match integrate_ode(params, init, t_end, &icfg) {
        Ok(tr) => ScanSample {
            free,
            termination: tr.termination,
            exit_time: tr.exit_time,
        },
        // a step-size collapse happens only on the way to blowup
        Err(Error::Stiffness { t }) => ScanSample {
            free,
            termination: Termination::Blowup,
            exit_time: t,
        },
        Err(e) => return Err(e),
    };
    Ok(sample)
}

fn outcome(s: &ScanSample) -> Outcome {
    match s.termination {
        Termination::ReachedT => Outcome::Admissible,
        Termination::SignChange => Outcome::Below,
        Termination::Blowup => Outcome::Above,
    }
}

/// Bisect `[a, b]` for the switch from `pred(a)` to `!pred(b)`; returns the final bracket.
fn bisect<P: FnMut(f64) -> Result<bool>>(
    mut a: f64,
    mut b: f64,
    resolution: f64,
    mut pred: P,
) -> Result<(f64, f64)> {
    while b - a > resolution {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if pred(m)? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a, b))
}

/// Sweep the free initial datum over `range` and report admissible intervals.
///
/// The grid is coarse; every change of outcome between neighbours is refined by
/// bisection, so intervals narrower than the grid spacing are still found.
pub fn uniqueness_scan(
    params: &OdeParams,
    bc: &OdeBoundary,
    range: (f64, f64),
    t_end: f64,
    grid: usize,
    cfg: &ScanConfig,
) -> Result<ScanReport> {
    if grid < 2 || !(range.1 > range.0) {
        return Err(Error::Domain(
            "scan needs a nondegenerate range and at least two grid points",
        ));
    }
    let mut samples = Vec::with_capacity(grid);
    for k in 0..grid {
        let free = range.0 + (range.1 - range.0) * k as f64 / (grid - 1) as f64;
        samples.push(classify(params, bc, free, t_end, cfg)?);
    }
    let run = |x: f64| classify(params, bc, x, t_end, cfg).map(|s| outcome(&s));

    let mut intervals = Vec::new();
    let mut k = 0;
    while k < grid {
        let o = outcome(&samples[k]);
        if o == Outcome::Admissible {
            let start = k;
            while k + 1 < grid && outcome(&samples[k + 1]) == Outcome::Admissible {
                k += 1;
            }
            let lo = if start == 0 {
                samples[0].free
            } else {
                bisect(
                    samples[start - 1].free,
                    samples[start].free,
                    cfg.resolution,
                    |x| Ok(run(x)? != Outcome::Admissible),
                )?
                .1
            };
            let hi = if k + 1 == grid {
                samples[k].free
            } else {
                bisect(samples[k].free, samples[k + 1].free, cfg.resolution, |x| {
                    Ok(run(x)? == Outcome::Admissible)
                })?
                .0
            };
            intervals.push(AdmissibleInterval {
                lo,
                hi,
                witnessed: true,
            });
        } else if k + 1 < grid
            && outcome(&samples[k + 1]) != Outcome::Admissible
            && outcome(&samples[k + 1]) != o
        {
            // outcome flips without an admissible grid point in between
            let below_first = o == Outcome::Below;
            let mut a = samples[k].free;
            let mut b = samples[k + 1].free;
            let mut found = None;
            while b - a > cfg.resolution {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                match run(m)? {
                    Outcome::Admissible => {
                        found = Some(m);
                        break;
                    }
                    Outcome::Below => {
                        if below_first {
                            a = m
                        } else {
                            b = m
                        }
                    }
                    Outcome::Above => {
                        if below_first {
                            b = m
                        } else {
                            a = m
                        }
                    }
                }
            }
            match found {
                Some(m) => {
                    let lo =
                        bisect(a, m, cfg.resolution, |x| Ok(run(x)? != Outcome::Admissible))?.1;
                    let hi =
                        bisect(m, b, cfg.resolution, |x| Ok(run(x)? == Outcome::Admissible))?.0;
                    intervals.push(AdmissibleInterval {
                        lo,
                        hi,
                        witnessed: true,
                    });
                }
                None => intervals.push(AdmissibleInterval {
                    lo: a,
                    hi: b,
                    witnessed: false,
                }),
            }
        }
        k += 1;
    }
    Ok(ScanReport {
        t_end,
        samples,
        intervals,
    })
}

/// Boundary data and true free datum of the unit-normalized bubble with parameter `ε`.
pub fn bubble_boundary(params: &OdeParams, i: usize, eps: f64) -> Result<(OdeBoundary, f64)> {
    let y = bubble_state(params.dim, eps, unit_bubble_scale(params), 0.0);
    let bc = OdeBoundary::of_state(params, i, &y)?;
    Ok((bc, bc.free_datum(&y)))
}

/// Amplitude of the bubble profile under the chosen normalization.
pub fn unit_bubble_scale(params: &OdeParams) -> f64 {
    match params.normalization {
        Normalization::Unit => params.scaling_to_unit(),
        Normalization::Geometric => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn constructor_identities() {
        for n in 4..12 {
            let p = OdeParams::new(n, Normalization::Unit).unwrap();
            let v = p.fixed_point();
            assert!((p.zeroth * v - math::pow(v, p.p_star)).abs() < 1e-12 * v);
        }
        assert!(OdeParams::new(3, Normalization::Unit).is_err());
    }

    #[test]
    fn transform_round_trip() {
        let dim = Dimension::new(5).unwrap();
        assert!((cylinder_transform_profile(|_| 1.0, dim, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let u = |r: f64| 1.0 / (1.0 + r * r);
        let v = |t: f64| cylinder_transform_profile(u, dim, t);
        assert!((inverse_cylinder_transform(v, dim, 0.3) - u(0.3)).abs() < 1e-14);
        for eps in [0.5, 1.0, 2.0] {
            let ub = |r: f64| math::pow(2.0 * eps / (eps * eps + r * r), 1.0);
            for t in [0.0, 0.7, 3.0] {
                let got = cylinder_transform_profile(ub, dim, t);
                assert!((got - sech_bubble(dim, eps, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fixed_point_and_zero_stay_put() {
        let p = OdeParams::new(5, Normalization::Unit).unwrap();
        let v = p.fixed_point();
        let tr = integrate_ode(&p, [v, 0.0, 0.0, 0.0], 50.0, &cfg()).unwrap();
        assert_eq!(tr.termination, Termination::ReachedT);
        for s in &tr.states {
            assert!((s[0] - v).abs() < 1e-9 && s[1].abs() < 1e-9);
        }
        let z = integrate_ode(&p, [0.0; 4], 5.0, &cfg()).unwrap();
        assert_eq!(z.termination, Termination::ReachedT);
        assert!(z.states.iter().all(|s| *s == [0.0; 4]));
    }

    #[test]
    fn bubble_trajectory_matches_sech() {
        // perturbations grow like e^{(n+1)t/2}, hence the tighter tolerance
        let tight = IntegratorConfig {
            rtol: 1e-12,
            atol: 1e-12,
            ..cfg()
        };
        for n in [4, 5] {
            let p = OdeParams::new(n, Normalization::Unit).unwrap();
            let k = p.scaling_to_unit();
            let stops: Vec<f64> = (1..=50).map(|j| j as f64 * 0.1).collect();
            let tr =
                integrate_ode_with_stops(&p, bubble_state(p.dim, 1.0, k, 0.0), 5.0, &stops, &tight)
                    .unwrap();
            for t in &stops {
                let got = tr.at(*t).unwrap()[0];
                assert!(
                    (got - k * sech_bubble(p.dim, 1.0, *t)).abs() < 1e-6,
                    "n={n} t={t}"
                );
            }
        }
    }

    #[test]
    fn explicit_constants() {
        let c = explicit_solution_check(2.0, 5, 1).unwrap();
        assert!((c.constants.ci_measured - 0.75).abs() < 1e-12);
        assert!(c.constants.constraint_residual < 1e-8);
        assert!(c.boundary[0] < 1e-10 && c.boundary[1] < 1e-10);
        assert!(c.pde_residual < 1e-10);
        let c = explicit_solution_check(1.0, 6, 2).unwrap();
        assert!((c.constants.ci - 0.5).abs() < 1e-15);
        assert!(c.constants.c3_measured.abs() < 1e-10);
        let c = explicit_solution_check(0.7, 4, 2).unwrap();
        assert!(c.constants.constraint_residual < 1e-8);
    }

    #[test]
    fn scan_collapses() {
        let p = OdeParams::new(5, Normalization::Unit).unwrap();
        let (bc, truth) = bubble_boundary(&p, 1, 1.0).unwrap();
        let scfg = ScanConfig::for_reference(p.scaling_to_unit());
        let mut last = f64::INFINITY;
        for t in [3.0, 5.0, 8.0] {
            let rep = uniqueness_scan(&p, &bc, (truth - 0.5, truth + 0.5), t, 41, &scfg).unwrap();
            assert_eq!(rep.intervals.len(), 1, "T={t}: {:?}", rep.intervals);
            let iv = rep.intervals[0];
            assert!(iv.contains(truth, 1e-9), "T={t}: {iv:?} vs {truth}");
            assert!(iv.width() < last);
            last = iv.width();
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn cascade_and_scaling_agree() {
        let geo = OdeParams::new(5, Normalization::Geometric).unwrap();
        let unit = OdeParams::new(5, Normalization::Unit).unwrap();
        let stops: Vec<f64> = (1..=20).map(|j| j as f64 * 0.1).collect();
        let init = bubble_state(geo.dim, 1.3, 1.0, 0.0);
        let a = integrate_ode_with_stops(&geo, init, 2.0, &stops, &cfg()).unwrap();
        let b = integrate_cascade(&geo, init, 2.0, &stops, &cfg()).unwrap();
        assert!(max_value_gap(&a, &b, &stops).unwrap() < 1e-7);
        let k = unit.scaling_to_unit();
        let c = integrate_ode_with_stops(&unit, init.map(|v| k * v), 2.0, &stops, &cfg()).unwrap();
        for t in &stops {
            assert!((k * a.at(*t).unwrap()[0] - c.at(*t).unwrap()[0]).abs() < 1e-7);
        }
    }

    #[test]
    fn perturbed_datum_fails_and_constant_data_scan() {
        let p = OdeParams::new(5, Normalization::Unit).unwrap();
        let (bc, truth) = bubble_boundary(&p, 1, 1.0).unwrap();
        let scfg = ScanConfig::for_reference(p.scaling_to_unit());
        let s = classify(&p, &bc, truth + 0.1, 8.0, &scfg).unwrap();
        assert_ne!(s.termination, Termination::ReachedT);
        assert!(s.exit_time < 8.0);

        let v = p.fixed_point();
        let bc = OdeBoundary::of_state(&p, 1, &[v, 0.0, 0.0, 0.0]).unwrap();
        let rep =
            uniqueness_scan(&p, &bc, (-0.5, 0.5), 5.0, 21, &ScanConfig::for_reference(v)).unwrap();
        assert_eq!(rep.intervals.len(), 1);
        assert!(rep.intervals[0].contains(0.0, 1e-9), "{:?}", rep.intervals);
    }

    #[test]
    fn scan_for_the_second_boundary_pair() {
        let p = OdeParams::new(5, Normalization::Unit).unwrap();
        let (bc, truth) = bubble_boundary(&p, 2, 1.5).unwrap();
        let scfg = ScanConfig::for_reference(p.scaling_to_unit());
        let rep = uniqueness_scan(&p, &bc, (truth - 0.5, truth + 0.5), 6.0, 41, &scfg).unwrap();
        assert_eq!(
            rep.intervals.len(),
            1,
            "{:?} {truth} {:?}",
            rep.intervals,
            rep.samples
        );
        assert!(
            rep.intervals[0].contains(truth, 1e-9),
            "{:?} vs {truth}",
            rep.intervals
        );
    }

    #[test]
    fn bubble_state_derivatives() {
        let dim = Dimension::new(6).unwrap();
        let h = 1e-4;
        for t in [0.0, 0.4, 1.7] {
            let y = bubble_state(dim, 1.5, 1.0, t);
            let yp = bubble_state(dim, 1.5, 1.0, t + h);
            let ym = bubble_state(dim, 1.5, 1.0, t - h);
            for c in 0..3 {
                assert!(((yp[c] - ym[c]) / (2.0 * h) - y[c + 1]).abs() < 1e-7);
            }
        }
    }
}
