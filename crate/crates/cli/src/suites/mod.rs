//! Named verification suites. Each returns check records; none of them panics on a
//! numerical failure, which is recorded as a failing check instead.

use biharmonic_core::bvp::QuadratureConfig;
use biharmonic_core::stencil::StencilConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::Check;

mod analysis;
mod classification;
mod extras;
mod green;
mod kernels;
mod ode;

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
}

impl Ctx<'_> {
    /// A generator private to one suite, so suites sample the same points alone or inside `all`.
    pub fn rng(&self, suite: &str) -> ChaCha8Rng {
        let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ tag)
    }

    /// `--n` when given, else the suite's own dimensions.
    pub fn dims(&self, default: &[usize]) -> Vec<usize> {
        match self.cfg.n {
            Some(n) => vec![n],
            None => default.to_vec(),
        }
    }

    pub fn q(&self) -> &QuadratureConfig {
        &self.cfg.quadrature
    }

    pub fn stencil(&self) -> StencilConfig {
        self.cfg.stencil
    }
}

/// Runs a fallible check, turning an error into a failing record.
pub fn guard<F>(out: &mut Vec<Check>, id: String, paper_ref: &str, f: F)
where
    F: FnOnce() -> Result<Check, biharmonic_core::Error>,
{
    match f() {
        Ok(c) => out.push(c),
        Err(e) => out.push(Check::failed(id, paper_ref, e)),
    }
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub fn cube<R: Rng>(rng: &mut R, d: usize, half: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-half..half)).collect()
}

/// Uniform on the unit sphere in `R^d`.
pub fn sphere_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v = cube(rng, d, 1.0);
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Uniform in the ball of radius `radius` in `R^d`.
pub fn ball_point<R: Rng>(rng: &mut R, d: usize, radius: f64) -> Vec<f64> {
    let u = sphere_point(rng, d);
    let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / d as f64);
    u.iter().map(|x| x * r).collect()
}

/// A half-space point `(x, t)` with `x` in a cube and `t` in `[t_lo, t_hi)`.
pub fn half_point<R: Rng>(rng: &mut R, n: usize, half: f64, t_lo: f64, t_hi: f64) -> Vec<f64> {
    let mut p = cube(rng, n, half);
    p.push(rng.gen_range(t_lo..t_hi));
    p
}

type SuiteFn = fn(&Ctx) -> Vec<Check>;

/// Suites in report order, with the acceptance criterion each one covers.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("relations", kernels::relations),
    ("biharmonicity", kernels::biharmonicity),
    ("mass", kernels::mass),
    ("boundary", analysis::boundary),
    ("green", green::green),
    ("roundtrip", analysis::roundtrip),
    ("bubbles", classification::bubbles),
    ("classification", classification::classification),
    ("singular", classification::singular),
    ("comparison", analysis::comparison),
    ("gjms", analysis::gjms),
    ("constants", extras::constants),
    ("ode", ode::ode),
    ("families", classification::families),
];

/// Composite suites.
pub const GROUPS: &[(&str, &[&str])] = &[("kernels", &["relations", "biharmonicity", "mass"])];

pub fn names() -> Vec<&'static str> {
    let mut v: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
    v.extend(GROUPS.iter().map(|(n, _)| *n));
    v.push("all");
    v
}

/// Runs a suite, a group, or `all`; `None` for an unknown name.
pub fn run_suite(name: &str, ctx: &Ctx) -> Option<Vec<Check>> {
    let members: Vec<&str> = if name == "all" {
        SUITES.iter().map(|(n, _)| *n).collect()
    } else if let Some((_, m)) = GROUPS.iter().find(|(n, _)| *n == name) {
        m.to_vec()
    } else if SUITES.iter().any(|(n, _)| *n == name) {
        vec![name]
    } else {
        return None;
    };
    let mut out = Vec::new();
    for m in members {
        let (_, f) = SUITES
            .iter()
            .find(|(n, _)| *n == m)
            .expect("group members are registered suites");
        out.extend(f(ctx));
    }
    Some(out)
}
