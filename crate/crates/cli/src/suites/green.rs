use biharmonic_core::geometry::pole_distance;
use biharmonic_core::green::{
    boundary_defect, conformal_correspondence_check, green_value, is_ordered, ordering_check,
    regular_part_bilaplacian, regular_part_residual, GreenSpec, OperatorPair,
};
use biharmonic_core::kernels::fundamental_radial;
use biharmonic_core::{Dimension, Model, Result};
use rand_chacha::ChaCha8Rng;

use super::{ball_point, guard, half_point, sphere_point, Ctx};
use crate::report::Check;

const VANISHING: &str = "Green function boundary conditions";
const EQUALITY: &str = "Green function boundary equalities";
const REGULAR: &str = "biharmonicity of the regular part";
const SYMMETRY: &str = "Green function symmetry";
const ORDERING: &str = "ordering of the Green functions";
const CONFORMAL: &str = "conformal correspondence of the Green functions";

fn model_name(m: Model) -> &'static str {
    match m {
        Model::HalfSpace => "half",
        Model::Ball => "ball",
    }
}

fn interior(rng: &mut ChaCha8Rng, model: Model, n: usize) -> Vec<f64> {
    match model {
        Model::HalfSpace => half_point(rng, n, 2.0, 0.05, 2.0),
        Model::Ball => ball_point(rng, n + 1, 0.95),
    }
}

fn boundary(rng: &mut ChaCha8Rng, model: Model, n: usize) -> Vec<f64> {
    match model {
        Model::HalfSpace => {
            let mut p = super::cube(rng, n, 2.0);
            p.push(0.0);
            p
        }
        Model::Ball => sphere_point(rng, n + 1),
    }
}

/// Worst of `|G01|, |G02|` against `Γ` and of `|G13 - 2Γ|, |G23 - 2Γ|` against `2Γ` on the
/// half-space boundary.
fn boundary_equalities(dim: Dimension, pts: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in pts {
        let g = ordering_check(Model::HalfSpace, dim, x, y)?;
        let d: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let gam = fundamental_radial(dim, d, 0.0);
        worst = worst.max(g[0].abs() / gam).max(g[1].abs() / gam);
        worst = worst
            .max((g[2] - 2.0 * gam).abs() / (2.0 * gam))
            .max((g[3] - 2.0 * gam).abs() / (2.0 * gam));
    }
    Ok(worst)
}

pub fn green(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("green");
    let mut out = Vec::new();
    for n in ctx.dims(&[4, 5, 7]) {
        let Ok(dim) = Dimension::new(n) else {
            out.push(Check::failed(
                format!("green/n{n}"),
                VANISHING,
                "invalid dimension",
            ));
            continue;
        };
        for model in [Model::HalfSpace, Model::Ball] {
            let m = model_name(model);
            let pts: Vec<(Vec<f64>, Vec<f64>)> = (0..200)
                .map(|_| (boundary(&mut rng, model, n), interior(&mut rng, model, n)))
                .collect();
            for pair in OperatorPair::all() {
                let spec = GreenSpec::new(pair, model, dim);
                let (i, j) = (pair.i(), pair.j());
                let id = format!("green/n{n}/{m}/bc{i}{j}");
                guard(&mut out, id.clone(), VANISHING, || {
                    let (di, dj) = boundary_defect(&spec);
                    if di != 0.0 || dj != 0.0 {
                        return Ok(Check::info(id, VANISHING, di.abs().max(dj.abs()))
                            .with_note("closed form attains a constant boundary value"));
                    }
                    let mut worst = 0.0f64;
                    for (x, y) in &pts {
                        let (a, b) = regular_part_residual(&spec, y, x)?;
                        worst = worst.max(a).max(b);
                    }
                    // Third-order operators on exact jets still cancel in floating point.
                    Ok(Check::at_most(id, VANISHING, worst, 1e-9))
                });
            }
            if model == Model::HalfSpace {
                let id = format!("green/n{n}/half/equalities");
                guard(&mut out, id.clone(), EQUALITY, || {
                    Ok(Check::at_most(
                        id,
                        EQUALITY,
                        boundary_equalities(dim, &pts)?,
                        1e-13,
                    ))
                });
            }

            let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..10_000)
                .map(|_| (interior(&mut rng, model, n), interior(&mut rng, model, n)))
                .collect();
            let id = format!("green/n{n}/{m}/symmetry");
            guard(&mut out, id.clone(), SYMMETRY, || {
                let mut worst = 0.0f64;
                for pair in OperatorPair::all() {
                    let spec = GreenSpec::new(pair, model, dim);
                    for (p, q) in pairs.iter().take(1000) {
                        let (a, b) = (green_value(&spec, p, q)?, green_value(&spec, q, p)?);
                        let scale = a.abs().max(b.abs());
                        if scale > 0.0 {
                            worst = worst.max((a - b).abs() / scale);
                        }
                    }
                }
                Ok(Check::at_most(id, SYMMETRY, worst, 1e-13))
            });
            // Value is the number of pairs violating the strict chain.
            let id = format!("green/n{n}/{m}/ordering");
            guard(&mut out, id.clone(), ORDERING, || {
                let mut bad = 0usize;
                for (p, q) in &pairs {
                    if !is_ordered(&ordering_check(model, dim, p, q)?, 0.0, true) {
                        bad += 1;
                    }
                }
                Ok(Check::at_most(id, ORDERING, bad as f64, 0.0))
            });
            // Stencils reach a few steps out, so keep clear of the reflected singularity.
            let deep: Vec<(Vec<f64>, Vec<f64>)> = (0..5)
                .map(|_| match model {
                    Model::HalfSpace => (
                        half_point(&mut rng, n, 1.0, 0.5, 2.0),
                        half_point(&mut rng, n, 1.0, 0.5, 2.0),
                    ),
                    Model::Ball => (
                        ball_point(&mut rng, n + 1, 0.6),
                        ball_point(&mut rng, n + 1, 0.6),
                    ),
                })
                .collect();
            let id = format!("green/n{n}/{m}/regular");
            guard(&mut out, id.clone(), REGULAR, || {
                let mut worst = 0.0f64;
                for pair in OperatorPair::all() {
                    let spec = GreenSpec::new(pair, model, dim);
                    for (p, q) in &deep {
                        let r = regular_part_bilaplacian(&spec, q, p, ctx.stencil())?;
                        worst = worst.max(r.value.abs() / r.tolerance.max(f64::MIN_POSITIVE));
                    }
                }
                Ok(Check::at_most(id, REGULAR, worst, 1.0))
            });
        }
        let id = format!("green/n{n}/conformal");
        guard(&mut out, id.clone(), CONFORMAL, || {
            let mut worst = 0.0f64;
            let mut taken = 0;
            while taken < 1000 {
                let (xi, eta) = (
                    ball_point(&mut rng, n + 1, 0.95),
                    ball_point(&mut rng, n + 1, 0.95),
                );
                if pole_distance(&xi) < 0.1 || pole_distance(&eta) < 0.1 {
                    continue;
                }
                taken += 1;
                for pair in OperatorPair::all() {
                    if dim.is_critical() && pair.j() == 3 {
                        continue;
                    }
                    worst = worst.max(conformal_correspondence_check(pair, &xi, &eta, dim)?);
                }
            }
            Ok(Check::at_most(id, CONFORMAL, worst, 1e-11))
        });
    }
    out
}
