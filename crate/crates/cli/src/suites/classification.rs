use biharmonic_core::bvp::{decay_asymptotics_fit, DecayKind, Regime};
use biharmonic_core::classification::{
    bubble_bvp_residual, classification_identity_check, homogeneous_family_check,
    m_profile_decay_fit, matched_bubble_residual, singular_solution_check, BvpResiduals,
    ClassificationCase, HomogeneousFamily, MProfile, SingularSolutionParams,
};
use biharmonic_core::data::{BoundaryData, Profile};
use biharmonic_core::geometry::{pole_distance, BubbleParams};
use biharmonic_core::polynomial::Polynomial;
use biharmonic_core::Dimension;

use super::{ball_point, cube, guard, half_point, sphere_point, uniform, Ctx};
use crate::report::Check;

const BUBBLE: &str = "geometric bubbles solve the critical boundary problems";
const MATCHED: &str = "bubbles on the two models correspond";
const IDENTITY: &str = "classification identities";
const FAR_FIELD: &str = "far-field decay of the classification profiles";
const DECAY: &str = "decay of singular and Poisson-type integrals";
const SINGULAR: &str = "solutions singular at a boundary point";
const FAMILIES: &str = "solutions of the homogeneous problems";

/// Worst residual over its tolerance; the verdict is point by point.
fn residual_check(id: String, paper_ref: &str, r: &BvpResiduals) -> Check {
    let ratio = |max_abs: f64, tol: f64| if max_abs == 0.0 { 0.0 } else { max_abs / tol };
    let worst = ratio(r.interior.max_abs, r.interior.tolerance)
        .max(ratio(r.boundary[0].max_abs, r.boundary[0].tolerance))
        .max(ratio(r.boundary[1].max_abs, r.boundary[1].tolerance));
    Check::judged(id, paper_ref, worst, 1.0, r.within())
}

fn boundary_points(rng: &mut rand_chacha::ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let mut p = cube(rng, n, 2.0);
            p.push(0.0);
            p
        })
        .collect()
}

pub fn bubbles(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("bubbles");
    let mut out = Vec::new();
    for n in ctx.dims(&[4, 5]) {
        let x0 = cube(&mut rng, n, 0.5);
        let eps = uniform(&mut rng, 0.5, 1.5);
        let interior: Vec<Vec<f64>> = (0..20)
            .map(|_| half_point(&mut rng, n, 2.0, 0.2, 2.0))
            .collect();
        let boundary = boundary_points(&mut rng, n, 20);
        for (i, j) in [(1, 3), (1, 2), (2, 3)] {
            let id = format!("bubbles/n{n}/half/p{i}{j}");
            guard(&mut out, id.clone(), BUBBLE, || {
                let params = BubbleParams::half_space(&x0, eps)?;
                Ok(residual_check(
                    id,
                    BUBBLE,
                    &bubble_bvp_residual(i, j, &params, &interior, &boundary, ctx.stencil())?,
                ))
            });
        }
        let ball_in: Vec<Vec<f64>> = (0..20).map(|_| ball_point(&mut rng, n + 1, 0.8)).collect();
        let ball_bd: Vec<Vec<f64>> = (0..20).map(|_| sphere_point(&mut rng, n + 1)).collect();
        for (i, j) in [(1, 3), (1, 2), (2, 3)] {
            let id = format!("bubbles/n{n}/ball0/p{i}{j}");
            guard(&mut out, id.clone(), BUBBLE, || {
                let params = BubbleParams::ball(&vec![0.0; n + 1])?;
                let r = bubble_bvp_residual(i, j, &params, &ball_in, &ball_bd, ctx.stencil())?;
                let worst = r
                    .interior
                    .max_abs
                    .max(r.boundary[0].max_abs)
                    .max(r.boundary[1].max_abs);
                Ok(Check::at_most(id, BUBBLE, worst, 0.0))
            });
        }
        let id = format!("bubbles/n{n}/matched");
        guard(&mut out, id.clone(), MATCHED, || {
            let params = BubbleParams::half_space(&x0, eps)?;
            let mut worst = 0.0f64;
            for p in interior.iter().chain(&boundary) {
                worst = worst.max(matched_bubble_residual(&params, p)?);
            }
            Ok(Check::at_most(id, MATCHED, worst, 1e-12))
        });
    }
    out
}

pub fn classification(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("classification");
    let mut out = Vec::new();
    let q = *ctx.q();
    for n in ctx.dims(&[4, 5]) {
        let x0 = cube(&mut rng, n, 0.5);
        let eps = uniform(&mut rng, 0.5, 1.5);
        let samples: Vec<Vec<f64>> = (0..20)
            .map(|_| half_point(&mut rng, n, 2.0, 0.05, 2.0))
            .collect();
        for which in [MProfile::M1, MProfile::M2, MProfile::M3] {
            let base = format!("classification/n{n}/{which:?}");
            let case = BubbleParams::half_space(&x0, eps)
                .and_then(|p| ClassificationCase::critical(which, p));
            let case = match case {
                Ok(c) => c,
                Err(e) => {
                    out.push(Check::failed(base, IDENTITY, e));
                    continue;
                }
            };
            let coarse = classification_identity_check(&case, &samples, &q);
            let fine = classification_identity_check(&case, &samples, &q.refined());
            match (coarse, fine) {
                (Ok(c), Ok(f)) => {
                    out.push(Check::at_most(
                        format!("{base}/identity"),
                        IDENTITY,
                        c.max_deviation,
                        1e-3,
                    ));
                    // Refinement may only move the deviation within the rounding floor.
                    out.push(Check::at_most(
                        format!("{base}/refined"),
                        IDENTITY,
                        f.max_deviation - c.max_deviation,
                        1e-12,
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    out.push(Check::failed(format!("{base}/identity"), IDENTITY, e))
                }
            }
            let id = format!("{base}/far_slope");
            guard(&mut out, id.clone(), FAR_FIELD, || {
                let (slope, _) = m_profile_decay_fit(&case, &[50.0, 100.0, 200.0, 500.0], &q)?;
                Ok(Check::at_most(
                    id,
                    FAR_FIELD,
                    (slope - (3.0 - n as f64)).abs(),
                    0.1,
                ))
            });
        }
        let radii = [20.0, 40.0, 80.0, 200.0];
        // Poisson-type data decay slower than the kernel tail, so one rate governs both regimes.
        for (kind, param, a, name) in [
            (
                DecayKind::SingularPower,
                1.0,
                n as f64 + 1.0,
                "singular_power",
            ),
            (DecayKind::PoissonType, 3.0, 2.0, "poisson_type"),
        ] {
            for (regime, rname) in [
                (Regime::Normal, "normal"),
                (Regime::Tangential, "tangential"),
            ] {
                let id = format!("classification/n{n}/decay/{name}/{rname}");
                guard(&mut out, id.clone(), DECAY, || {
                    let f = BoundaryData::radial(1.0, &vec![0.0; n], Profile::Rational { a });
                    let r = decay_asymptotics_fit(
                        kind,
                        param,
                        Dimension::new(n)?,
                        &f,
                        &radii,
                        regime,
                        &q,
                    )?;
                    Ok(Check::at_most(
                        id,
                        DECAY,
                        (r.fitted_slope - r.predicted_slope).abs(),
                        0.1,
                    ))
                });
            }
        }
    }
    out
}

pub fn singular(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("singular");
    let mut out = Vec::new();
    let margin = 0.3;
    for n in ctx.dims(&[4, 5]) {
        let d = n + 1;
        let xi0 = ball_point(&mut rng, d, 0.5);
        let mut interior = Vec::new();
        while interior.len() < 10 {
            // The stencil reaches beyond the sample, so interior points keep a wider berth.
            let p = ball_point(&mut rng, d, 0.85);
            if pole_distance(&p) >= 0.5 {
                interior.push(p);
            }
        }
        let mut boundary = Vec::new();
        while boundary.len() < 10 {
            let p = sphere_point(&mut rng, d);
            if pole_distance(&p) >= margin {
                boundary.push(p);
            }
        }
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            for cbar in [0.0, 1.0] {
                let id = format!("singular/n{n}/p{i}{j}/c{cbar}");
                guard(&mut out, id.clone(), SINGULAR, || {
                    let params = SingularSolutionParams::new(i, j, &xi0, cbar)?;
                    let r = singular_solution_check(
                        &params,
                        &interior,
                        &boundary,
                        margin,
                        ctx.stencil(),
                    )?;
                    Ok(residual_check(id, SINGULAR, &r))
                });
            }
        }
    }
    out
}

pub fn families(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("families");
    let mut out = Vec::new();
    for n in ctx.dims(&[5]) {
        let c = uniform(&mut rng, 0.5, 2.0);
        let quad = Polynomial::coordinate(n, 0)
            .pow(2)
            .add(&Polynomial::coordinate(n, 1).scale(c))
            .add(&Polynomial::constant(n, 1.0));
        let phi = BoundaryData::radial(1.0, &cube(&mut rng, n, 0.2), Profile::Bump { radius: 1.0 });
        let fams = [
            ("linear", HomogeneousFamily::Linear(c)),
            ("quadratic", HomogeneousFamily::Quadratic(c)),
            ("cubic", HomogeneousFamily::Cubic(c)),
            ("times_quadratic", HomogeneousFamily::TimesQuadratic(quad)),
            ("phi03", HomogeneousFamily::PhiZeroThree(phi.clone())),
            ("phi12", HomogeneousFamily::PhiOneTwo(phi)),
        ];
        let boundary: Vec<Vec<f64>> = (0..3).map(|_| cube(&mut rng, n, 0.5)).collect();
        let interior: Vec<Vec<f64>> = (0..5)
            .map(|_| half_point(&mut rng, n, 1.0, 0.3, 1.5))
            .collect();
        for (name, fam) in fams {
            let id = format!("families/n{n}/{name}");
            guard(&mut out, id.clone(), FAMILIES, || {
                let r = homogeneous_family_check(
                    &fam,
                    Dimension::new(n)?,
                    &boundary,
                    &interior,
                    ctx.q(),
                )?;
                let worst = r.boundary[0].max(r.boundary[1]).max(r.interior_bilaplacian);
                Ok(Check::judged(
                    id,
                    FAMILIES,
                    worst,
                    r.boundary_tolerance,
                    r.within(),
                ))
            });
        }
    }
    out
}
