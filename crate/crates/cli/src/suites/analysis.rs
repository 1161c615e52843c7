use biharmonic_core::bvp::{
    boundary_limit_check, comparison_check, default_heights, derivative_limit, gjms_trace_check,
    solve_and_roundtrip, Problem, ZonalPolynomial,
};
use biharmonic_core::data::{BallSource, BoundaryData, Profile, SphereData};
use biharmonic_core::green::OperatorPair;
use biharmonic_core::Dimension;
use rand::Rng;

use super::{ball_point, cube, guard, sphere_point, uniform, Ctx};
use crate::report::Check;

const LIMITS: &str = "boundary limits of the Poisson integrals";
const DERIVATIVE: &str = "normal derivative limit of the singular integral";
const ROUNDTRIP: &str = "Poisson and Green integral representation";
const COMPARISON: &str = "comparison principle";
const GJMS: &str = "GJMS operators as Dirichlet-to-Neumann traces";

pub fn boundary(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("boundary");
    let mut out = Vec::new();
    let ts = default_heights();
    for n in ctx.dims(&[4, 5]) {
        let mut c = cube(&mut rng, n, 0.2);
        let fi = BoundaryData::radial(1.0, &c, Profile::Bump { radius: 1.5 });
        c = cube(&mut rng, n, 0.2);
        let fj = BoundaryData::radial(0.5, &c, Profile::Gaussian { width: 0.8 });
        let x = cube(&mut rng, n, 0.4);
        for pair in OperatorPair::all() {
            let (i, j) = (pair.i(), pair.j());
            let base = format!("boundary/n{n}/p{i}{j}");
            let r = Dimension::new(n).and_then(|dim| {
                boundary_limit_check(&Problem::new(pair, dim), &fi, &fj, &x, &ts, ctx.q())
            });
            match r {
                Ok(r) => {
                    out.push(Check::at_most(
                        format!("{base}/own{i}"),
                        LIMITS,
                        (r.own[0] - r.data[0]).abs(),
                        1e-4,
                    ));
                    out.push(Check::at_most(
                        format!("{base}/own{j}"),
                        LIMITS,
                        (r.own[1] - r.data[1]).abs(),
                        1e-4,
                    ));
                    out.push(Check::at_most(
                        format!("{base}/cross{i}"),
                        LIMITS,
                        r.cross[0].abs(),
                        1e-4,
                    ));
                    out.push(Check::at_most(
                        format!("{base}/cross{j}"),
                        LIMITS,
                        r.cross[1].abs(),
                        1e-4,
                    ));
                }
                Err(e) => out.push(Check::failed(base, LIMITS, e)),
            }
        }
        let id = format!("boundary/n{n}/derivative");
        guard(&mut out, id.clone(), DERIVATIVE, || {
            let (v, _) = derivative_limit(3, Dimension::new(n)?, &fi, &x, &ts, ctx.q())?;
            Ok(Check::at_most(id, DERIVATIVE, v.abs(), 1e-4))
        });
    }
    out
}

/// A zonal polynomial of degree at most four with seeded coefficients.
fn manufactured<R: Rng>(rng: &mut R, d: usize) -> biharmonic_core::Result<ZonalPolynomial> {
    let axis = sphere_point(rng, d);
    let terms: Vec<(u32, u32, f64)> = [
        (0, 0),
        (1, 0),
        (2, 0),
        (3, 0),
        (4, 0),
        (0, 1),
        (1, 1),
        (2, 1),
        (0, 2),
    ]
    .iter()
    .map(|&(p, m)| (p, m, uniform(rng, -1.0, 1.0)))
    .collect();
    ZonalPolynomial::new(&axis, &terms)
}

pub fn roundtrip(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("roundtrip");
    let mut out = Vec::new();
    let q = *ctx.q();
    for n in ctx.dims(&[4, 5]) {
        let u = manufactured(&mut rng, n + 1);
        let samples: Vec<Vec<f64>> = (0..2).map(|_| ball_point(&mut rng, n + 1, 0.8)).collect();
        for pair in OperatorPair::all() {
            let (i, j) = (pair.i(), pair.j());
            let base = format!("roundtrip/n{n}/p{i}{j}");
            let res = u.as_ref().map_err(Clone::clone).and_then(|u| {
                let prob = Problem::new(pair, Dimension::new(n)?);
                let coarse = solve_and_roundtrip(&prob, u, &q, &samples)?;
                let fine = solve_and_roundtrip(&prob, u, &q.refined(), &samples)?;
                Ok((coarse.max_error, fine.max_error))
            });
            match res {
                Ok((coarse, fine)) => {
                    out.push(Check::at_most(
                        format!("{base}/base"),
                        ROUNDTRIP,
                        coarse,
                        1e-3,
                    ));
                    // Passes when refinement does not increase the error.
                    out.push(Check::at_most(
                        format!("{base}/refined"),
                        ROUNDTRIP,
                        fine,
                        coarse,
                    ));
                }
                Err(e) => out.push(Check::failed(base, ROUNDTRIP, e)),
            }
        }
    }
    out
}

pub fn comparison(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("comparison");
    let mut out = Vec::new();
    for n in ctx.dims(&[5]) {
        let d = n + 1;
        for set in 0..20 {
            let axis = sphere_point(&mut rng, d);
            let (a, b, c) = (
                uniform(&mut rng, 0.0, 2.0),
                uniform(&mut rng, 0.0, 2.0),
                uniform(&mut rng, 0.0, 2.0),
            );
            let (m, l) = (rng.gen_range(0..4), rng.gen_range(0..4));
            let samples: Vec<Vec<f64>> = (0..1000).map(|_| ball_point(&mut rng, d, 0.98)).collect();
            for (i, j) in [(0, 1), (0, 2)] {
                let id = format!("comparison/n{n}/p{i}{j}/set{set}");
                guard(&mut out, id.clone(), COMPARISON, || {
                    let prob = Problem::new(OperatorPair::new(i, j)?, Dimension::new(n)?);
                    let fi = SphereData::zonal(&axis, move |z| a * (1.0 + z).powi(m))?;
                    let fj = SphereData::zonal(&axis, move |z| -b * (1.0 - z).powi(l))?;
                    let f = BallSource::constant(d, c);
                    let min = comparison_check(&prob, &f, &fi, &fj, &samples, ctx.q())?;
                    // Value is how far the minimum dips below zero.
                    Ok(Check::at_most(id, COMPARISON, (-min).max(0.0), 1e-6))
                });
            }
        }
    }
    out
}

pub fn gjms(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("gjms");
    let mut out = Vec::new();
    for n in ctx.dims(&[5]) {
        let d = n + 1;
        let axis = sphere_point(&mut rng, d);
        let xi = sphere_point(&mut rng, d);
        let data: [(&str, biharmonic_core::Result<SphereData>); 3] = [
            ("constant", Ok(SphereData::constant(d, 1.0))),
            (
                "quadratic",
                SphereData::polynomial(&axis, &[1.0, 0.5, 0.25]),
            ),
            ("exponential", SphereData::zonal(&axis, |z| z.exp())),
        ];
        for (name, f) in data {
            let id = format!("gjms/n{n}/{name}");
            guard(&mut out, id.clone(), GJMS, || {
                let r = gjms_trace_check(Dimension::new(n)?, &f?, &xi, ctx.q())?;
                Ok(Check::at_most(id, GJMS, r.residual, 1e-4))
            });
        }
    }
    out
}
