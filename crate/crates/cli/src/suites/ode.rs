use biharmonic_core::ode::{
    bubble_boundary, bubble_state, explicit_solution_check, integrate_cascade, integrate_ode,
    integrate_ode_with_stops, max_value_gap, sech_bubble, uniqueness_scan, IntegratorConfig,
    Normalization, OdeParams, ScanConfig, Termination,
};

use super::{guard, Ctx};
use crate::report::Check;

const FIXED: &str = "constant solution of the cylinder equation";
const SECH: &str = "bubble on the cylinder as a hyperbolic secant power";
const SCAN: &str = "uniqueness of the admissible shooting datum";
const EXPLICIT: &str = "constants of the explicit radial solutions";
const CASCADE: &str = "factored form of the cylinder operator";

fn tight() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-12,
        ..Default::default()
    }
}

pub fn ode(ctx: &Ctx) -> Vec<Check> {
    let mut out = Vec::new();
    let dims = ctx.dims(&[5]);
    for &n in &dims {
        let id = format!("ode/n{n}/fixed_point");
        guard(&mut out, id.clone(), FIXED, || {
            let p = OdeParams::new(n, Normalization::Unit)?;
            let v = p.fixed_point();
            let tr = integrate_ode(&p, [v, 0.0, 0.0, 0.0], 50.0, &IntegratorConfig::default())?;
            let drift = tr
                .states
                .iter()
                .fold(0.0f64, |m, s| m.max((s[0] - v).abs()).max(s[1].abs()));
            let ok = tr.termination == Termination::ReachedT && drift <= 1e-9;
            Ok(Check::judged(id, FIXED, drift, 1e-9, ok))
        });

        let id = format!("ode/n{n}/sech");
        guard(&mut out, id.clone(), SECH, || {
            let p = OdeParams::new(n, Normalization::Unit)?;
            let k = p.scaling_to_unit();
            let stops: Vec<f64> = (1..=50).map(|j| j as f64 * 0.1).collect();
            let tr = integrate_ode_with_stops(
                &p,
                bubble_state(p.dim, 1.0, k, 0.0),
                5.0,
                &stops,
                &tight(),
            )?;
            let mut worst = 0.0f64;
            for t in &stops {
                let got = tr.at(*t).map(|s| s[0]).unwrap_or(f64::NAN);
                worst = worst.max((got - k * sech_bubble(p.dim, 1.0, *t)).abs());
            }
            Ok(Check::at_most(id, SECH, worst, 1e-6))
        });

        let p = match OdeParams::new(n, Normalization::Unit) {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::failed(format!("ode/n{n}/scan"), SCAN, e));
                continue;
            }
        };
        let scfg = ScanConfig::for_reference(p.scaling_to_unit());
        let mut last = f64::INFINITY;
        for t_end in [3.0, 5.0, 8.0] {
            let id = format!("ode/n{n}/scan/T{t_end}");
            guard(&mut out, id.clone(), SCAN, || {
                let (bc, truth) = bubble_boundary(&p, 1, 1.0)?;
                let rep = uniqueness_scan(&p, &bc, (truth - 0.5, truth + 0.5), t_end, 41, &scfg)?;
                let single = rep.intervals.len() == 1 && rep.intervals[0].contains(truth, 1e-9);
                let width = rep.total_width();
                let shrinking = width < last;
                last = width;
                let tol = if t_end == 8.0 { 1e-3 } else { 1.0 };
                let c = Check::judged(id, SCAN, width, tol, single && shrinking && width <= tol);
                Ok(if single {
                    c
                } else {
                    c.with_note(format!(
                        "{} intervals, truth not isolated",
                        rep.intervals.len()
                    ))
                })
            });
        }
        let id = format!("ode/n{n}/scan/perturbed_exit");
        guard(&mut out, id.clone(), SCAN, || {
            let (bc, truth) = bubble_boundary(&p, 1, 1.0)?;
            let cfg = IntegratorConfig {
                bound: scfg.ceiling,
                ..scfg.integrator
            };
            let exit = match integrate_ode(&p, bc.initial_state(&p, truth + 0.1), 8.0, &cfg) {
                Ok(tr) if tr.termination != Termination::ReachedT => tr.exit_time,
                Ok(_) => f64::INFINITY,
                Err(biharmonic_core::Error::Stiffness { t }) => t,
                Err(e) => return Err(e),
            };
            // Value is the exit time, which must come before the horizon.
            Ok(Check::judged(id, SCAN, exit, 8.0, exit < 8.0))
        });

        let id = format!("ode/n{n}/cascade");
        guard(&mut out, id.clone(), CASCADE, || {
            let geo = OdeParams::new(n, Normalization::Geometric)?;
            let stops: Vec<f64> = (1..=20).map(|j| j as f64 * 0.1).collect();
            let init = bubble_state(geo.dim, 1.3, 1.0, 0.0);
            let a = integrate_ode_with_stops(&geo, init, 2.0, &stops, &tight())?;
            let b = integrate_cascade(&geo, init, 2.0, &stops, &tight())?;
            let gap = max_value_gap(&a, &b, &stops).unwrap_or(f64::NAN);
            let k = p.scaling_to_unit();
            let c = integrate_ode_with_stops(&p, init.map(|v| k * v), 2.0, &stops, &tight())?;
            let mut scaled = 0.0f64;
            for t in &stops {
                let (x, y) = (a.at(*t).map(|s| s[0]), c.at(*t).map(|s| s[0]));
                scaled = scaled.max(match (x, y) {
                    (Some(x), Some(y)) => (k * x - y).abs(),
                    _ => f64::NAN,
                });
            }
            Ok(Check::at_most(id, CASCADE, gap.max(scaled), 1e-7))
        });

        for eps in [0.5, 1.0, 2.0] {
            for i in [1, 2] {
                let id = format!("ode/n{n}/explicit/eps{eps}/i{i}");
                guard(&mut out, id.clone(), EXPLICIT, || {
                    let c = explicit_solution_check(eps, n, i)?;
                    let k = &c.constants;
                    let worst = (k.ci_measured - k.ci)
                        .abs()
                        .max((k.c3_measured - k.c3).abs())
                        .max(k.constraint_residual)
                        .max(c.pde_residual);
                    Ok(Check::at_most(id, EXPLICIT, worst, 1e-8))
                });
            }
        }
    }
    out
}
