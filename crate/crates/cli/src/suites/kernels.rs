use biharmonic_core::field::FnField;
use biharmonic_core::kernels::{
    critical_self_relation, kernel_mass, kernel_operator_relation, poisson_kernel, KernelSpec,
};
use biharmonic_core::operators::biharmonic_residual;
use biharmonic_core::{Dimension, Model};

use super::{guard, half_point, Ctx};
use crate::report::Check;

const RELATIONS: &str = "kernel and fundamental solution relations";
const SELF_RELATIONS: &str = "critical kernel self relations";
const BIHARMONIC: &str = "biharmonicity of the Poisson kernels";
const MASS: &str = "unit mass of the first Poisson kernel";

pub fn relations(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("relations");
    let mut out = Vec::new();
    for n in ctx.dims(&[3, 4, 5, 7]) {
        let pts: Vec<(Vec<f64>, Vec<f64>)> = (0..1000)
            .map(|_| {
                (
                    half_point(&mut rng, n, 2.0, 0.05, 3.0),
                    super::cube(&mut rng, n, 2.0),
                )
            })
            .collect();
        for k in 0..4 {
            guard(&mut out, format!("relations/n{n}/k{k}"), RELATIONS, || {
                let dim = Dimension::new(n)?;
                let mut worst = 0.0f64;
                for (x, y) in &pts {
                    worst = worst.max(kernel_operator_relation(k, dim, x, y)?.residual);
                }
                Ok(Check::at_most(
                    format!("relations/n{n}/k{k}"),
                    RELATIONS,
                    worst,
                    1e-12,
                ))
            });
        }
        if n == 3 {
            for k in 1..4 {
                let id = format!("relations/n3/self{k}");
                guard(&mut out, id.clone(), SELF_RELATIONS, || {
                    let dim = Dimension::new(3)?;
                    let mut worst = 0.0f64;
                    for (x, y) in &pts {
                        let s: f64 = x[..3].iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                        worst = worst.max(critical_self_relation(k, dim, x[3], s)?.residual);
                    }
                    Ok(Check::at_most(id, SELF_RELATIONS, worst, 1e-12))
                });
            }
        }
    }
    out
}

pub fn biharmonicity(ctx: &Ctx) -> Vec<Check> {
    let mut rng = ctx.rng("biharmonicity");
    let mut out = Vec::new();
    let s = ctx.stencil();
    for n in ctx.dims(&[4, 5]) {
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|_| half_point(&mut rng, n, 1.0, 0.3, 2.0))
            .collect();
        for k in 0..4 {
            let id = format!("biharmonicity/n{n}/k{k}");
            // Value is the worst |Δ²P_k| relative to its own stencil tolerance.
            guard(&mut out, id.clone(), BIHARMONIC, || {
                let spec = KernelSpec::new(k, Model::HalfSpace, Dimension::new(n)?)?;
                let origin = vec![0.0; n + 1];
                let field = FnField::new(n + 1, |p: &[f64]| {
                    poisson_kernel(spec, p, &origin).unwrap_or(f64::NAN)
                });
                let mut worst = 0.0f64;
                for p in &pts {
                    let m = biharmonic_residual(&field, p, s)?;
                    worst = worst.max(m.value.abs() / m.tolerance.max(f64::MIN_POSITIVE));
                }
                Ok(Check::at_most(id, BIHARMONIC, worst, 1.0))
            });
        }
    }
    out
}

pub fn mass(ctx: &Ctx) -> Vec<Check> {
    let mut out = Vec::new();
    for n in ctx.dims(&[4, 7]) {
        for t in [0.01, 1.0, 10.0] {
            let id = format!("mass/n{n}/t{t}");
            guard(&mut out, id.clone(), MASS, || {
                let m = kernel_mass(Dimension::new(n)?, t)?;
                Ok(Check::at_most(id, MASS, (m - 1.0).abs(), 1e-8))
            });
        }
    }
    out
}
