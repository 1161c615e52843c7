//! Argument parsing and the single-evaluation commands.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use biharmonic_core::bvp::{
    decay_asymptotics_fit, half_space_poisson, solve_and_roundtrip, DecayKind, Problem, Regime,
    ZonalPolynomial,
};
use biharmonic_core::classification::bubble_bvp_residual;
use biharmonic_core::data::{BoundaryData, Profile};
use biharmonic_core::extras::{
    competitor, radial_integral_simpson, ratio_eval, sharp_constants, Extremal, RatioKind,
    T3Normalization,
};
use biharmonic_core::geometry::BubbleParams;
use biharmonic_core::green::{green_value, GreenSpec, OperatorPair};
use biharmonic_core::kernels::{poisson_kernel, KernelSpec};
use biharmonic_core::ode::{
    bubble_boundary, uniqueness_scan, Normalization, OdeParams, ScanConfig, ScanReport,
};
use biharmonic_core::polynomial::Polynomial;
use biharmonic_core::{Dimension, Model};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{RunConfig, Settings};
use crate::report::{emit_report, Check, Format, Status, SuiteReport};
use crate::suites::{self, Ctx};
use crate::CliError;

// Stdout may be a closed pipe (`| head`); losing output there is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! out_raw {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(
    name = "biharmonic",
    version,
    about = "Biharmonic boundary value problems: evaluations and verification suites"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; they override the config file.
#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// JSON file with default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dimension of the boundary; restricts suites to this one dimension.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Report path. Defaults to `$BIHARMONIC_REPORT_DIR/<name>.<ext>`, else `reports/`.
    #[arg(long = "out", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true)]
    pub sphere_order: Option<usize>,
    #[arg(long, global = true)]
    pub max_intervals: Option<usize>,
    #[arg(long, global = true)]
    pub stencil_h: Option<f64>,
    #[arg(long, global = true)]
    pub stencil_order: Option<usize>,
}

impl GlobalArgs {
    fn settings(&self) -> Settings {
        Settings {
            n: self.n,
            seed: self.seed,
            format: self.format.map(Into::into),
            output: self.output.clone(),
            quad_tol: self.quad_tol,
            sphere_order: self.sphere_order,
            max_intervals: self.max_intervals,
            stencil_h: self.stencil_h,
            stencil_order: self.stencil_order,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Halfspace,
    Ball,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Halfspace => Model::HalfSpace,
            ModelArg::Ball => Model::Ball,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    SingularPower,
    PoissonType,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RegimeArg {
    Normal,
    Tangential,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormalizationArg {
    Unit,
    Geometric,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a Poisson kernel between an interior and a boundary point.
    KernelEval {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        k: usize,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        point: Vec<f64>,
        /// Boundary point; the origin (half-space) or the north pole (ball) by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        boundary: Option<Vec<f64>>,
    },
    /// Evaluate a Green function.
    GreenEval {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        pair: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        p: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        q: Vec<f64>,
    },
    /// Solve a boundary value problem at one point. On the ball the data come from a
    /// manufactured zonal polynomial and the error is checked; on the half-space the
    /// data are a bump and a Gaussian.
    Solve {
        #[arg(long, value_enum, default_value = "ball")]
        model: ModelArg,
        #[arg(long, value_delimiter = ',')]
        pair: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        point: Vec<f64>,
        /// Terms `p:m:c` of `Σ c (a·ξ)^p |ξ|^{2m}` for the ball solution.
        #[arg(long, value_delimiter = ',', default_value = "0:0:1,1:0:0.5,0:1:0.25")]
        terms: Vec<String>,
    },
    /// Run a named verification suite.
    Verify {
        /// Suite name, or `all`.
        suite: String,
    },
    /// Fit the far-field slope of a prototype singular integral.
    DecayFit {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// `α` for the singular power, `β` for the Poisson type.
        #[arg(long)]
        param: f64,
        #[arg(long, value_enum, default_value = "normal")]
        regime: RegimeArg,
        /// Decay exponent of the data `(1 + |y|²)^{-a/2}`; `n + 1` by default.
        #[arg(long)]
        decay: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "20,40,80,200")]
        radii: Vec<f64>,
    },
    /// Residuals of a bubble for a critical boundary pair.
    BubbleCheck {
        #[arg(long, value_enum, default_value = "halfspace")]
        model: ModelArg,
        #[arg(long, value_delimiter = ',')]
        pair: Vec<usize>,
        /// Half-space scale `ε`.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Centre `x₀` (half-space) or `ξ₀` (ball); the origin by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        center: Option<Vec<f64>>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Sharp constants with quadrature error bars.
    Constants,
    /// Shooting scan for the cylinder ODE around a bubble's free datum.
    Ode {
        /// Which boundary operator is prescribed besides the third-order one (1 or 2).
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long = "t-end", default_value_t = 8.0)]
        t_end: f64,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long, default_value_t = 0.5)]
        half_width: f64,
        #[arg(long, value_enum, default_value = "unit")]
        normalization: NormalizationArg,
        /// Also write every scanned datum as CSV.
        #[arg(long)]
        scan_out: Option<PathBuf>,
    },
    /// Geometric ratios of an extremal or a competitor against the sharp constants.
    Inequality {
        /// Centre `a` of the extremal `U_a`; the origin by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<f64>>,
        /// Perturb `U₀` by a harmonic polynomial of this degree (1 or 2) instead.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::KernelEval { .. } => "kernel-eval".into(),
            Command::GreenEval { .. } => "green-eval".into(),
            Command::Solve { .. } => "solve".into(),
            Command::Verify { suite } => suite.clone(),
            Command::DecayFit { .. } => "decay-fit".into(),
            Command::BubbleCheck { .. } => "bubble-check".into(),
            Command::Constants => "constants".into(),
            Command::Ode { .. } => "ode".into(),
            Command::Inequality { .. } => "inequality".into(),
        }
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn core_usage(e: biharmonic_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn pair_of(v: &[usize]) -> Result<OperatorPair, CliError> {
    match v {
        [i, j] => OperatorPair::new(*i, *j).map_err(core_usage),
        _ => Err(usage("--pair takes two indices, e.g. 0,2")),
    }
}

fn dim_from(
    cfg: &RunConfig,
    ambient: Option<usize>,
    default: usize,
) -> Result<Dimension, CliError> {
    let n = match (cfg.n, ambient) {
        (Some(n), Some(d)) if d != n + 1 => {
            return Err(usage(format!(
                "points must have n + 1 = {} coordinates, got {d}",
                n + 1
            )))
        }
        (Some(n), _) => n,
        (None, Some(d)) if d >= 2 => d - 1,
        _ => default,
    };
    Dimension::new(n).map_err(core_usage)
}

/// Parses arguments and runs; `Ok(true)` when every asserted check passed.
pub fn dispatch<I, T>(argv: I) -> Result<bool, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            out_raw!("{e}");
            return Ok(true);
        }
        Err(e) => {
            let text = e.to_string();
            return Err(usage(text.trim_start_matches("error: ").trim_end()));
        }
    };
    let flags = cli.global.settings();
    let settings = match &cli.global.config {
        Some(path) => flags.over(Settings::load(path)?),
        None => flags,
    };
    let cfg = RunConfig::resolve(settings)?;
    let name = cli.command.name();
    let start = Instant::now();
    let checks = execute(&cli.command, &cfg)?;
    let report = SuiteReport::new(&name, cfg.seed, cfg.fingerprint(), checks);
    let path = cfg.report_path(&name);
    emit_report(&report, &path, cfg.format)?;
    print_summary(&report, start.elapsed().as_secs_f64(), &path);
    Ok(report.all_passed())
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    match cmd {
        Command::Verify { suite } => {
            let ctx = Ctx { cfg };
            suites::run_suite(suite, &ctx).ok_or_else(|| {
                usage(format!(
                    "unknown suite `{suite}`; known: {}",
                    suites::names().join(", ")
                ))
            })
        }
        Command::KernelEval {
            model,
            k,
            point,
            boundary,
        } => {
            let dim = dim_from(cfg, Some(point.len()), 4)?;
            let model: Model = (*model).into();
            let q = match boundary {
                Some(b) => b.clone(),
                None => {
                    let mut q = vec![0.0; dim.ambient()];
                    if model == Model::Ball {
                        q[dim.n()] = 1.0;
                    }
                    q
                }
            };
            let spec = KernelSpec::new(*k, model, dim).map_err(core_usage)?;
            let v = poisson_kernel(spec, point, &q).map_err(core_usage)?;
            out!("P{k}(p, q) = {v:.10}");
            Ok(vec![Check::info(
                format!("kernel-eval/P{k}"),
                "biharmonic Poisson kernels",
                v,
            )])
        }
        Command::GreenEval { model, pair, p, q } => {
            let dim = dim_from(cfg, Some(p.len()), 4)?;
            let pair = pair_of(pair)?;
            let spec = GreenSpec::new(pair, (*model).into(), dim);
            let v = green_value(&spec, p, q).map_err(core_usage)?;
            out!("G{}{}(p, q) = {v:.10}", pair.i(), pair.j());
            Ok(vec![Check::info(
                format!("green-eval/G{}{}", pair.i(), pair.j()),
                "biharmonic Green functions",
                v,
            )])
        }
        Command::Solve {
            model,
            pair,
            point,
            terms,
        } => solve(cfg, (*model).into(), pair_of(pair)?, point, terms),
        Command::DecayFit {
            kind,
            param,
            regime,
            decay,
            radii,
        } => {
            let dim = dim_from(cfg, None, 5)?;
            let kind = match kind {
                KindArg::SingularPower => DecayKind::SingularPower,
                KindArg::PoissonType => DecayKind::PoissonType,
            };
            let regime = match regime {
                RegimeArg::Normal => Regime::Normal,
                RegimeArg::Tangential => Regime::Tangential,
            };
            let a = decay.unwrap_or(dim.nf() + 1.0);
            let f = BoundaryData::radial(1.0, &vec![0.0; dim.n()], Profile::Rational { a });
            let r = decay_asymptotics_fit(kind, *param, dim, &f, radii, regime, &cfg.quadrature)
                .map_err(core_usage)?;
            out!(
                "fitted slope {:.4}, predicted {:.4}, r² {:.6}",
                r.fitted_slope,
                r.predicted_slope,
                r.r_squared
            );
            let c = Check::at_most(
                "decay-fit/slope",
                "decay of singular and Poisson-type integrals",
                (r.fitted_slope - r.predicted_slope).abs(),
                0.1,
            );
            Ok(vec![c])
        }
        Command::BubbleCheck {
            model,
            pair,
            eps,
            center,
            samples,
        } => bubble_check(
            cfg,
            (*model).into(),
            pair,
            *eps,
            center.as_deref(),
            *samples,
        ),
        Command::Constants => constants(cfg),
        Command::Ode {
            i,
            eps,
            t_end,
            grid,
            half_width,
            normalization,
            scan_out,
        } => {
            let dim = dim_from(cfg, None, 5)?;
            let norm = match normalization {
                NormalizationArg::Unit => Normalization::Unit,
                NormalizationArg::Geometric => Normalization::Geometric,
            };
            let p = OdeParams::new(dim.n(), norm).map_err(core_usage)?;
            let (bc, truth) = bubble_boundary(&p, *i, *eps).map_err(core_usage)?;
            let scfg = ScanConfig::for_reference(p.scaling_to_unit().max(1.0));
            let rep = uniqueness_scan(
                &p,
                &bc,
                (truth - half_width, truth + half_width),
                *t_end,
                *grid,
                &scfg,
            )
            .map_err(core_usage)?;
            if let Some(path) = scan_out {
                write_scan(&rep, path)?;
            }
            for iv in &rep.intervals {
                out!(
                    "admissible [{:.12}, {:.12}] width {:.3e} witnessed {}",
                    iv.lo,
                    iv.hi,
                    iv.width(),
                    iv.witnessed
                );
            }
            out!("true datum {truth:.12}");
            let ok = rep.intervals.len() == 1 && rep.intervals[0].contains(truth, 1e-9);
            let c = Check::judged(
                "ode/scan",
                "uniqueness of the admissible shooting datum",
                rep.total_width(),
                *half_width,
                ok,
            );
            Ok(vec![c])
        }
        Command::Inequality { a, degree, delta } => inequality(cfg, a.as_deref(), *degree, *delta),
    }
}

fn parse_terms(terms: &[String]) -> Result<Vec<(u32, u32, f64)>, CliError> {
    terms
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.split(':').collect();
            let bad = || usage(format!("bad term `{t}`, expected p:m:c"));
            match parts.as_slice() {
                [p, m, c] => Ok((
                    p.parse().map_err(|_| bad())?,
                    m.parse().map_err(|_| bad())?,
                    c.parse().map_err(|_| bad())?,
                )),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn solve(
    cfg: &RunConfig,
    model: Model,
    pair: OperatorPair,
    point: &[f64],
    terms: &[String],
) -> Result<Vec<Check>, CliError> {
    let dim = dim_from(cfg, Some(point.len()), 4)?;
    let prob = Problem::new(pair, dim);
    let (i, j) = (pair.i(), pair.j());
    match model {
        Model::Ball => {
            let mut axis = vec![0.0; dim.ambient()];
            axis[0] = 1.0;
            let u = ZonalPolynomial::new(&axis, &parse_terms(terms)?).map_err(core_usage)?;
            let rt = solve_and_roundtrip(&prob, &u, &cfg.quadrature, &[point.to_vec()])
                .map_err(core_usage)?;
            out!("U(ξ) = {:.10}, error {:.3e}", u.value(point), rt.max_error);
            Ok(vec![Check::at_most(
                format!("solve/p{i}{j}"),
                "Poisson and Green integral representation",
                rt.max_error,
                1e-3,
            )])
        }
        Model::HalfSpace => {
            let fi = BoundaryData::radial(1.0, &vec![0.0; dim.n()], Profile::Bump { radius: 1.0 });
            let fj =
                BoundaryData::radial(1.0, &vec![0.0; dim.n()], Profile::Gaussian { width: 1.0 });
            let v =
                half_space_poisson(&prob, &fi, &fj, point, &cfg.quadrature).map_err(core_usage)?;
            out!("u(X) = {v:.10}");
            Ok(vec![Check::info(
                format!("solve/p{i}{j}"),
                "Poisson integral on the half-space",
                v,
            )])
        }
    }
}

fn bubble_check(
    cfg: &RunConfig,
    model: Model,
    pair: &[usize],
    eps: f64,
    center: Option<&[f64]>,
    samples: usize,
) -> Result<Vec<Check>, CliError> {
    let [i, j] = pair else {
        return Err(usage("--pair takes two indices, e.g. 1,3"));
    };
    let (i, j) = (*i, *j);
    let mut rng = Ctx { cfg }.rng("bubble-check");
    let (params, interior, boundary) = match model {
        Model::HalfSpace => {
            let dim = dim_from(cfg, center.map(|c| c.len() + 1), 5)?;
            let n = dim.n();
            let x0 = center.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
            let params = BubbleParams::half_space(&x0, eps).map_err(core_usage)?;
            let interior: Vec<Vec<f64>> = (0..samples)
                .map(|_| suites::half_point(&mut rng, n, 2.0, 0.2, 2.0))
                .collect();
            let boundary: Vec<Vec<f64>> = (0..samples)
                .map(|_| {
                    let mut p = suites::cube(&mut rng, n, 2.0);
                    p.push(0.0);
                    p
                })
                .collect();
            (params, interior, boundary)
        }
        Model::Ball => {
            let dim = dim_from(cfg, center.map(<[f64]>::len), 5)?;
            let d = dim.ambient();
            let xi0 = center.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; d]);
            let params = BubbleParams::ball(&xi0).map_err(core_usage)?;
            let interior = (0..samples)
                .map(|_| suites::ball_point(&mut rng, d, 0.8))
                .collect();
            let boundary = (0..samples)
                .map(|_| suites::sphere_point(&mut rng, d))
                .collect();
            (params, interior, boundary)
        }
    };
    let r = bubble_bvp_residual(i, j, &params, &interior, &boundary, cfg.stencil)
        .map_err(core_usage)?;
    let paper_ref = "geometric bubbles solve the critical boundary problems";
    let mk = |name: &str, s: &biharmonic_core::classification::ResidualSummary| {
        out!(
            "{name}: max |residual| {:.3e}, tolerance {:.3e}",
            s.max_abs,
            s.tolerance
        );
        Check::judged(
            format!("bubble-check/{name}"),
            paper_ref,
            s.max_abs,
            s.tolerance,
            s.within,
        )
    };
    Ok(vec![
        mk("interior", &r.interior),
        mk(&format!("B{i}"), &r.boundary[0]),
        mk(&format!("B{j}"), &r.boundary[1]),
    ])
}

fn constants(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let dim = dim_from(cfg, None, 4)?;
    let n = dim.n();
    let c = sharp_constants(dim, &cfg.quadrature).map_err(core_usage)?;
    let simpson = radial_integral_simpson(dim, 4096).map_err(core_usage)?;
    // A relative error bar on the integral carries over to d_n and, through the exponent, to e_n.
    let rel = c.quadrature_error / c.integral;
    let e_rel = rel * (dim.nf() - 3.0) / (2.0 * (dim.nf() + 1.0));
    out!("I({n}) = {:.15} ± {:.1e}", c.integral, c.quadrature_error);
    out!("d{n}   = {:.15} ± {:.1e}", c.d_n, rel * c.d_n);
    out!("e{n}   = {:.15} ± {:.1e}", c.e_n, e_rel * c.e_n);
    let paper_ref = "sharp isoperimetric constant";
    Ok(vec![
        Check::info(format!("constants/I{n}"), paper_ref, c.integral),
        Check::info(format!("constants/d{n}"), paper_ref, c.d_n),
        Check::info(
            format!("constants/e{n}"),
            "boundary curvature ratio of the extremal metric",
            c.e_n,
        ),
        Check::at_most(
            format!("constants/I{n}/simpson"),
            paper_ref,
            (simpson - c.integral).abs(),
            1e-6,
        ),
    ])
}

fn inequality(
    cfg: &RunConfig,
    a: Option<&[f64]>,
    degree: Option<u32>,
    delta: f64,
) -> Result<Vec<Check>, CliError> {
    let dim = dim_from(cfg, a.map(<[f64]>::len), 4)?;
    let d = dim.ambient();
    let q = &cfg.quadrature;
    let c = sharp_constants(dim, q).map_err(core_usage)?;
    let ratios = |u: &dyn biharmonic_core::field::ScalarField| -> Result<(f64, f64), CliError> {
        let iso = ratio_eval(
            RatioKind::Isoperimetric,
            u,
            dim,
            T3Normalization::Operator,
            q,
        )
        .map_err(core_usage)?;
        let t3 = ratio_eval(RatioKind::T3Ratio, u, dim, T3Normalization::Operator, q)
            .map_err(core_usage)?;
        Ok((iso, t3))
    };
    match degree {
        Some(k) => {
            let x = Polynomial::coordinate(d, 0);
            let h = match k {
                1 => x,
                2 => x
                    .pow(2)
                    .add(&Polynomial::coordinate(d, 1).pow(2).scale(-1.0)),
                _ => return Err(usage("--degree must be 1 or 2")),
            };
            let u = competitor(dim, &h, delta).map_err(core_usage)?;
            let (iso, t3) = ratios(&u)?;
            out!(
                "isoperimetric ratio {iso:.10} (d = {:.10}), T3 ratio {t3:.10} (e = {:.10})",
                c.d_n,
                c.e_n
            );
            let r = "sharp inequalities on admissible competitors";
            Ok(vec![
                Check::info("inequality/iso", r, iso / c.d_n),
                Check::info("inequality/t3", r, t3 / c.e_n),
            ])
        }
        None => {
            let centre = a.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; d]);
            let u = Extremal::new(&centre).map_err(core_usage)?;
            let (iso, t3) = ratios(&u)?;
            out!(
                "isoperimetric ratio {iso:.10} (d = {:.10}), T3 ratio {t3:.10} (e = {:.10})",
                c.d_n,
                c.e_n
            );
            Ok(vec![
                Check::at_most(
                    "inequality/iso",
                    "isoperimetric ratio of the extremal metric",
                    (iso / c.d_n - 1.0).abs(),
                    1e-4,
                ),
                Check::at_most(
                    "inequality/t3",
                    "boundary curvature ratio of the extremal metric",
                    (t3 / c.e_n - 1.0).abs(),
                    1e-4,
                ),
            ])
        }
    }
}

fn write_scan(rep: &ScanReport, path: &PathBuf) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.clone(),
        source: e,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => io(e),
        k => CliError::Format(format!("{k:?}")),
    })?;
    let fail = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(["free", "termination", "exit_time"])
        .map_err(fail)?;
    for s in &rep.samples {
        w.write_record([
            format!("{:e}", s.free),
            s.termination.name().to_string(),
            format!("{:e}", s.exit_time),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(io)
}

fn print_summary(report: &SuiteReport, seconds: f64, path: &std::path::Path) {
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
    let width = report
        .checks
        .iter()
        .map(|c| c.id.len())
        .max()
        .unwrap_or(2)
        .max(2);
    out!(
        "{:<width$}  {:>10}  {:>10}  status",
        "id",
        "value",
        "tolerance"
    );
    for c in &report.checks {
        out!(
            "{:<width$}  {:>10}  {:>10}  {}",
            c.id,
            fmt(c.value),
            fmt(c.tolerance),
            c.status.as_str()
        );
    }
    let s = &report.summary;
    out!(
        "{}: {} checks, {} passed, {} failed in {seconds:.2} s",
        report.suite,
        s.total,
        s.passed,
        s.failed
    );
    out!("report written to {}", path.display());
    let failing: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .collect();
    if !failing.is_empty() {
        out!("failed checks:");
        for c in failing {
            out!(
                "  {} ({}): value {} tolerance {}{}",
                c.id,
                c.paper_ref,
                fmt(c.value),
                fmt(c.tolerance),
                c.note
                    .as_ref()
                    .map(|n| format!(", {n}"))
                    .unwrap_or_default()
            );
        }
    }
}
