//! Run settings: defaults, an optional JSON file, then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use biharmonic_core::bvp::QuadratureConfig;
use biharmonic_core::stencil::StencilConfig;
use serde::{Deserialize, Serialize};

use crate::report::Format;
use crate::CliError;

/// The only environment variable the tool reads.
pub const REPORT_DIR_ENV: &str = "BIHARMONIC_REPORT_DIR";

/// Settings as they appear in a config file or on the command line; every field optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub quad_tol: Option<f64>,
    pub sphere_order: Option<usize>,
    pub max_intervals: Option<usize>,
    pub stencil_h: Option<f64>,
    pub stencil_order: Option<usize>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields of `self` win over those of `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            n: self.n.or(base.n),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            quad_tol: self.quad_tol.or(base.quad_tol),
            sphere_order: self.sphere_order.or(base.sphere_order),
            max_intervals: self.max_intervals.or(base.max_intervals),
            stencil_h: self.stencil_h.or(base.stencil_h),
            stencil_order: self.stencil_order.or(base.stencil_order),
        }
    }
}

/// Validated settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Restricts suites to one dimension when set.
    pub n: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
    pub stencil: StencilConfig,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_STENCIL_H: f64 = 0.02;

impl RunConfig {
    pub fn resolve(s: Settings) -> Result<Self, CliError> {
        let usage = |m: &str| CliError::Usage(m.to_string());
        if let Some(n) = s.n {
            if !(2..=12).contains(&n) {
                return Err(usage("--n must lie in 2..=12"));
            }
        }
        let mut quadrature = QuadratureConfig::default();
        if let Some(t) = s.quad_tol {
            quadrature = QuadratureConfig::new(t).map_err(|e| usage(&e.to_string()))?;
        }
        if let Some(m) = s.sphere_order {
            if !(4..=64).contains(&m) {
                return Err(usage("--sphere-order must lie in 4..=64"));
            }
            quadrature.sphere_order = m;
        }
        if let Some(m) = s.max_intervals {
            if m < 16 {
                return Err(usage("--max-intervals must be at least 16"));
            }
            quadrature.max_intervals = m;
        }
        let stencil = StencilConfig::new(
            s.stencil_h.unwrap_or(DEFAULT_STENCIL_H),
            s.stencil_order.unwrap_or(4),
        )
        .map_err(|e| usage(&e.to_string()))?;
        Ok(RunConfig {
            n: s.n,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            format: s.format.unwrap_or(Format::Json),
            output: s.output,
            quadrature,
            stencil,
        })
    }

    /// Where the report goes: explicit path, else `$BIHARMONIC_REPORT_DIR/<name>`, else `reports/<name>`.
    pub fn report_path(&self, name: &str) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let dir = std::env::var_os(REPORT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("reports"));
        crate::report::default_path(&dir, name, self.format)
    }

    /// The settings that influence results, recorded in every report. The output path is left out
    /// so that runs differing only in destination produce identical files.
    pub fn fingerprint(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "seed": self.seed,
            "quadrature": {
                "target_tol": self.quadrature.target_tol,
                "sphere_order": self.quadrature.sphere_order,
                "max_intervals": self.quadrature.max_intervals,
                "max_refinements": self.quadrature.max_refinements,
            },
            "stencil": { "h": self.stencil.h, "order": self.stencil.order },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = Settings {
            n: Some(4),
            seed: Some(3),
            stencil_h: Some(0.05),
            ..Default::default()
        };
        let flags = Settings {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(flags.over(file)).unwrap();
        assert_eq!((cfg.n, cfg.seed, cfg.stencil.h), (Some(4), 9, 0.05));
        let cfg = RunConfig::resolve(Settings::default()).unwrap();
        assert_eq!(
            (cfg.seed, cfg.stencil.h, cfg.format),
            (DEFAULT_SEED, DEFAULT_STENCIL_H, Format::Json)
        );
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::resolve(Settings {
            stencil_order: Some(3),
            ..Default::default()
        })
        .is_err());
        assert!(RunConfig::resolve(Settings {
            quad_tol: Some(-1.0),
            ..Default::default()
        })
        .is_err());
        assert!(RunConfig::resolve(Settings {
            n: Some(1),
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"n": 4, "bogus": 1}"#).is_err());
        let s: Settings = serde_json::from_str(r#"{"n": 5, "format": "csv"}"#).unwrap();
        assert_eq!(s.format, Some(Format::Csv));
    }
}
