use std::path::{Path, PathBuf};

use inflmm::calibration::{CalibrationTarget, SolverSettings};
use inflmm::model::{McConfig, Measure};
use inflmm::pricing::{Instrument, InstrumentKind};
use inflmm::{Error, Result};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "INFLMM_OUTPUT_DIR";

/// Everything a run needs. Missing quote files fall back to the bundled
/// 2008-04-07 Euro fixtures; relative paths in a config file are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub zciis: Option<PathBuf>,
    pub caps: Option<PathBuf>,
    /// Nominal discount factors; a flat curve is used when absent.
    pub nominal_curve: Option<PathBuf>,
    pub cpi_fixings: Option<PathBuf>,
    pub book: Option<PathBuf>,
    /// A `calibration.json` from an earlier run, used by `price` and
    /// `simulate` instead of calibrating again.
    pub calibration: Option<PathBuf>,

    /// Continuously compounded rate of the flat nominal curve.
    pub nominal_flat_zero_rate: f64,
    /// Lognormal volatility of every nominal forward.
    pub nominal_flat_vol: f64,
    /// Flat inflation loading used by `price` and `simulate` in place of a
    /// calibrated surface.
    pub flat_inflation_vol: Option<f64>,
    pub grid_step: f64,
    /// Last grid date; defaults to the longest ZCIIS maturity.
    pub grid_horizon: Option<f64>,

    pub rho: f64,
    pub solve_rho: bool,
    pub alpha: f64,
    pub beta: f64,
    pub time_homogeneous: bool,
    /// Caps at this strike are calibrated; the others are diagnostics.
    pub calibration_strike_pct: f64,
    /// Targets added to the cap prices, e.g. swaption volatilities.
    pub extra_targets: Vec<CalibrationTarget>,
    pub solver: SolverSettings,

    pub mc: McConfig,
    pub simulate: SimulateConfig,
    pub swaption_grid: SwaptionGridConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            zciis: None,
            caps: None,
            nominal_curve: None,
            cpi_fixings: None,
            book: None,
            calibration: None,
            nominal_flat_zero_rate: 0.04,
            nominal_flat_vol: 0.15,
            flat_inflation_vol: None,
            grid_step: 1.0,
            grid_horizon: None,
            rho: -0.0535,
            solve_rho: false,
            alpha: 1.0,
            beta: 1.0,
            time_homogeneous: true,
            calibration_strike_pct: 2.0,
            extra_targets: Vec::new(),
            solver: SolverSettings::default(),
            mc: McConfig {
                paths: 200_000,
                ..McConfig::default()
            },
            simulate: SimulateConfig::default(),
            swaption_grid: SwaptionGridConfig::default(),
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Instruments valued by Monte Carlo. Empty means the book, or annual
    /// caplets 1-10y at the calibration strike when there is no book.
    pub instruments: Vec<Instrument>,
    /// Number of paths written to `paths.csv`; 0 writes none.
    pub write_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwaptionGridConfig {
    /// `(start, end)` grid indices.
    pub spans: Vec<(usize, usize)>,
    pub strikes_pct: Vec<f64>,
}

impl Default for SwaptionGridConfig {
    fn default() -> Self {
        Self {
            spans: vec![(1, 3), (2, 5), (5, 10)],
            strikes_pct: vec![1.0, 2.0, 3.0, 4.0],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        for p in [
            &mut self.zciis,
            &mut self.caps,
            &mut self.nominal_curve,
            &mut self.cpi_fixings,
            &mut self.book,
            &mut self.calibration,
            &mut self.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() && p.as_os_str() != "-" {
                *p = dir.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.solve_rho && !(self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return bad(format!("rho {} outside [-1, 1]", self.rho));
        }
        if !(self.nominal_flat_vol >= 0.0 && self.nominal_flat_vol.is_finite()) {
            return bad(format!(
                "nominal vol must be non-negative, got {}",
                self.nominal_flat_vol
            ));
        }
        if let Some(v) = self.flat_inflation_vol {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("inflation vol must be non-negative, got {v}"));
            }
        }
        if !(self.grid_step > 0.0) {
            return bad(format!(
                "grid step must be positive, got {}",
                self.grid_step
            ));
        }
        if self.mc.paths < 1 {
            return bad("at least one Monte Carlo path is needed".into());
        }
        if self.mc.steps_per_year < 1 {
            return bad("steps_per_year must be at least 1".into());
        }
        for p in [
            &self.zciis,
            &self.caps,
            &self.nominal_curve,
            &self.cpi_fixings,
            &self.book,
            &self.calibration,
        ]
        .into_iter()
        .flatten()
        {
            if p.as_os_str() != "-" && !p.is_file() {
                return bad(format!("{}: no such file", p.display()));
            }
        }
        Ok(())
    }

    /// Output directory: explicit setting, then the environment, then `out`.
    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn calibration_strike(&self) -> f64 {
        self.calibration_strike_pct / 100.0
    }

    /// Instruments for `simulate` when none are configured.
    pub fn default_simulation_book(&self) -> Vec<Instrument> {
        (1..=10)
            .map(|j| Instrument {
                id: format!("caplet_{j}y"),
                kind: InstrumentKind::Caplet,
                start: (j - 1) as f64 * self.grid_step,
                end: j as f64 * self.grid_step,
                freq: self.grid_step,
                strike: self.calibration_strike(),
                notional: 1.0,
            })
            .collect()
    }
}

/// Parses `spot`, `forward:<n>` or `annuity:<m>:<n>`.
pub fn parse_measure(s: &str) -> std::result::Result<Measure, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let idx = |p: &str| {
        p.parse::<usize>()
            .map_err(|_| format!("bad grid index `{p}` in measure `{s}`"))
    };
    match parts.as_slice() {
        ["spot"] => Ok(Measure::Spot),
        ["forward", n] => Ok(Measure::Forward { maturity: idx(n)? }),
        ["annuity", m, n] => Ok(Measure::Annuity {
            start: idx(m)?,
            end: idx(n)?,
        }),
        _ => Err(format!(
            "unknown measure `{s}`; use spot, forward:<n> or annuity:<m>:<n>"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_euro_experiment() {
        let c = RunConfig::default();
        assert_eq!(c.rho, -0.0535);
        assert_eq!(c.nominal_flat_vol, 0.15);
        assert_eq!(c.calibration_strike(), 0.02);
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"alpha": 2.5, "mc": {"paths": 10}}"#).unwrap();
        assert_eq!(c.alpha, 2.5);
        assert_eq!(c.mc.paths, 10);
        assert_eq!(c.mc.steps_per_year, 4);
        assert!(serde_json::from_str::<RunConfig>(r#"{"alpah": 1}"#).is_err());
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut c = RunConfig {
            caps: Some("caps.csv".into()),
            zciis: Some("/abs/z.csv".into()),
            book: Some("-".into()),
            ..RunConfig::default()
        };
        c.resolve_paths(Path::new("/etc/run"));
        assert_eq!(c.caps.unwrap(), PathBuf::from("/etc/run/caps.csv"));
        assert_eq!(c.zciis.unwrap(), PathBuf::from("/abs/z.csv"));
        assert_eq!(c.book.unwrap(), PathBuf::from("-"));
    }

    #[test]
    fn measures() {
        assert_eq!(parse_measure("spot").unwrap(), Measure::Spot);
        assert_eq!(
            parse_measure("forward:5").unwrap(),
            Measure::Forward { maturity: 5 }
        );
        assert_eq!(
            parse_measure("annuity:2:5").unwrap(),
            Measure::Annuity { start: 2, end: 5 }
        );
        assert!(parse_measure("forward").is_err());
        assert!(parse_measure("annuity:x:5").is_err());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        for c in [
            RunConfig {
                alpha: 0.0,
                ..RunConfig::default()
            },
            RunConfig {
                rho: 1.5,
                ..RunConfig::default()
            },
            RunConfig {
                mc: McConfig {
                    paths: 0,
                    ..McConfig::default()
                },
                ..RunConfig::default()
            },
            RunConfig {
                caps: Some("/nonexistent/caps.csv".into()),
                ..RunConfig::default()
            },
        ] {
            assert!(c.validate().is_err());
        }
    }
}
