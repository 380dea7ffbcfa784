//! Command-line front end: `curves`, `calibrate`, `price` and `simulate`.
//!
//! Each command takes `--config <json>` and flag overrides; flags win over
//! the file. Exit codes: 0 success, 2 input error, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inflmm::model::Measure;
use inflmm::Error;

use crate::config::{parse_measure, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "inflmm",
    version,
    about = "Inflation market model: curves, calibration, pricing and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nominal, real and inflation curves on the tenor grid (curves.csv).
    Curves(Overrides),
    /// Bootstrap and regularised calibration to cap quotes
    /// (calibration.json, vol_matrix.csv, cap_repricing.csv).
    Calibrate(Overrides),
    /// Price an instrument book and the swaption grid
    /// (prices.csv, swaption_grid.csv, swap_rates.csv).
    Price(Overrides),
    /// Monte Carlo against closed form (simulation.json, optional paths.csv).
    Simulate(Overrides),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $INFLMM_OUTPUT_DIR, else ./out).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub zciis: Option<PathBuf>,
    #[arg(long)]
    pub caps: Option<PathBuf>,
    #[arg(long)]
    pub nominal_curve: Option<PathBuf>,
    #[arg(long)]
    pub cpi_fixings: Option<PathBuf>,
    /// Instrument book CSV.
    #[arg(long)]
    pub book: Option<PathBuf>,
    /// calibration.json from an earlier `calibrate` run.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long)]
    pub nominal_rate: Option<f64>,
    #[arg(long)]
    pub nominal_vol: Option<f64>,
    /// Use a flat inflation loading instead of calibrating.
    #[arg(long)]
    pub inflation_vol: Option<f64>,
    #[arg(long)]
    pub grid_horizon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub solve_rho: bool,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Let inflation loadings vary in calendar time.
    #[arg(long)]
    pub time_dependent: bool,
    #[arg(long)]
    pub strike_pct: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps_per_year: Option<usize>,
    #[arg(long)]
    pub no_antithetic: bool,
    /// spot, forward:<n> or annuity:<m>:<n>.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Option<Measure>,
    /// Paths to write to paths.csv.
    #[arg(long)]
    pub write_paths: Option<usize>,
}

impl Overrides {
    /// Config file (or defaults) with the flags applied on top.
    pub fn resolve(&self) -> inflmm::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($flag:ident => $($field:tt)+) => {
                if let Some(v) = self.$flag.clone() {
                    c.$($field)+ = v.into();
                }
            };
        }
        set!(output_dir => output_dir);
        set!(zciis => zciis);
        set!(caps => caps);
        set!(nominal_curve => nominal_curve);
        set!(cpi_fixings => cpi_fixings);
        set!(book => book);
        set!(calibration => calibration);
        set!(nominal_rate => nominal_flat_zero_rate);
        set!(nominal_vol => nominal_flat_vol);
        set!(inflation_vol => flat_inflation_vol);
        set!(grid_horizon => grid_horizon);
        set!(rho => rho);
        set!(alpha => alpha);
        set!(beta => beta);
        set!(strike_pct => calibration_strike_pct);
        set!(paths => mc.paths);
        set!(seed => mc.seed);
        set!(steps_per_year => mc.steps_per_year);
        set!(measure => mc.measure);
        set!(write_paths => simulate.write_paths);
        if self.solve_rho {
            c.solve_rho = true;
        }
        if self.time_dependent {
            c.time_homogeneous = false;
        }
        if self.no_antithetic {
            c.mc.antithetic = false;
        }
        Ok(c)
    }
}

/// Exit code for a failed run.
pub fn exit_code(e: &Error) -> u8 {
    let input = e.is_input_error()
        || matches!(
            e,
            Error::BandViolation { .. }
                | Error::CalendarArbitrage { .. }
                | Error::Infeasible { .. }
                | Error::Unidentifiable(_)
                | Error::ConsistencyViolated { .. }
        );
    if input {
        2
    } else {
        3
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let (name, o) = match &cli.command {
        Command::Curves(o) => ("curves", o),
        Command::Calibrate(o) => ("calibrate", o),
        Command::Price(o) => ("price", o),
        Command::Simulate(o) => ("simulate", o),
    };
    let result = o.resolve().and_then(|cfg| {
        let out = cfg.output_dir();
        match &cli.command {
            Command::Curves(_) => {
                let rows = commands::cmd_curves(&cfg)?;
                println!(
                    "curves: {} grid dates -> {}",
                    rows.len(),
                    out.join("curves.csv").display()
                );
            }
            Command::Calibrate(_) => {
                let r = commands::cmd_calibrate(&cfg)?;
                println!(
                    "calibrate: {} targets, max relative residual {:.2e}, {} iterations -> {}",
                    r.result.residuals.len(),
                    r.result.max_relative_residual(),
                    r.result.iterations.len(),
                    out.display()
                );
            }
            Command::Price(_) => {
                let r = commands::cmd_price(&cfg)?;
                let failed = r.prices.iter().filter(|p| p.status != "ok").count();
                println!(
                    "price: {} instruments ({failed} failed), {} swaptions -> {}",
                    r.prices.len(),
                    r.swaptions.len(),
                    out.display()
                );
            }
            Command::Simulate(_) => {
                let r = commands::cmd_simulate(&cfg)?;
                for row in &r.rows {
                    let z = row
                        .z_score
                        .map_or("n/a".to_string(), |z| format!("{z:+.2}"));
                    println!(
                        "{:<16} mc {:.8e} +- {:.2e}  closed {:.8e}  z {z}",
                        row.id, row.mc, row.std_error, row.closed_form
                    );
                }
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("inflmm {name}: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
