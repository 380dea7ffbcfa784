//! Implied caplet volatilities and regularised non-parametric calibration
//! of the inflation loadings, optionally with piecewise correlation.

mod bootstrap;
mod nonparam;
mod sqp;
mod target;

pub use bootstrap::{bootstrap_caplet_vols, CapQuote, CapletStrip, CapletVols};
pub use nonparam::{
    calibrate_nonparametric, implied_correlation, CalibrationResult, CalibrationSettings,
    CorrelationMode,
};
pub use sqp::{IterationRecord, SolverSettings};
pub use target::{CalibrationTarget, TargetKind, TargetResidual};
