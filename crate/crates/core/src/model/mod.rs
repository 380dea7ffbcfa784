//! Joint lognormal dynamics of nominal forwards and displaced inflation
//! forwards on a tenor grid, with Monte Carlo simulation under the spot,
//! forward and annuity measures.

pub mod hjm;
mod market;
mod mc;
mod vols;

pub use hjm::{
    consistency_rate, consistency_residual, jy_drift_check, real_forward_drifts, ForwardVols,
    JyReport,
};
pub use market::{bond_vol_from_forwards, nominal_bond_vol, MarketModel};
pub use mc::{
    monte_carlo, simulate, McConfig, McEstimate, Measure, PathSet, PathView, ROUNDING_TOLERANCE,
};
pub use vols::{CorrelationSpec, VolSurface, DEFAULT_LOADING_CAP};
