//! Nominal, real and inflation term structures.
//!
//! Everything is quoted at the valuation date `t = 0`; maturities are year
//! fractions. Curves are immutable once built.

mod grid;
mod inflation;
mod interp;
mod nominal;
mod real;

pub use grid::TenorGrid;
pub use inflation::{inflation_discount, CpiFixings, InflationCurve};
pub use interp::{Interpolation, EXTRAPOLATION_LIMIT};
pub use nominal::{build_nominal_curve, NominalCurve, Pillar};
pub use real::{
    forward_real_bond_price, inflation_forward_pnl, real_bond_replication_pnl,
    real_curve_from_zciis, RealCurve, ZciisQuote, ZciisQuoteSet,
};

/// Free-function form of [`InflationCurve::inflation_forward`].
pub fn inflation_forward(infl: &InflationCurve, t1: f64, t2: f64) -> crate::Result<f64> {
    infl.inflation_forward(t1, t2)
}
