//! Market model for inflation-linked derivatives.
//!
//! Curves are stripped from zero-coupon inflation swap quotes, the joint
//! dynamics of nominal and inflation forward rates are driven by
//! piecewise-constant factor loadings, and caps, floors and swaptions are
//! priced in closed form or by Monte Carlo. Calibration fits the inflation
//! loadings to cap and swaption quotes.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod calibration;
pub mod curves;
pub mod io;
pub mod math;
pub mod model;
pub mod pricing;

mod error;

pub use error::{Error, Result};
