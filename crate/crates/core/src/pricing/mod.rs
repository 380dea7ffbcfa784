//! Closed-form and Monte Carlo prices of inflation swaps, caps, floors and
//! year-on-year swaptions.

mod black;
mod closed;
mod instrument;
mod mc;
mod swap;

pub use black::{
    black_call, black_put, displace, displaced_caplet, displaced_floorlet, implied_total_sd,
};
pub use closed::{
    implied_caplet_vol, price_cap, price_cap_span, price_caplet, price_floor, price_floor_span,
    price_floorlet, price_yyiis, price_zciis,
};
pub use instrument::{Instrument, InstrumentKind, Valuation};
pub use mc::{mc_value, mc_values};
pub use swap::{price_swaption, swap_rate_view, SwapRateView, SwaptionQuote, SwaptionVariance};
