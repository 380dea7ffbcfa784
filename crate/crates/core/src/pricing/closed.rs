use crate::curves::{InflationCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::model::VolSurface;
use crate::pricing::black::{displace, displaced_caplet, displaced_floorlet, implied_total_sd};

/// Zero-coupon inflation swap receiving `I(T)/I(0) - 1` against
/// `(1+K)^T - 1`: `notional·[P_R(0,T) - P(0,T)(1+K)^T]`.
pub fn price_zciis(
    curves: &InflationCurve,
    strike: f64,
    maturity: f64,
    notional: f64,
) -> Result<f64> {
    if !(maturity > 0.0) {
        return Err(Error::invalid(format!(
            "ZCIIS maturity {maturity} must be positive"
        )));
    }
    if !(strike > -1.0) {
        return Err(Error::invalid(format!(
            "ZCIIS rate {strike} must exceed -100%"
        )));
    }
    let p = curves.nominal().discount(maturity)?;
    let pr = curves.real().discount(maturity)?;
    Ok(notional * (pr - p * (1.0 + strike).powf(maturity)))
}

/// Year-on-year inflation swap over periods `m+1..=n` of `grid`, receiving
/// the floating inflation leg: `notional·Σ ΔT_j P(0,T_j)(f^(I)_j(0) - K)`.
/// Periods already paid are skipped.
pub fn price_yyiis(
    curves: &InflationCurve,
    grid: &TenorGrid,
    m: usize,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    crate::pricing::swap::check_span(grid, m, n)?;
    let mut v = 0.0;
    for j in m + 1..=n {
        let t = grid.date(j);
        if t <= 0.0 {
            continue;
        }
        let f = curves.inflation_forward(grid.date(j - 1), t)?;
        v += grid.accrual(j) * curves.nominal().discount(t)? * (f - strike);
    }
    Ok(notional * v)
}

struct CapletInputs {
    accrual: f64,
    discount: f64,
    forward: f64,
    total_var: f64,
}

fn caplet_inputs(curves: &InflationCurve, vols: &VolSurface, j: usize) -> Result<CapletInputs> {
    let grid = vols.grid();
    if j == 0 || j > grid.periods() {
        return Err(Error::invalid(format!(
            "caplet index {j} outside a {}-period grid",
            grid.periods()
        )));
    }
    let t = grid.date(j);
    if t <= 0.0 {
        return Err(Error::invalid(format!(
            "caplet {j} paid at T = {t}, before the valuation date"
        )));
    }
    Ok(CapletInputs {
        accrual: grid.accrual(j),
        discount: curves.nominal().discount(t)?,
        forward: curves.inflation_forward(grid.date(j - 1), t)?,
        total_var: vols.inflation_total_variance(j),
    })
}

/// Caplet on `f^(I)_j` paid at `T_j`.
pub fn price_caplet(
    curves: &InflationCurve,
    vols: &VolSurface,
    j: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    let c = caplet_inputs(curves, vols, j)?;
    Ok(notional * displaced_caplet(c.accrual, c.discount, c.forward, strike, c.total_var)?)
}

/// Floorlet on `f^(I)_j` paid at `T_j`.
pub fn price_floorlet(
    curves: &InflationCurve,
    vols: &VolSurface,
    j: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    let c = caplet_inputs(curves, vols, j)?;
    Ok(notional * displaced_floorlet(c.accrual, c.discount, c.forward, strike, c.total_var)?)
}

/// Cap made of the unpaid caplets `j = 1..=n`.
pub fn price_cap(
    curves: &InflationCurve,
    vols: &VolSurface,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    price_cap_span(curves, vols, 0, n, strike, notional)
}

/// Floor made of the unpaid floorlets `j = 1..=n`.
pub fn price_floor(
    curves: &InflationCurve,
    vols: &VolSurface,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    price_floor_span(curves, vols, 0, n, strike, notional)
}

fn live_span(vols: &VolSurface, m: usize, n: usize) -> Result<std::ops::RangeInclusive<usize>> {
    let grid = vols.grid();
    if !(m < n && n <= grid.periods()) {
        return Err(Error::invalid(format!(
            "cap span ({m}, {n}) is empty or outside a {}-period grid",
            grid.periods()
        )));
    }
    Ok((m + 1).max(grid.first_live())..=n)
}

/// Cap on the periods `m+1..=n`, skipping periods already paid.
pub fn price_cap_span(
    curves: &InflationCurve,
    vols: &VolSurface,
    m: usize,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    live_span(vols, m, n)?
        .map(|j| price_caplet(curves, vols, j, strike, notional))
        .sum()
}

/// Floor on the periods `m+1..=n`, skipping periods already paid.
pub fn price_floor_span(
    curves: &InflationCurve,
    vols: &VolSurface,
    m: usize,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<f64> {
    live_span(vols, m, n)?
        .map(|j| price_floorlet(curves, vols, j, strike, notional))
        .sum()
}

/// Volatility `σ_j` reproducing a unit-notional caplet `price` on period
/// `j` of `grid`, inverting the displaced Black formula.
pub fn implied_caplet_vol(
    curves: &InflationCurve,
    grid: &TenorGrid,
    j: usize,
    strike: f64,
    price: f64,
) -> Result<f64> {
    if j == 0 || j > grid.periods() || grid.date(j) <= 0.0 {
        return Err(Error::invalid(format!(
            "caplet index {j} is not a live period"
        )));
    }
    let t = grid.date(j);
    let accrual = grid.accrual(j);
    let discount = curves.nominal().discount(t)?;
    let forward = curves.inflation_forward(grid.date(j - 1), t)?;
    let (mu, k) = displace(accrual, forward, strike)?;
    let sd = implied_total_sd(accrual * discount, mu, k, price)?;
    Ok(sd / t.sqrt())
}
