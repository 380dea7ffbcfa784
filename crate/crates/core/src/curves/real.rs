use serde::{Deserialize, Serialize};

use super::interp::{Interpolation, LogDiscountCurve};
use super::NominalCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZciisQuote {
    /// Years.
    pub maturity: f64,
    /// Decimal, e.g. 0.022115.
    pub rate: f64,
}

/// ZCIIS quotes `K(0,T)` with strictly increasing maturities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZciisQuoteSet {
    quotes: Vec<ZciisQuote>,
}

impl ZciisQuoteSet {
    pub fn new(quotes: Vec<ZciisQuote>) -> Result<Self> {
        let mut prev = 0.0;
        for q in &quotes {
            if !(q.maturity.is_finite() && q.maturity > prev) {
                return Err(Error::invalid(format!(
                    "ZCIIS maturities must be positive and strictly increasing, got {} after {prev}",
                    q.maturity
                )));
            }
            if !q.rate.is_finite() {
                return Err(Error::invalid(format!(
                    "ZCIIS rate at T={} is not finite",
                    q.maturity
                )));
            }
            prev = q.maturity;
        }
        Ok(Self { quotes })
    }

    pub fn quotes(&self) -> &[ZciisQuote] {
        &self.quotes
    }

    pub fn is_empty(&self) -> bool {
        self.quotes.is_empty()
    }
}

/// Real zero-coupon bond prices `P_R(0,T)`, log-linearly interpolated.
/// Unlike nominal discount factors these need not be monotone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealCurve {
    curve: LogDiscountCurve,
    /// CPI reference date `T_0` of the traded real bonds (years, `<= 0`).
    base_date: f64,
}

/// Strips real discount factors from ZCIIS quotes:
/// `P_R(0,T) = P(0,T) (1 + K(0,T))^T` at every quoted maturity.
pub fn real_curve_from_zciis(nominal: &NominalCurve, quotes: &ZciisQuoteSet) -> Result<RealCurve> {
    if quotes.is_empty() {
        return Err(Error::invalid("no ZCIIS quotes"));
    }
    let mut nodes = Vec::with_capacity(quotes.quotes().len());
    for q in quotes.quotes() {
        if q.rate <= -1.0 {
            return Err(Error::invalid(format!(
                "ZCIIS rate {} at T={} is at or below -100%",
                q.rate, q.maturity
            )));
        }
        let p = nominal.discount(q.maturity)?;
        nodes.push((q.maturity, p * (1.0 + q.rate).powf(q.maturity)));
    }
    Ok(RealCurve {
        curve: LogDiscountCurve::new(&nodes, Interpolation::LogLinear)?,
        base_date: 0.0,
    })
}

impl RealCurve {
    /// Real curve from explicit `(T, P_R(0,T))` pillars.
    pub fn from_pillars(pillars: &[(f64, f64)]) -> Result<Self> {
        Ok(Self {
            curve: LogDiscountCurve::new(pillars, Interpolation::LogLinear)?,
            base_date: 0.0,
        })
    }

    pub fn with_base_date(mut self, base_date: f64) -> Result<Self> {
        if !(base_date <= 0.0) {
            return Err(Error::invalid(format!(
                "CPI base date must not be after the valuation date, got {base_date}"
            )));
        }
        self.base_date = base_date;
        Ok(self)
    }

    pub fn base_date(&self) -> f64 {
        self.base_date
    }

    /// `P_R(0,T)`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        self.curve.discount(t)
    }

    /// ZCIIS rate implied by this curve and `nominal`: `(P_R/P)^(1/T) - 1`.
    pub fn implied_zciis_rate(&self, nominal: &NominalCurve, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::invalid(format!(
                "ZCIIS maturity must be positive, got {t}"
            )));
        }
        Ok((self.discount(t)? / nominal.discount(t)?).powf(1.0 / t) - 1.0)
    }

    pub fn last_pillar(&self) -> f64 {
        self.curve.last_pillar()
    }

    pub fn pillars(&self) -> Vec<(f64, f64)> {
        self.curve.pillars().collect()
    }
}

/// Forward price at `t1` of the real bond maturing at `t2`:
/// `F_R(0,t1,t2) = P_R(0,T_0,t2) / P_R(0,T_0,t1)`.
///
/// The CPI ratio `I(0)/I(T_0)` cancels, so the result does not depend on the
/// base date.
pub fn forward_real_bond_price(real: &RealCurve, t1: f64, t2: f64) -> Result<f64> {
    if !(t1 >= 0.0) || t1 > t2 {
        return Err(Error::invalid(format!(
            "forward real bond needs 0 <= T1 <= T2, got T1={t1}, T2={t2}"
        )));
    }
    if t1 == t2 {
        return Ok(1.0);
    }
    Ok(real.discount(t2)? / real.discount(t1)?)
}

/// P&L at `T_2` of the replication strategy used to pin down the forward
/// real bond price, per unit of CPI base:
///
/// long the forward on `I(T_1)/I(T_0)` dollars of the `T_2` real bond at
/// price `forward_price`, long one `T_1` real bond, short
/// `P_R(T_1)/P_R(T_2)` units of the `T_2` real bond. Every leg is settled
/// against the realised index ratio `cpi_ratio = I(T_2)/I(T_0)`.
pub fn real_bond_replication_pnl(
    forward_price: f64,
    real_t1: f64,
    real_t2: f64,
    cpi_ratio: f64,
) -> f64 {
    // units of the T2 bond bought forward with the T1 bond's proceeds
    let bought = 1.0 / forward_price;
    // 1 / F_R on the curve, written so a fair forward cancels exactly
    let sold = 1.0 / (real_t2 / real_t1);
    bought * cpi_ratio - sold * cpi_ratio
}

/// P&L at `T_2` of the forward-contract strategy on the inflation rate over
/// `[T_1, T_2]`: receive fixed `strike`, pay the realised simple rate,
/// financed through the forward real bond and a nominal bond spread.
///
/// * `realized_ratio`: `I(T_2)/I(T_1)`.
/// * `forward_price`: `F_R(0,T_1,T_2)`.
/// * `nominal_t1`, `nominal_t2`: `P(0,T_1)`, `P(0,T_2)`.
pub fn inflation_forward_pnl(
    strike: f64,
    t1: f64,
    t2: f64,
    realized_ratio: f64,
    forward_price: f64,
    nominal_t1: f64,
    nominal_t2: f64,
) -> f64 {
    let dt = t2 - t1;
    let realized_rate = (realized_ratio - 1.0) / dt;
    dt * (strike - realized_rate) + realized_ratio - forward_price * nominal_t1 / nominal_t2
}
