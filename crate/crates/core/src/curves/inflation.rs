use serde::{Deserialize, Serialize};

use super::{NominalCurve, RealCurve, TenorGrid};
use crate::error::{Error, Result};

const FIXING_TOL: f64 = 1e-9;

/// Published CPI levels at dates on or before the valuation date.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CpiFixings {
    points: Vec<(f64, f64)>,
}

impl CpiFixings {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        for &(d, level) in &points {
            if !(d.is_finite() && d <= 0.0) {
                return Err(Error::invalid(format!(
                    "CPI fixing date {d} must not be after the valuation date"
                )));
            }
            if !(level.is_finite() && level > 0.0) {
                return Err(Error::invalid(format!(
                    "CPI level at {d} must be positive, got {level}"
                )));
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[1].0 - w[0].0 <= FIXING_TOL) {
            return Err(Error::invalid(format!(
                "duplicate CPI fixing at {}",
                w[0].0
            )));
        }
        Ok(Self { points })
    }

    /// `I(date)`; dates between fixings are not interpolated.
    pub fn level(&self, date: f64) -> Result<f64> {
        self.points
            .iter()
            .find(|(d, _)| (d - date).abs() <= FIXING_TOL)
            .map(|&(_, l)| l)
            .ok_or(Error::FixingRequired { date })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Inflation discount factors `P_I(0,T) = P(0,T) / P_R(0,T)`.
///
/// For maturities already reached the discount factor is frozen at its
/// value on the maturity date, `P_I(0,T) = I(0)/I(T)`, which needs
/// published fixings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflationCurve {
    nominal: NominalCurve,
    real: RealCurve,
    fixings: CpiFixings,
}

pub fn inflation_discount(nominal: &NominalCurve, real: &RealCurve) -> InflationCurve {
    InflationCurve {
        nominal: nominal.clone(),
        real: real.clone(),
        fixings: CpiFixings::default(),
    }
}

impl InflationCurve {
    pub fn with_fixings(mut self, fixings: CpiFixings) -> Self {
        self.fixings = fixings;
        self
    }

    pub fn nominal(&self) -> &NominalCurve {
        &self.nominal
    }

    pub fn real(&self) -> &RealCurve {
        &self.real
    }

    pub fn fixings(&self) -> &CpiFixings {
        &self.fixings
    }

    /// `P_I(0,T)`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        if t > 0.0 {
            Ok(self.nominal.discount(t)? / self.real.discount(t)?)
        } else if t == 0.0 {
            Ok(1.0)
        } else {
            Ok(self.fixings.level(0.0)? / self.fixings.level(t)?)
        }
    }

    /// `P_I(0,T_0,T)`, the inflation discount factor against CPI base `t0`.
    pub fn discount_from_base(&self, t0: f64, t: f64) -> Result<f64> {
        if t0 == 0.0 {
            return self.discount(t);
        }
        Ok(self.fixings.level(t0)? / self.fixings.level(0.0)? * self.discount(t)?)
    }

    /// `I(date)` for published dates.
    pub fn cpi(&self, date: f64) -> Result<f64> {
        self.fixings.level(date)
    }

    /// Simple inflation forward rate over `[t1, t2]`:
    /// `(P_I(0,t1) / P_I(0,t2) - 1) / (t2 - t1)`.
    ///
    /// A period that has fully elapsed returns its realised rate
    /// `(I(t2)/I(t1) - 1) / (t2 - t1)`.
    pub fn inflation_forward(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 < t2) {
            return Err(Error::invalid(format!(
                "inflation forward needs T1 < T2, got T1={t1}, T2={t2}"
            )));
        }
        let ratio = if t2 <= 0.0 {
            self.fixings.level(t2)? / self.fixings.level(t1)?
        } else {
            self.discount(t1)? / self.discount(t2)?
        };
        Ok((ratio - 1.0) / (t2 - t1))
    }

    /// `f^(I)_j(0)` for `j = 1..=N`, returned with index `j - 1`.
    pub fn forwards_on(&self, grid: &TenorGrid) -> Result<Vec<f64>> {
        (1..=grid.periods())
            .map(|j| self.inflation_forward(grid.date(j - 1), grid.date(j)))
            .collect()
    }
}
