use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Queries are answered up to this multiple of the last pillar maturity.
pub const EXTRAPOLATION_LIMIT: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Linear in `ln P`: piecewise-constant instantaneous forwards.
    #[default]
    LogLinear,
    /// Linear in the continuously compounded zero rate `-ln P / T`.
    LinearZero,
}

/// Discount-factor term structure stored as `ln P` at pillar dates, with
/// `P(0) = 1` as the first node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct LogDiscountCurve {
    times: Vec<f64>,
    log_df: Vec<f64>,
    rule: Interpolation,
}

impl LogDiscountCurve {
    /// `pillars` must be strictly increasing positive maturities with
    /// positive discount factors.
    pub fn new(pillars: &[(f64, f64)], rule: Interpolation) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::invalid("curve needs at least one pillar"));
        }
        let mut times = Vec::with_capacity(pillars.len() + 1);
        let mut log_df = Vec::with_capacity(pillars.len() + 1);
        times.push(0.0);
        log_df.push(0.0);
        for &(t, df) in pillars {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(format!(
                    "pillar maturity must be positive, got {t}"
                )));
            }
            if !(df.is_finite() && df > 0.0) {
                return Err(Error::invalid(format!(
                    "discount factor at T={t} must be positive and finite, got {df}"
                )));
            }
            let prev = *times.last().unwrap();
            if t <= prev {
                return Err(Error::invalid(format!(
                    "pillar maturities must be strictly increasing (duplicate or out of order at T={t})"
                )));
            }
            times.push(t);
            log_df.push(df.ln());
        }
        Ok(Self {
            times,
            log_df,
            rule,
        })
    }

    pub fn last_pillar(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn support_end(&self) -> f64 {
        EXTRAPOLATION_LIMIT * self.last_pillar()
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.log_df)
            .skip(1)
            .map(|(&t, &l)| (t, l.exp()))
    }

    pub fn log_discount(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid(format!(
                "discount query at negative or non-finite T={t}"
            )));
        }
        let last = self.last_pillar();
        if t > self.support_end() {
            return Err(Error::OutOfSupport {
                t,
                max: self.support_end(),
            });
        }
        let n = self.times.len();
        if t >= last {
            // flat instantaneous forward continuing the last segment
            let slope =
                (self.log_df[n - 1] - self.log_df[n - 2]) / (self.times[n - 1] - self.times[n - 2]);
            return Ok(self.log_df[n - 1] + slope * (t - last));
        }
        // first node with time > t
        let hi = self.times.partition_point(|&x| x <= t);
        let lo = hi - 1;
        let (t0, t1) = (self.times[lo], self.times[hi]);
        let w = (t - t0) / (t1 - t0);
        Ok(match self.rule {
            Interpolation::LogLinear => self.log_df[lo] + w * (self.log_df[hi] - self.log_df[lo]),
            Interpolation::LinearZero => {
                let z1 = -self.log_df[hi] / t1;
                let z0 = if lo == 0 { z1 } else { -self.log_df[lo] / t0 };
                -(z0 + w * (z1 - z0)) * t
            }
        })
    }

    pub fn discount(&self, t: f64) -> Result<f64> {
        self.log_discount(t).map(f64::exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_linear_midpoint() {
        let c =
            LogDiscountCurve::new(&[(1.0, 0.96), (2.0, 0.92)], Interpolation::LogLinear).unwrap();
        let want = ((0.96f64.ln() + 0.92f64.ln()) / 2.0).exp();
        assert!((c.discount(1.5).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.939_787).abs() < 1e-6);
    }

    #[test]
    fn extrapolates_flat_forward_then_rejects() {
        let c =
            LogDiscountCurve::new(&[(1.0, 0.96), (2.0, 0.92)], Interpolation::LogLinear).unwrap();
        let fwd = (0.96f64 / 0.92).ln();
        let got = c.log_discount(2.5).unwrap();
        assert!((got - (0.92f64.ln() - 0.5 * fwd)).abs() < 1e-15);
        assert!(c.discount(2.5).is_ok());
        assert!(matches!(c.discount(2.51), Err(Error::OutOfSupport { .. })));
    }

    #[test]
    fn linear_zero_reproduces_pillars() {
        let c =
            LogDiscountCurve::new(&[(1.0, 0.96), (3.0, 0.88)], Interpolation::LinearZero).unwrap();
        assert!((c.discount(1.0).unwrap() - 0.96).abs() < 1e-15);
        assert!((c.discount(3.0).unwrap() - 0.88).abs() < 1e-15);
        let z = -(c.discount(2.0).unwrap().ln()) / 2.0;
        let z1 = -(0.96f64.ln());
        let z3 = -(0.88f64.ln()) / 3.0;
        assert!((z - 0.5 * (z1 + z3)).abs() < 1e-15);
    }
}
