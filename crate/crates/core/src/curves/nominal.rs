use serde::{Deserialize, Serialize};

use super::interp::{Interpolation, LogDiscountCurve};
use super::TenorGrid;
use crate::error::{Error, Result};

/// Market input for one nominal curve node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pillar {
    DiscountFactor(f64),
    /// Continuously compounded zero rate.
    ZeroRate(f64),
}

/// Nominal discount factors `P(0,T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalCurve {
    curve: LogDiscountCurve,
}

/// Builds a nominal curve reproducing every pillar exactly.
///
/// Discount factors must be strictly decreasing in maturity: a flat or
/// increasing segment implies a non-positive nominal rate.
pub fn build_nominal_curve(
    pillars: &[(f64, Pillar)],
    interp: Interpolation,
) -> Result<NominalCurve> {
    let mut nodes = Vec::with_capacity(pillars.len());
    let mut prev = (0.0, 1.0);
    for &(t, p) in pillars {
        let df = match p {
            Pillar::DiscountFactor(df) => df,
            Pillar::ZeroRate(r) => (-r * t).exp(),
        };
        if !(df > 0.0 && df <= 1.0) {
            return Err(Error::invalid(format!(
                "nominal discount factor at T={t} must lie in (0, 1], got {df}"
            )));
        }
        if t > prev.0 && df >= prev.1 {
            return Err(Error::invalid(format!(
                "nominal discount factors must decrease: P({})={} then P({t})={df}",
                prev.0, prev.1
            )));
        }
        prev = (t, df);
        nodes.push((t, df));
    }
    Ok(NominalCurve {
        curve: LogDiscountCurve::new(&nodes, interp)?,
    })
}

impl NominalCurve {
    /// Flat continuously compounded zero curve with pillars every `step`
    /// years out to `horizon`.
    pub fn flat(rate: f64, step: f64, horizon: f64) -> Result<Self> {
        if !(step > 0.0 && horizon >= step) {
            return Err(Error::invalid("flat curve needs 0 < step <= horizon"));
        }
        let n = (horizon / step).round() as usize;
        let pillars: Vec<_> = (1..=n)
            .map(|i| (i as f64 * step, Pillar::ZeroRate(rate)))
            .collect();
        build_nominal_curve(&pillars, Interpolation::LogLinear)
    }

    /// `P(0,T)`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        self.curve.discount(t)
    }

    /// Simply compounded forward rate over `[t1, t2]`.
    pub fn forward_rate(&self, t1: f64, t2: f64) -> Result<f64> {
        if t2 <= t1 {
            return Err(Error::invalid(format!(
                "forward period [{t1}, {t2}] is empty"
            )));
        }
        Ok((self.discount(t1)? / self.discount(t2)? - 1.0) / (t2 - t1))
    }

    /// LIBOR-style forwards `f_k(0)` for `k = 0..N-1` on `grid`; period `k`
    /// spans `[T_k, T_{k+1}]`. Periods that fixed before the valuation date
    /// are reported as the forward over their remaining stub.
    pub fn forwards_on(&self, grid: &TenorGrid) -> Result<Vec<f64>> {
        (0..grid.periods())
            .map(|k| {
                let start = grid.date(k).max(0.0);
                let end = grid.date(k + 1);
                let df = self.discount(start)? / self.discount(end)?;
                Ok((df - 1.0) / grid.accrual(k + 1))
            })
            .collect()
    }

    pub fn last_pillar(&self) -> f64 {
        self.curve.last_pillar()
    }

    pub fn support_end(&self) -> f64 {
        self.curve.support_end()
    }

    pub fn pillars(&self) -> Vec<(f64, f64)> {
        self.curve.pillars().collect()
    }
}
