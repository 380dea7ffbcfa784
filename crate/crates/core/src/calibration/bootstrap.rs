use serde::{Deserialize, Serialize};

use crate::curves::{InflationCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::math::brent;
use crate::pricing::{displace, displaced_caplet};

/// Market cap quote; `price` is per unit notional (decimal, not bps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapQuote {
    pub maturity: f64,
    pub strike: f64,
    pub price: f64,
}

/// Caplets `from+1..=to` priced together at one volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapletStrip {
    pub from: usize,
    pub to: usize,
    /// `Cap(T_to) - Cap(T_from)`.
    pub price: f64,
    pub vol: f64,
}

/// Implied caplet volatilities `σ_j` for `j = 1..=N` (index `j - 1`), with
/// the strips they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapletVols {
    pub strike: f64,
    pub vols: Vec<f64>,
    pub strips: Vec<CapletStrip>,
}

struct Caplet {
    accrual: f64,
    discount: f64,
    forward: f64,
    /// Time over which the volatility accrues.
    expiry: f64,
}

/// Implied caplet volatilities from caps at a single strike.
///
/// Caps with consecutive quoted maturities `T_a < T_b` differ by the
/// caplets `a+1..=b`, which share one volatility; the caplets before the
/// first quoted maturity share the first cap's volatility. Every input cap
/// is repriced exactly by the returned volatilities.
pub fn bootstrap_caplet_vols(
    curves: &InflationCurve,
    grid: &TenorGrid,
    quotes: &[CapQuote],
) -> Result<CapletVols> {
    let first = quotes
        .first()
        .ok_or_else(|| Error::invalid("no cap quotes to bootstrap"))?;
    let strike = first.strike;
    if quotes.iter().any(|q| (q.strike - strike).abs() > 1e-12) {
        return Err(Error::invalid("cap quotes must share a single strike"));
    }
    let live = grid.first_live();
    let mut vols = vec![f64::NAN; grid.periods()];
    let mut strips = Vec::new();
    let mut prev_index = live - 1;
    let mut prev_maturity = grid.date(prev_index).max(0.0);
    let mut prev_price = 0.0;
    for q in quotes {
        if !(q.price.is_finite() && q.price >= 0.0) {
            return Err(Error::invalid(format!(
                "cap price {} at T = {} is invalid",
                q.price, q.maturity
            )));
        }
        let b = grid.require_index(q.maturity)?;
        if b <= prev_index {
            return Err(Error::invalid(format!(
                "cap maturities must increase: {} after {prev_maturity}",
                q.maturity
            )));
        }
        let strip_price = q.price - prev_price;
        if strip_price < 0.0 {
            return Err(Error::CalendarArbitrage {
                from: prev_maturity,
                to: q.maturity,
                strip_price,
            });
        }
        let caplets = (prev_index + 1..=b)
            .map(|j| -> Result<Caplet> {
                let t = grid.date(j);
                Ok(Caplet {
                    accrual: grid.accrual(j),
                    discount: curves.nominal().discount(t)?,
                    forward: curves.inflation_forward(grid.date(j - 1), t)?,
                    expiry: t,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let vol = strip_vol(&caplets, strike, strip_price)?;
        for j in prev_index + 1..=b {
            vols[j - 1] = vol;
        }
        strips.push(CapletStrip {
            from: prev_index,
            to: b,
            price: strip_price,
            vol,
        });
        prev_index = b;
        prev_maturity = q.maturity;
        prev_price = q.price;
    }
    vols.truncate(prev_index);
    Ok(CapletVols {
        strike,
        vols,
        strips,
    })
}

fn strip_price(caplets: &[Caplet], strike: f64, vol: f64) -> Result<f64> {
    caplets
        .iter()
        .map(|c| {
            displaced_caplet(
                c.accrual,
                c.discount,
                c.forward,
                strike,
                vol * vol * c.expiry,
            )
        })
        .sum()
}

fn strip_vol(caplets: &[Caplet], strike: f64, price: f64) -> Result<f64> {
    let mut lower = 0.0;
    let mut upper = 0.0;
    for c in caplets {
        let (mu, k) = displace(c.accrual, c.forward, strike)?;
        lower += c.accrual * c.discount * (mu - k).max(0.0);
        upper += c.accrual * c.discount * mu;
    }
    let slack = 1e-14 * upper;
    if !(price >= lower - slack && price < upper) {
        return Err(Error::BandViolation {
            price,
            lower,
            upper,
        });
    }
    if price <= lower + slack {
        if lower > 0.0 {
            // a strip worth only its intrinsic value with the forward in
            // the money would need zero volatility: reject as degenerate
            return Err(Error::BandViolation {
                price,
                lower,
                upper,
            });
        }
        return Ok(0.0);
    }
    let f = |v: f64| {
        strip_price(caplets, strike, v)
            .map(|p| p - price)
            .unwrap_or(f64::NAN)
    };
    let mut hi = 0.01;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 100.0 {
            return Err(Error::Numerical(format!(
                "no volatility reaches strip price {price}"
            )));
        }
    }
    brent(f, 0.0, hi, 1e-17, 300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{inflation_discount, NominalCurve, RealCurve};
    use crate::model::VolSurface;
    use crate::pricing::price_cap;

    fn curves() -> InflationCurve {
        let n = NominalCurve::flat(0.04, 1.0, 12.0).unwrap();
        let mut pi = 1.0;
        let mut pillars = Vec::new();
        for i in 1..=10 {
            pi /= 1.0 + 0.021 + 0.0004 * i as f64;
            pillars.push((i as f64, n.discount(i as f64).unwrap() / pi));
        }
        inflation_discount(&n, &RealCurve::from_pillars(&pillars).unwrap())
    }

    #[test]
    fn reprices_every_cap() {
        let c = curves();
        let g = TenorGrid::uniform(1.0, 10).unwrap();
        let truth = VolSurface::from_fn(
            g.clone(),
            1,
            |_, _| vec![0.0],
            |j, _| vec![0.004 + 0.0003 * j as f64],
        )
        .unwrap();
        let quotes: Vec<CapQuote> = [2, 3, 5, 7, 10]
            .iter()
            .map(|&n| CapQuote {
                maturity: n as f64,
                strike: 0.02,
                price: price_cap(&c, &truth, n, 0.02, 1.0).unwrap(),
            })
            .collect();
        let b = bootstrap_caplet_vols(&c, &g, &quotes).unwrap();
        assert_eq!(b.vols.len(), 10);
        assert_eq!(b.vols[0], b.vols[1]);
        assert_eq!(b.vols[5], b.vols[6]);
        let fitted =
            VolSurface::from_fn(g, 1, |_, _| vec![0.0], |j, _| vec![b.vols[j - 1]]).unwrap();
        for q in &quotes {
            let p = price_cap(&c, &fitted, q.maturity as usize, 0.02, 1.0).unwrap();
            assert!((p - q.price).abs() < 1e-15, "{} {}", p, q.price);
        }
        // a single-caplet strip recovers the generating vol
        let s4 = b.strips.iter().find(|s| s.to == 3).unwrap();
        assert!((s4.vol - 0.0049).abs() < 1e-10);
    }

    #[test]
    fn calendar_arbitrage_names_the_pair() {
        let c = curves();
        let g = TenorGrid::uniform(1.0, 10).unwrap();
        let q = [
            CapQuote {
                maturity: 2.0,
                strike: 0.02,
                price: 0.0102,
            },
            CapQuote {
                maturity: 3.0,
                strike: 0.02,
                price: 0.0100,
            },
        ];
        match bootstrap_caplet_vols(&c, &g, &q) {
            Err(Error::CalendarArbitrage { from, to, .. }) => assert_eq!((from, to), (2.0, 3.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_strip_in_the_money_is_rejected() {
        let c = curves();
        let g = TenorGrid::uniform(1.0, 10).unwrap();
        let q = [CapQuote {
            maturity: 2.0,
            strike: 0.02,
            price: 0.0,
        }];
        assert!(matches!(
            bootstrap_caplet_vols(&c, &g, &q),
            Err(Error::BandViolation { .. })
        ));
    }
}
