use crate::error::{Error, Result};
use crate::math::{brent, norm_cdf};

/// Undiscounted Black call on a lognormal `forward` with total standard
/// deviation `sd = σ√τ`. Zero deviation gives the intrinsic value.
pub fn black_call(forward: f64, strike: f64, sd: f64) -> f64 {
    if sd <= 0.0 {
        return (forward - strike).max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd)
}

/// Undiscounted Black put; see [`black_call`].
pub fn black_put(forward: f64, strike: f64, sd: f64) -> f64 {
    if sd <= 0.0 {
        return (strike - forward).max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    strike * norm_cdf(sd - d1) - forward * norm_cdf(-d1)
}

/// Displaced forward `μ = f + 1/ΔT` and strike `K̃ = K + 1/ΔT`, rejecting
/// a non-positive displaced strike.
pub fn displace(accrual: f64, forward: f64, strike: f64) -> Result<(f64, f64)> {
    if !(accrual > 0.0) {
        return Err(Error::invalid(format!(
            "accrual {accrual} must be positive"
        )));
    }
    let mu = forward + 1.0 / accrual;
    let k = strike + 1.0 / accrual;
    if !(k > 0.0) {
        return Err(Error::invalid(format!(
            "displaced strike {strike} + 1/{accrual} is not positive"
        )));
    }
    if !(mu > 0.0) {
        return Err(Error::invalid(format!(
            "displaced forward {forward} + 1/{accrual} is not positive"
        )));
    }
    Ok((mu, k))
}

/// Unit-notional caplet on the simple inflation rate over a period of
/// length `accrual`, paid at a date with discount factor `discount`:
/// `ΔT·P·[μΦ(d1) - K̃Φ(d2)]`, `total_var` being `σ²T`.
pub fn displaced_caplet(
    accrual: f64,
    discount: f64,
    forward: f64,
    strike: f64,
    total_var: f64,
) -> Result<f64> {
    let (mu, k) = displace(accrual, forward, strike)?;
    Ok(accrual * discount * black_call(mu, k, total_var.max(0.0).sqrt()))
}

/// Floorlet counterpart of [`displaced_caplet`].
pub fn displaced_floorlet(
    accrual: f64,
    discount: f64,
    forward: f64,
    strike: f64,
    total_var: f64,
) -> Result<f64> {
    let (mu, k) = displace(accrual, forward, strike)?;
    Ok(accrual * discount * black_put(mu, k, total_var.max(0.0).sqrt()))
}

/// Total standard deviation `σ√T` at which a unit-notional displaced call
/// `scale · Black(μ, K̃, sd)` is worth `price`.
///
/// Prices must lie in `[scale·(μ-K̃)^+, scale·μ]`; outside that band no
/// volatility reproduces them.
pub fn implied_total_sd(scale: f64, mu: f64, k: f64, price: f64) -> Result<f64> {
    let lower = scale * (mu - k).max(0.0);
    let upper = scale * mu;
    let slack = 1e-14 * upper;
    if !(price >= lower - slack && price < upper) {
        return Err(Error::BandViolation {
            price,
            lower,
            upper,
        });
    }
    if price <= lower + slack {
        return Ok(0.0);
    }
    let f = |sd: f64| scale * black_call(mu, k, sd) - price;
    let mut hi = 0.05;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 40.0 {
            return Err(Error::Numerical(format!(
                "no volatility reaches price {price}"
            )));
        }
    }
    brent(f, 0.0, hi, 1e-16, 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vol_is_intrinsic() {
        let c = displaced_caplet(1.0, 0.95, 0.03, 0.02, 0.0).unwrap();
        assert!((c - 0.0095).abs() < 1e-16);
        assert_eq!(displaced_floorlet(1.0, 0.95, 0.03, 0.02, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn at_the_money_displaced() {
        // μ = K̃ and σ√T = 0.01: ΔT·P·μ·(2Φ(0.005) - 1), Φ(0.005) from mpmath
        let mu = 1.02;
        let c = displaced_caplet(1.0, 0.9, 0.02, 0.02, 1e-4).unwrap();
        let want = 0.9 * mu * (2.0 * 0.501_994_703_090_740_82 - 1.0);
        assert!((c - want).abs() < 1e-15);
        assert!((want / (0.9 * mu) - 0.003_989_406_181_481_64).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_displaced_strike() {
        assert!(displaced_caplet(0.5, 0.9, 0.02, -2.0, 1e-4).is_err());
        assert!(displaced_caplet(0.5, 0.9, 0.02, -1.9, 1e-4).is_ok());
    }

    #[test]
    fn implied_sd_round_trip_and_band() {
        let (mu, k) = (1.025, 1.02);
        let p = 0.93 * black_call(mu, k, 0.005 * 3f64.sqrt());
        let sd = implied_total_sd(0.93, mu, k, p).unwrap();
        assert!((sd / 3f64.sqrt() - 0.005).abs() < 1e-10);
        assert_eq!(implied_total_sd(0.93, mu, k, 0.93 * 0.005).unwrap(), 0.0);
        assert!(matches!(
            implied_total_sd(0.93, mu, k, 0.93 * 1.1),
            Err(Error::BandViolation { .. })
        ));
        assert!(matches!(
            implied_total_sd(0.93, mu, k, 0.001),
            Err(Error::BandViolation { .. })
        ));
    }
}
