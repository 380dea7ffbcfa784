use serde::{Deserialize, Serialize};

use crate::curves::{InflationCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::model::VolSurface;
use crate::pricing::black::{black_call, displace};

/// Forward year-on-year swap rate over `[T_m, T_n]` and its decomposition
/// into displaced inflation forwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapRateView {
    pub start: usize,
    pub end: usize,
    /// `S_{m,n}(0)`.
    pub rate: f64,
    /// `A_{m,n}(0) = Σ ΔT_i P(0,T_i)`.
    pub annuity: f64,
    /// `ω_i = ΔT_i P(0,T_i) / A`, `i = m+1..=n`.
    pub weights: Vec<f64>,
    /// `α_i = ω_i μ_i / Σ ω_k μ_k`.
    pub displaced_weights: Vec<f64>,
    /// `1/ΔT_{m,n} = Σ ω_i / ΔT_i`.
    pub displacement: f64,
    /// `μ_i(0)`.
    pub displaced: Vec<f64>,
}

impl SwapRateView {
    /// `S_{m,n} + 1/ΔT_{m,n}`.
    pub fn displaced_rate(&self) -> f64 {
        self.rate + self.displacement
    }

    /// Swap value per unit notional for fixed rate `strike`, receiving the
    /// inflation leg: `A (S - K)`.
    pub fn value(&self, strike: f64) -> f64 {
        self.annuity * (self.rate - strike)
    }
}

/// Checks `0 <= m < n <= N` and that `T_m` is not before the valuation
/// date.
pub(crate) fn check_span(grid: &TenorGrid, m: usize, n: usize) -> Result<()> {
    if !(m < n && n <= grid.periods()) {
        return Err(Error::invalid(format!(
            "swap span ({m}, {n}) is empty or outside a {}-period grid",
            grid.periods()
        )));
    }
    Ok(())
}

pub fn swap_rate_view(
    curves: &InflationCurve,
    grid: &TenorGrid,
    m: usize,
    n: usize,
) -> Result<SwapRateView> {
    check_span(grid, m, n)?;
    if grid.date(m) < 0.0 {
        return Err(Error::invalid(format!(
            "swap start T_{m} = {} is in the past",
            grid.date(m)
        )));
    }
    let mut level = Vec::new();
    let mut fwd = Vec::new();
    for i in m + 1..=n {
        level.push(grid.accrual(i) * curves.nominal().discount(grid.date(i))?);
        fwd.push(curves.inflation_forward(grid.date(i - 1), grid.date(i))?);
    }
    let annuity: f64 = level.iter().sum();
    let weights: Vec<f64> = level.iter().map(|l| l / annuity).collect();
    let displaced: Vec<f64> = (m + 1..=n)
        .zip(&fwd)
        .map(|(i, f)| f + 1.0 / grid.accrual(i))
        .collect();
    if let Some(mu) = displaced.iter().find(|mu| **mu <= 0.0) {
        return Err(Error::invalid(format!(
            "displaced inflation forward {mu} is not positive"
        )));
    }
    let rate = weights.iter().zip(&fwd).map(|(w, f)| w * f).sum();
    let displacement = (m + 1..=n)
        .zip(&weights)
        .map(|(i, w)| w / grid.accrual(i))
        .sum();
    let norm: f64 = weights.iter().zip(&displaced).map(|(w, mu)| w * mu).sum();
    let displaced_weights = weights
        .iter()
        .zip(&displaced)
        .map(|(w, mu)| w * mu / norm)
        .collect();
    Ok(SwapRateView {
        start: m,
        end: n,
        rate,
        annuity,
        weights,
        displaced_weights,
        displacement,
        displaced,
    })
}

/// Frozen-coefficient variance of the displaced swap rate, split per
/// period so that it can be re-evaluated for new inflation loadings.
///
/// Over period `p` the swap-rate loading is
/// `Σ_i α_i γ^(I)_i + c_p` with `c_p = Σ_i (α_i - ω_i) Σ_i`, all weights and
/// bond-volatility drift weights taken at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SwaptionVariance {
    pub start: usize,
    pub end: usize,
    /// `α_i` for `i = m+1..=n`.
    pub alphas: Vec<f64>,
    /// `(p, τ_p, c_p)` for each live period before expiry.
    pub periods: Vec<(usize, f64, Vec<f64>)>,
}

impl SwaptionVariance {
    pub fn new(view: &SwapRateView, vols: &VolSurface, nominal_forwards: &[f64]) -> Result<Self> {
        let grid = vols.grid();
        let (m, n) = (view.start, view.end);
        check_span(grid, m, n)?;
        let d = vols.factors();
        let mut periods = Vec::new();
        for p in 1..=m {
            let (a, b) = grid.live_span(p);
            if b <= a {
                continue;
            }
            let mut c = vec![0.0; d];
            // Σ_i over period p: -Σ_{k=p}^{i-1} w_k γ_k, accumulated in i
            let mut sig = vec![0.0; d];
            for k in p..n {
                let x = grid.accrual(k + 1) * nominal_forwards[k];
                let w = x / (1.0 + x);
                for (s, g) in sig.iter_mut().zip(vols.nominal_loading(k, p)) {
                    *s -= w * g;
                }
                let i = k + 1;
                if i > m {
                    let coef = view.displaced_weights[i - m - 1] - view.weights[i - m - 1];
                    for (cc, s) in c.iter_mut().zip(&sig) {
                        *cc += coef * s;
                    }
                }
            }
            periods.push((p, b - a, c));
        }
        Ok(Self {
            start: m,
            end: n,
            alphas: view.displaced_weights.clone(),
            periods,
        })
    }

    /// Swap-rate loading over period `p` for the surface `vols`.
    pub fn loading(&self, vols: &VolSurface, p: usize, nominal_part: &[f64]) -> Vec<f64> {
        let mut v = nominal_part.to_vec();
        for (idx, a) in self.alphas.iter().enumerate() {
            let i = self.start + 1 + idx;
            for (x, g) in v.iter_mut().zip(vols.inflation_loading(i, p)) {
                *x += a * g;
            }
        }
        v
    }

    /// `σ²_{m,n} T_m`, summed exactly over the periods.
    pub fn total_variance(&self, vols: &VolSurface) -> f64 {
        self.periods
            .iter()
            .map(|(p, tau, c)| tau * self.loading(vols, *p, c).iter().map(|x| x * x).sum::<f64>())
            .sum()
    }
}

/// Year-on-year swaption price and the implied volatility it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwaptionQuote {
    pub price: f64,
    /// `σ_{m,n}`, annualised over `[0, T_m]`.
    pub vol: f64,
    /// Hedge ratio `Φ(d1)` in the underlying swap.
    pub delta: f64,
}

/// Payer year-on-year swaption expiring at `T_m` on the swap over
/// `[T_m, T_n]`; correlations enter through the factor loadings of `vols`.
pub fn price_swaption(
    curves: &InflationCurve,
    vols: &VolSurface,
    m: usize,
    n: usize,
    strike: f64,
    notional: f64,
) -> Result<SwaptionQuote> {
    let grid = vols.grid();
    check_span(grid, m, n)?;
    let expiry = grid.date(m);
    if !(expiry > 0.0) {
        return Err(Error::invalid(format!(
            "swaption expiry T_{m} = {expiry} must be after today"
        )));
    }
    let view = swap_rate_view(curves, grid, m, n)?;
    let fwd = curves.nominal().forwards_on(grid)?;
    let var = SwaptionVariance::new(&view, vols, &fwd)?.total_variance(vols);
    let (mu, k) = displace(1.0 / view.displacement, view.rate, strike)?;
    let sd = var.sqrt();
    let price = notional * view.annuity * black_call(mu, k, sd);
    let delta = if sd > 0.0 {
        crate::math::norm_cdf(((mu / k).ln() + 0.5 * var) / sd)
    } else if mu > k {
        1.0
    } else {
        0.0
    };
    Ok(SwaptionQuote {
        price,
        vol: (var / expiry).sqrt(),
        delta,
    })
}
