use serde::{Deserialize, Serialize};

use crate::curves::{InflationCurve, NominalCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::model::VolSurface;

/// Initial state and volatilities of the joint forward-rate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketModel {
    surface: VolSurface,
    /// `f_k(0)`, `k = 0..N-1`.
    nominal_forwards: Vec<f64>,
    /// `f^(I)_j(0)` at index `j - 1`.
    inflation_forwards: Vec<f64>,
    /// `P(0, T_i)`; 1 for dates at or before the valuation date.
    discounts: Vec<f64>,
}

impl MarketModel {
    pub fn new(
        surface: VolSurface,
        nominal_forwards: Vec<f64>,
        inflation_forwards: Vec<f64>,
        discounts: Vec<f64>,
    ) -> Result<Self> {
        let grid = surface.grid();
        let n = grid.periods();
        if nominal_forwards.len() != n || inflation_forwards.len() != n || discounts.len() != n + 1
        {
            return Err(Error::invalid(format!(
                "model on {n} periods needs {n} nominal forwards, {n} inflation forwards and {} discount factors",
                n + 1
            )));
        }
        for (k, &f) in nominal_forwards.iter().enumerate() {
            if grid.date(k) >= 0.0 && !(f > 0.0) {
                return Err(Error::invalid(format!(
                    "nominal forward f_{k} = {f} must be positive for the lognormal dynamics"
                )));
            }
        }
        for (idx, &fi) in inflation_forwards.iter().enumerate() {
            let j = idx + 1;
            if !(fi.is_finite() && fi + 1.0 / grid.accrual(j) > 0.0) {
                return Err(Error::invalid(format!(
                    "inflation forward f^(I)_{j} = {fi} is at or below -1/ΔT"
                )));
            }
        }
        if discounts.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::invalid("discount factors must be positive"));
        }
        Ok(Self {
            surface,
            nominal_forwards,
            inflation_forwards,
            discounts,
        })
    }

    /// Initial forwards and discount factors read off the curves on the
    /// surface's grid.
    pub fn from_curves(surface: VolSurface, curves: &InflationCurve) -> Result<Self> {
        let grid = surface.grid().clone();
        let nominal = curves.nominal().forwards_on(&grid)?;
        let inflation = curves.forwards_on(&grid)?;
        let discounts = grid
            .dates()
            .iter()
            .map(|&t| {
                if t <= 0.0 {
                    Ok(1.0)
                } else {
                    curves.nominal().discount(t)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(surface, nominal, inflation, discounts)
    }

    pub fn surface(&self) -> &VolSurface {
        &self.surface
    }

    pub fn grid(&self) -> &TenorGrid {
        self.surface.grid()
    }

    pub fn nominal_forwards(&self) -> &[f64] {
        &self.nominal_forwards
    }

    pub fn inflation_forwards(&self) -> &[f64] {
        &self.inflation_forwards
    }

    /// `μ_j(0) = f^(I)_j(0) + 1/ΔT_j`.
    pub fn displaced(&self, j: usize) -> f64 {
        self.inflation_forwards[j - 1] + 1.0 / self.grid().accrual(j)
    }

    /// `P(0, T_i)`.
    pub fn discount(&self, i: usize) -> f64 {
        self.discounts[i]
    }

    /// Model restricted to the first `n` periods.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Self::new(
            self.surface.truncated(n)?,
            self.nominal_forwards[..n].to_vec(),
            self.inflation_forwards[..n].to_vec(),
            self.discounts[..=n].to_vec(),
        )
    }

    pub fn with_surface(&self, surface: VolSurface) -> Result<Self> {
        if surface.grid() != self.grid() {
            return Err(Error::invalid(
                "replacement surface lives on a different grid",
            ));
        }
        Self::new(
            surface,
            self.nominal_forwards.clone(),
            self.inflation_forwards.clone(),
            self.discounts.clone(),
        )
    }
}

/// `Σ_j(t)`, the volatility of `P(t, T_j)`, with drift weights taken from
/// the forwards in `forwards` (`f_k` at index `k`):
///
/// `Σ_j(t) = -Σ_{k=η_t}^{j-1} ΔT_{k+1} f_k / (1 + ΔT_{k+1} f_k) · γ_k(t)`.
pub fn bond_vol_from_forwards(
    vols: &VolSurface,
    forwards: &[f64],
    j: usize,
    t: f64,
) -> Result<Vec<f64>> {
    let grid = vols.grid();
    if j > grid.periods() {
        return Err(Error::invalid(format!(
            "bond index {j} outside a grid of {} periods",
            grid.periods()
        )));
    }
    if forwards.len() < j {
        return Err(Error::invalid(format!(
            "need {j} forwards, got {}",
            forwards.len()
        )));
    }
    if !(t >= 0.0 && t < grid.date(j)) {
        return Err(Error::invalid(format!(
            "bond vol needs 0 <= t < T_{j} = {}, got t = {t}",
            grid.date(j)
        )));
    }
    let eta = grid.eta(t).expect("t < T_j lies inside the grid");
    let mut out = vec![0.0; vols.factors()];
    for k in eta..j {
        let x = grid.accrual(k + 1) * forwards[k];
        let w = x / (1.0 + x);
        for (o, g) in out.iter_mut().zip(vols.nominal_loading(k, eta)) {
            *o -= w * g;
        }
    }
    Ok(out)
}

/// `Σ_j(t)` with drift weights frozen at the time-0 forwards of `nominal`.
pub fn nominal_bond_vol(
    vols: &VolSurface,
    nominal: &NominalCurve,
    j: usize,
    t: f64,
) -> Result<Vec<f64>> {
    let forwards = nominal.forwards_on(vols.grid())?;
    bond_vol_from_forwards(vols, &forwards, j, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CorrelationSpec;

    #[test]
    fn single_period_bond_vol() {
        // Σ_1 on a one-period grid needs f_0 live over [0, T_1); on a grid
        // starting at 0 that forward has just fixed, so shift the grid.
        let grid = TenorGrid::seasoned(vec![-0.5, 0.5, 1.5]).unwrap();
        let vols = VolSurface::from_fn(grid, 1, |_, _| vec![0.15], |_, _| vec![0.0]).unwrap();
        let s = bond_vol_from_forwards(&vols, &[0.04, 0.04], 2, 0.0).unwrap();
        assert!((s[0] + 0.04 / 1.04 * 0.15).abs() < 1e-15);
        assert!((s[0] + 0.005_769_230_769_230_769).abs() < 1e-15);
    }

    #[test]
    fn zero_forwards_give_zero_vol() {
        let grid = TenorGrid::uniform(1.0, 4).unwrap();
        let vols =
            VolSurface::from_fn(grid, 2, |_, _| vec![0.1, 0.2], |_, _| vec![0.0, 0.0]).unwrap();
        let s = bond_vol_from_forwards(&vols, &[0.0; 4], 4, 0.3).unwrap();
        assert_eq!(s, vec![0.0, 0.0]);
    }

    #[test]
    fn matches_loop_oracle() {
        let grid = TenorGrid::new(vec![0.0, 0.5, 1.25, 2.0, 3.0]).unwrap();
        let vols = VolSurface::two_factor(
            grid.clone(),
            |k, i| 0.1 + 0.01 * k as f64 - 0.003 * i as f64,
            |j, i| 0.004 + 0.0002 * (j * i) as f64,
            &CorrelationSpec::constant(0.3),
        )
        .unwrap();
        let fwd = [0.03, 0.031, 0.034, 0.036];
        let t = 0.7; // η = 2
        let s = bond_vol_from_forwards(&vols, &fwd, 4, t).unwrap();
        let mut want = 0.0;
        for k in 2..4 {
            let dt = grid.date(k + 1) - grid.date(k);
            want -= dt * fwd[k] / (1.0 + dt * fwd[k]) * (0.1 + 0.01 * k as f64 - 0.006);
        }
        assert!((s[0] - want).abs() < 1e-15);
        assert_eq!(s[1], 0.0);
        // P(t, T_η) carries no volatility
        assert_eq!(
            bond_vol_from_forwards(&vols, &fwd, 2, t).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn rejects_out_of_grid() {
        let grid = TenorGrid::uniform(1.0, 2).unwrap();
        let vols = VolSurface::from_fn(grid, 1, |_, _| vec![0.1], |_, _| vec![0.0]).unwrap();
        assert!(bond_vol_from_forwards(&vols, &[0.03, 0.03], 3, 0.0).is_err());
        assert!(bond_vol_from_forwards(&vols, &[0.03, 0.03], 1, 1.0).is_err());
    }
}
