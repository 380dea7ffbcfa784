use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DATE_TOL: f64 = 1e-9;

/// Payment/fixing schedule `T_0 < T_1 < ... < T_N` in year fractions from
/// the valuation date.
///
/// Period `j` (1-based) is `[T_{j-1}, T_j]` with accrual `ΔT_j`. A regular
/// grid starts at the valuation date; a seasoned grid starts in the past and
/// its first period straddles the valuation date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TenorGrid {
    dates: Vec<f64>,
}

impl TenorGrid {
    /// Grid starting at the valuation date (`T_0 = 0`).
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        match dates.first() {
            Some(0.0) => Self::validated(dates),
            Some(&t0) => Err(Error::invalid(format!(
                "grid must start at the valuation date (T_0 = 0), got {t0}; use TenorGrid::seasoned"
            ))),
            None => Err(Error::invalid("empty tenor grid")),
        }
    }

    /// Grid whose first date lies before the valuation date.
    pub fn seasoned(dates: Vec<f64>) -> Result<Self> {
        match dates.first() {
            Some(&t0) if t0 < 0.0 => Self::validated(dates),
            Some(&t0) => Err(Error::invalid(format!(
                "seasoned grid must start before the valuation date, got T_0 = {t0}"
            ))),
            None => Err(Error::invalid("empty tenor grid")),
        }
    }

    /// `0, step, 2*step, ..., periods*step`.
    pub fn uniform(step: f64, periods: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!(
                "grid step must be positive, got {step}"
            )));
        }
        Self::new((0..=periods).map(|i| i as f64 * step).collect())
    }

    fn validated(dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::invalid("tenor grid needs at least two dates"));
        }
        if dates.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("tenor grid dates must be finite"));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "tenor grid must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if *dates.last().unwrap() <= 0.0 {
            return Err(Error::invalid(
                "tenor grid has no date after the valuation date",
            ));
        }
        Ok(Self { dates })
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// `T_i`.
    pub fn date(&self, i: usize) -> f64 {
        self.dates[i]
    }

    /// Number of periods `N`.
    pub fn periods(&self) -> usize {
        self.dates.len() - 1
    }

    pub fn last_date(&self) -> f64 {
        self.dates[self.dates.len() - 1]
    }

    /// `ΔT_j = T_j - T_{j-1}` for `j in 1..=N`.
    pub fn accrual(&self, j: usize) -> f64 {
        assert!(
            j >= 1 && j <= self.periods(),
            "accrual index {j} out of range"
        );
        self.dates[j] - self.dates[j - 1]
    }

    pub fn is_seasoned(&self) -> bool {
        self.dates[0] < 0.0
    }

    /// `η_t = min{i : T_i > t}`, or `None` when `t` is at or past `T_N`.
    pub fn eta(&self, t: f64) -> Option<usize> {
        self.dates.iter().position(|&d| d > t)
    }

    /// First period still open at the valuation date.
    pub fn first_live(&self) -> usize {
        self.eta(0.0).expect("validated grid has a future date")
    }

    /// Index `i` with `T_i == t` (to within 1e-9 years).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.dates.iter().position(|&d| (d - t).abs() <= DATE_TOL)
    }

    pub fn require_index(&self, t: f64) -> Result<usize> {
        self.index_of(t)
            .ok_or_else(|| Error::invalid(format!("date {t} is not on the tenor grid")))
    }

    /// Part of period `i` lying on or after the valuation date.
    pub fn live_span(&self, i: usize) -> (f64, f64) {
        let start = self.dates[i - 1].max(0.0);
        let end = self.dates[i].max(0.0);
        (start, end)
    }

    /// Grid restricted to `T_0..=T_n`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.periods() {
            return Err(Error::invalid(format!(
                "cannot truncate a {}-period grid to {n} periods",
                self.periods()
            )));
        }
        Self::validated(self.dates[..=n].to_vec())
    }
}

impl TryFrom<Vec<f64>> for TenorGrid {
    type Error = Error;

    fn try_from(dates: Vec<f64>) -> Result<Self> {
        match dates.first() {
            Some(&t0) if t0 < 0.0 => Self::seasoned(dates),
            _ => Self::new(dates),
        }
    }
}

impl From<TenorGrid> for Vec<f64> {
    fn from(g: TenorGrid) -> Self {
        g.dates
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_and_nonzero_start() {
        assert!(TenorGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TenorGrid::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(TenorGrid::new(vec![0.5, 1.0]).is_err());
        assert!(TenorGrid::new(vec![0.0]).is_err());
        assert!(TenorGrid::seasoned(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn accruals_and_eta() {
        let g = TenorGrid::new(vec![0.0, 1.0, 2.5, 3.0]).unwrap();
        assert_eq!(g.periods(), 3);
        assert_eq!(g.accrual(2), 1.5);
        assert_eq!(g.eta(0.0), Some(1));
        assert_eq!(g.eta(1.0), Some(2));
        assert_eq!(g.eta(2.9), Some(3));
        assert_eq!(g.eta(3.0), None);
        assert_eq!(g.first_live(), 1);
    }

    #[test]
    fn seasoned_grid_live_spans() {
        let g = TenorGrid::seasoned(vec![-0.25, 0.75, 1.75]).unwrap();
        assert!(g.is_seasoned());
        assert_eq!(g.first_live(), 1);
        assert_eq!(g.live_span(1), (0.0, 0.75));
        assert_eq!(g.live_span(2), (0.75, 1.75));
    }

    #[test]
    fn serde_round_trip() {
        let g = TenorGrid::uniform(0.5, 4).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "[0.0,0.5,1.0,1.5,2.0]");
        let back: TenorGrid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<TenorGrid>("[0.0,1.0,0.5]").is_err());
    }
}
