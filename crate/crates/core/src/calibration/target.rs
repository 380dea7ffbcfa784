use serde::{Deserialize, Serialize};

/// What a calibration target pins down. Indices refer to the model grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetKind {
    /// Implied volatility `σ_j` of caplet `j`.
    CapletVol { index: usize },
    /// Price per unit notional of the cap on periods `start+1..=end`.
    CapPrice {
        start: usize,
        end: usize,
        strike: f64,
    },
    /// Implied volatility `σ_{m,n}` of the swaption expiring at `T_start`
    /// on the swap over `[T_start, T_end]`.
    SwaptionVol { start: usize, end: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    #[serde(flatten)]
    pub kind: TargetKind,
    pub value: f64,
    /// Scales the constraint inside the solver's merit function; it does
    /// not change the solution of a feasible problem.
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl CalibrationTarget {
    pub fn caplet_vol(index: usize, vol: f64) -> Self {
        Self {
            kind: TargetKind::CapletVol { index },
            value: vol,
            weight: 1.0,
        }
    }

    pub fn cap_price(start: usize, end: usize, strike: f64, price: f64) -> Self {
        Self {
            kind: TargetKind::CapPrice { start, end, strike },
            value: price,
            weight: 1.0,
        }
    }

    pub fn swaption_vol(start: usize, end: usize, vol: f64) -> Self {
        Self {
            kind: TargetKind::SwaptionVol { start, end },
            value: vol,
            weight: 1.0,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            TargetKind::CapletVol { index } => format!("caplet_vol({index})"),
            TargetKind::CapPrice { start, end, strike } => format!("cap({start},{end},K={strike})"),
            TargetKind::SwaptionVol { start, end } => format!("swaption_vol({start},{end})"),
        }
    }
}

/// Fit of one target after calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResidual {
    pub target: CalibrationTarget,
    /// Model value in the target's units.
    pub model: f64,
    /// Left minus right side of the calibration equation: market total
    /// variance minus model total variance for volatility targets, market
    /// minus model price for cap targets.
    pub residual: f64,
    /// `residual` divided by the market side.
    pub relative: f64,
}
