use serde::{Deserialize, Serialize};

use crate::curves::{InflationCurve, TenorGrid};
use crate::error::{Error, Result};
use crate::model::VolSurface;
use crate::pricing::{
    price_cap_span, price_caplet, price_floor_span, price_floorlet, price_swaption, price_yyiis,
    price_zciis,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentKind {
    Zciis,
    Yyiis,
    Caplet,
    Floorlet,
    Cap,
    Floor,
    Swaption,
}

impl InstrumentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstrumentKind::Zciis => "zciis",
            InstrumentKind::Yyiis => "yyiis",
            InstrumentKind::Caplet => "caplet",
            InstrumentKind::Floorlet => "floorlet",
            InstrumentKind::Cap => "cap",
            InstrumentKind::Floor => "floor",
            InstrumentKind::Swaption => "swaption",
        }
    }

    pub fn is_option(&self) -> bool {
        !matches!(self, InstrumentKind::Zciis | InstrumentKind::Yyiis)
    }
}

impl std::str::FromStr for InstrumentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "zciis" => InstrumentKind::Zciis,
            "yyiis" => InstrumentKind::Yyiis,
            "caplet" => InstrumentKind::Caplet,
            "floorlet" => InstrumentKind::Floorlet,
            "cap" => InstrumentKind::Cap,
            "floor" => InstrumentKind::Floor,
            "swaption" => InstrumentKind::Swaption,
            other => return Err(Error::invalid(format!("unknown instrument kind '{other}'"))),
        })
    }
}

impl std::fmt::Display for InstrumentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A trade in the book. Dates are year offsets from the valuation date and
/// must sit on the model grid; `strike` is a decimal rate.
///
/// The swap leg or option strip runs over `[start, end]` with payments every
/// `freq` years. A swaption expires at `start`; a ZCIIS matures at `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instrument {
    pub id: String,
    pub kind: InstrumentKind,
    pub start: f64,
    pub end: f64,
    pub freq: f64,
    pub strike: f64,
    pub notional: f64,
}

/// Closed-form value of one instrument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Valuation {
    pub pv: f64,
    /// Implied volatility used, where a single one applies.
    pub vol: Option<f64>,
}

impl Instrument {
    /// Grid indices `(m, n)` of `start` and `end`, checking that the grid
    /// steps match the payment frequency.
    pub fn span(&self, grid: &TenorGrid) -> Result<(usize, usize)> {
        let m = grid.require_index(self.start)?;
        let n = grid.require_index(self.end)?;
        if n <= m {
            return Err(Error::invalid(format!(
                "instrument {}: end must be after start",
                self.id
            )));
        }
        if self.kind != InstrumentKind::Zciis {
            for j in m + 1..=n {
                if (grid.accrual(j) - self.freq).abs() > 1e-9 {
                    return Err(Error::invalid(format!(
                        "instrument {}: payment frequency {} does not match grid step {} at T = {}",
                        self.id,
                        self.freq,
                        grid.accrual(j),
                        grid.date(j)
                    )));
                }
            }
        }
        Ok((m, n))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.notional.is_finite() && self.strike.is_finite()) {
            return Err(Error::invalid(format!(
                "instrument {}: non-finite field",
                self.id
            )));
        }
        if !(self.freq > 0.0) {
            return Err(Error::invalid(format!(
                "instrument {}: frequency must be positive",
                self.id
            )));
        }
        if self.kind.is_option() && !(self.strike + 1.0 / self.freq > 0.0) {
            return Err(Error::invalid(format!(
                "instrument {}: strike {} is at or below -1/ΔT",
                self.id, self.strike
            )));
        }
        if (self.kind == InstrumentKind::Caplet || self.kind == InstrumentKind::Floorlet)
            && ((self.end - self.start) - self.freq).abs() > 1e-9
        {
            return Err(Error::invalid(format!(
                "instrument {}: a caplet spans exactly one period",
                self.id
            )));
        }
        Ok(())
    }

    pub fn value(&self, curves: &InflationCurve, vols: &VolSurface) -> Result<Valuation> {
        self.validate()?;
        let grid = vols.grid();
        let (k, not) = (self.strike, self.notional);
        Ok(match self.kind {
            InstrumentKind::Zciis => {
                if self.start.abs() > 1e-9 {
                    return Err(Error::invalid(format!(
                        "instrument {}: a ZCIIS starts today",
                        self.id
                    )));
                }
                Valuation {
                    pv: price_zciis(curves, k, self.end, not)?,
                    vol: None,
                }
            }
            InstrumentKind::Yyiis => {
                let (m, n) = self.span(grid)?;
                Valuation {
                    pv: price_yyiis(curves, grid, m, n, k, not)?,
                    vol: None,
                }
            }
            InstrumentKind::Caplet | InstrumentKind::Floorlet => {
                let (_, j) = self.span(grid)?;
                let pv = if self.kind == InstrumentKind::Caplet {
                    price_caplet(curves, vols, j, k, not)?
                } else {
                    price_floorlet(curves, vols, j, k, not)?
                };
                Valuation {
                    pv,
                    vol: Some(vols.caplet_vol(j)),
                }
            }
            InstrumentKind::Cap | InstrumentKind::Floor => {
                let (m, n) = self.span(grid)?;
                let pv = if self.kind == InstrumentKind::Cap {
                    price_cap_span(curves, vols, m, n, k, not)?
                } else {
                    price_floor_span(curves, vols, m, n, k, not)?
                };
                Valuation { pv, vol: None }
            }
            InstrumentKind::Swaption => {
                let (m, n) = self.span(grid)?;
                let q = price_swaption(curves, vols, m, n, k, not)?;
                Valuation {
                    pv: q.price,
                    vol: Some(q.vol),
                }
            }
        })
    }
}
