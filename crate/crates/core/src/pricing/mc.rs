use crate::error::{Error, Result};
use crate::model::{monte_carlo, MarketModel, McConfig, McEstimate, Measure, PathView};
use crate::pricing::{Instrument, InstrumentKind};

struct Leg {
    kind: InstrumentKind,
    m: usize,
    n: usize,
    strike: f64,
    maturity: f64,
}

impl Leg {
    fn horizon(&self) -> usize {
        if self.kind == InstrumentKind::Swaption {
            self.m
        } else {
            self.n
        }
    }

    /// Deflated unit-notional payoff on one path.
    fn payoff(&self, v: &PathView, first: usize, accruals: &[f64]) -> f64 {
        let k = self.strike;
        let period = |j: usize| accruals[j - 1] * v.inflation_forward(j, j);
        match self.kind {
            InstrumentKind::Caplet => {
                v.deflator(self.n) * (period(self.n) - accruals[self.n - 1] * k).max(0.0)
            }
            InstrumentKind::Floorlet => {
                v.deflator(self.n) * (accruals[self.n - 1] * k - period(self.n)).max(0.0)
            }
            InstrumentKind::Cap | InstrumentKind::Floor | InstrumentKind::Yyiis => (self.m + 1
                ..=self.n)
                .filter(|&j| j >= first)
                .map(|j| {
                    let x = period(j) - accruals[j - 1] * k;
                    let pay = match self.kind {
                        InstrumentKind::Cap => x.max(0.0),
                        InstrumentKind::Floor => (-x).max(0.0),
                        _ => x,
                    };
                    v.deflator(j) * pay
                })
                .sum(),
            InstrumentKind::Swaption => {
                let (m, n) = (self.m, self.n);
                let mut float = 0.0;
                let mut annuity = 0.0;
                for i in m + 1..=n {
                    let level = accruals[i - 1] * v.bond(m, i);
                    annuity += level;
                    float += level * v.inflation_forward(m, i);
                }
                v.deflator(m) * (float - k * annuity).max(0.0)
            }
            InstrumentKind::Zciis => {
                v.deflator(self.n) * (v.cpi_ratio(0, self.n) - (1.0 + k).powf(self.maturity))
            }
        }
    }
}

/// Monte Carlo values of several instruments from one simulation. The model
/// is cut back to the forwards the book needs.
pub fn mc_values(
    model: &MarketModel,
    book: &[Instrument],
    cfg: &McConfig,
) -> Result<Vec<McEstimate>> {
    if book.is_empty() {
        return Ok(Vec::new());
    }
    let grid = model.grid();
    let first = grid.first_live();
    let mut legs = Vec::with_capacity(book.len());
    for ins in book {
        ins.validate()?;
        let (m, n) = ins.span(grid)?;
        if ins.kind == InstrumentKind::Zciis && (grid.is_seasoned() || m != 0) {
            return Err(Error::invalid(format!(
                "instrument {}: Monte Carlo ZCIIS needs a grid starting today",
                ins.id
            )));
        }
        if grid.date(n) <= 0.0 || (ins.kind == InstrumentKind::Swaption && grid.date(m) <= 0.0) {
            return Err(Error::invalid(format!(
                "instrument {} has already expired",
                ins.id
            )));
        }
        legs.push(Leg {
            kind: ins.kind,
            m,
            n,
            strike: ins.strike,
            maturity: ins.end,
        });
    }
    let horizon = legs.iter().map(Leg::horizon).max().unwrap();
    let needed = match cfg.measure {
        Measure::Spot => 0,
        Measure::Forward { maturity } => maturity,
        Measure::Annuity { end, .. } => end,
    };
    let cut = legs
        .iter()
        .map(|l| l.n)
        .max()
        .unwrap()
        .max(needed)
        .max(horizon);
    let model = model.truncated(cut)?;
    let accruals: Vec<f64> = (1..=cut).map(|j| model.grid().accrual(j)).collect();
    let est = monte_carlo(
        &model,
        model.grid().date(horizon),
        cfg,
        legs.len(),
        |v, out| {
            for (o, leg) in out.iter_mut().zip(&legs) {
                *o = leg.payoff(v, first, &accruals);
            }
        },
    )?;
    Ok(est
        .into_iter()
        .zip(book)
        .map(|(e, ins)| McEstimate {
            mean: e.mean * ins.notional,
            std_error: e.std_error * ins.notional.abs(),
            samples: e.samples,
        })
        .collect())
}

/// Monte Carlo value of a single instrument.
pub fn mc_value(
    model: &MarketModel,
    instrument: &Instrument,
    cfg: &McConfig,
) -> Result<McEstimate> {
    Ok(mc_values(model, std::slice::from_ref(instrument), cfg)?[0])
}
