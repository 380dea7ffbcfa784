use std::path::{Path, PathBuf};

use inflmm::calibration::{
    bootstrap_caplet_vols, calibrate_nonparametric, CalibrationResult, CalibrationSettings,
    CalibrationTarget, CapQuote, CapletVols, CorrelationMode,
};
use inflmm::curves::{
    build_nominal_curve, inflation_discount, real_curve_from_zciis, CpiFixings, InflationCurve,
    Interpolation, NominalCurve, Pillar, TenorGrid, ZciisQuoteSet,
};
use inflmm::io::{
    curve_table, parse_quotes, parse_quotes_str, read_json, vol_table, write_csv, write_json,
    CapRepricingRow, CurveRow, PriceRow, QuoteFile, QuoteKind, SwapRateRow, SwaptionGridRow,
    TABLE1_ZCIIS, TABLE2_CAPS,
};
use inflmm::model::{
    simulate, CorrelationSpec, MarketModel, McConfig, McEstimate, Measure, VolSurface,
};
use inflmm::pricing::{mc_values, price_cap, price_swaption, swap_rate_view, Instrument};
use inflmm::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Curves and grid shared by every command.
#[derive(Debug, Clone)]
pub struct Market {
    pub curves: InflationCurve,
    pub grid: TenorGrid,
    pub as_of: Option<String>,
}

fn read_quotes(
    path: Option<&PathBuf>,
    bundled: &str,
    name: &str,
    kind: QuoteKind,
) -> Result<QuoteFile> {
    match path {
        Some(p) => parse_quotes(p, kind),
        None => parse_quotes_str(bundled, kind, name),
    }
}

pub fn load_market(cfg: &RunConfig) -> Result<Market> {
    cfg.validate()?;
    let zciis = read_quotes(
        cfg.zciis.as_ref(),
        TABLE1_ZCIIS,
        "table1_zciis.csv",
        QuoteKind::Zciis,
    )?;
    let as_of = zciis.as_of.clone();
    let quotes = ZciisQuoteSet::new(zciis.into_zciis()?)?;
    let last = quotes.quotes().last().map_or(0.0, |q| q.maturity);
    let horizon = cfg.grid_horizon.unwrap_or(last);
    let periods = (horizon / cfg.grid_step).round() as usize;
    if periods == 0 || ((periods as f64) * cfg.grid_step - horizon).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "grid horizon {horizon} is not a positive multiple of the step {}",
            cfg.grid_step
        )));
    }
    let grid = TenorGrid::uniform(cfg.grid_step, periods)?;
    let nominal = match &cfg.nominal_curve {
        Some(p) => {
            let pts: Vec<(f64, Pillar)> = parse_quotes(p, QuoteKind::NominalCurve)?
                .into_discounts()?
                .into_iter()
                .map(|d| (d.maturity, Pillar::DiscountFactor(d.discount)))
                .collect();
            build_nominal_curve(&pts, Interpolation::LogLinear)?
        }
        None => NominalCurve::flat(cfg.nominal_flat_zero_rate, cfg.grid_step, horizon.max(last))?,
    };
    let real = real_curve_from_zciis(&nominal, &quotes)?;
    let mut curves = inflation_discount(&nominal, &real);
    if let Some(p) = &cfg.cpi_fixings {
        let pts = parse_quotes(p, QuoteKind::CpiFixings)?
            .into_fixings()?
            .into_iter()
            .map(|f| (f.offset, f.level))
            .collect();
        curves = curves.with_fixings(CpiFixings::new(pts)?);
    }
    Ok(Market {
        curves,
        grid,
        as_of,
    })
}

/// Two-factor surface with flat nominal volatility and no inflation
/// loadings, the starting point of calibration.
pub fn base_surface(cfg: &RunConfig, grid: &TenorGrid, inflation_vol: f64) -> Result<VolSurface> {
    let v = cfg.nominal_flat_vol;
    VolSurface::two_factor(
        grid.clone(),
        |_, _| v,
        |_, _| inflation_vol,
        &CorrelationSpec::constant(cfg.rho),
    )
}

pub fn cmd_curves(cfg: &RunConfig) -> Result<Vec<CurveRow>> {
    let market = load_market(cfg)?;
    let rows = curve_table(&market.curves, &market.grid)?;
    write_csv(&rows, &cfg.output_dir().join("curves.csv"))?;
    Ok(rows)
}

/// Contents of `calibration.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub as_of: Option<String>,
    pub strike: f64,
    pub nominal_flat_vol: f64,
    pub settings: CalibrationSettings,
    /// Strip-wise implied caplet volatilities of the calibrated quotes.
    pub bootstrap: CapletVols,
    pub result: CalibrationResult,
}

fn load_caps(cfg: &RunConfig) -> Result<Vec<CapQuote>> {
    read_quotes(
        cfg.caps.as_ref(),
        TABLE2_CAPS,
        "table2_caps.csv",
        QuoteKind::Cap,
    )?
    .into_caps()
}

fn settings(cfg: &RunConfig) -> CalibrationSettings {
    CalibrationSettings {
        alpha: cfg.alpha,
        beta: cfg.beta,
        correlation: if cfg.solve_rho {
            CorrelationMode::Solve { initial: cfg.rho }
        } else {
            CorrelationMode::Fixed { rho: vec![cfg.rho] }
        },
        time_homogeneous: cfg.time_homogeneous,
        solver: cfg.solver,
    }
}

/// Calibrates to the caps at the calibration strike plus any extra targets,
/// without writing anything.
pub fn calibrate_market(
    cfg: &RunConfig,
    market: &Market,
) -> Result<(CalibrationReport, Vec<CapQuote>)> {
    let caps = load_caps(cfg)?;
    let strike = cfg.calibration_strike();
    let mut used: Vec<CapQuote> = caps
        .iter()
        .copied()
        .filter(|q| (q.strike - strike).abs() < 1e-12)
        .collect();
    if used.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no cap quotes at strike {}%",
            cfg.calibration_strike_pct
        )));
    }
    used.sort_by(|a, b| a.maturity.total_cmp(&b.maturity));
    let bootstrap = bootstrap_caplet_vols(&market.curves, &market.grid, &used)?;
    let mut targets = Vec::with_capacity(used.len() + cfg.extra_targets.len());
    for q in &used {
        let n = market.grid.require_index(q.maturity)?;
        targets.push(CalibrationTarget::cap_price(0, n, q.strike, q.price));
    }
    targets.extend(cfg.extra_targets.iter().copied());
    let base = base_surface(cfg, &market.grid, 0.0)?;
    let settings = settings(cfg);
    let result = calibrate_nonparametric(&market.curves, &base, &targets, &settings)?;
    Ok((
        CalibrationReport {
            as_of: market.as_of.clone(),
            strike,
            nominal_flat_vol: cfg.nominal_flat_vol,
            settings,
            bootstrap,
            result,
        },
        caps,
    ))
}

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<CalibrationReport> {
    let market = load_market(cfg)?;
    let (report, caps) = calibrate_market(cfg, &market)?;
    let out = cfg.output_dir();
    let surface = &report.result.surface;
    let mut rows = Vec::with_capacity(caps.len());
    for q in &caps {
        let n = market.grid.require_index(q.maturity)?;
        let model = price_cap(&market.curves, surface, n, q.strike, 1.0)?;
        rows.push(CapRepricingRow {
            maturity: q.maturity,
            strike_pct: q.strike * 100.0,
            market_bps: q.price * 1e4,
            model_bps: model * 1e4,
            error_bps: (model - q.price) * 1e4,
            calibrated: (q.strike - report.strike).abs() < 1e-12,
        });
    }
    write_json(&report, &out.join("calibration.json"))?;
    write_csv(&vol_table(surface), &out.join("vol_matrix.csv"))?;
    write_csv(&rows, &out.join("cap_repricing.csv"))?;
    if !report.result.converged {
        return Err(Error::Numerical(format!(
            "calibration did not converge ({}); max violation {:e}",
            report.result.message, report.result.max_violation
        )));
    }
    Ok(report)
}

/// Surface for pricing: flat override, stored calibration, or a fresh fit.
fn pricing_surface(cfg: &RunConfig, market: &Market) -> Result<VolSurface> {
    if let Some(v) = cfg.flat_inflation_vol {
        return base_surface(cfg, &market.grid, v);
    }
    if let Some(p) = &cfg.calibration {
        let report: CalibrationReport = read_json(p)?;
        if report.result.surface.grid() != &market.grid {
            return Err(Error::InvalidInput(format!(
                "{}: calibrated grid does not match the configured grid",
                p.display()
            )));
        }
        return Ok(report.result.surface);
    }
    let (report, _) = calibrate_market(cfg, market)?;
    if !report.result.converged {
        return Err(Error::Numerical(format!(
            "calibration did not converge: {}",
            report.result.message
        )));
    }
    Ok(report.result.surface)
}

fn load_book(path: &Path) -> Result<Vec<Instrument>> {
    parse_quotes(path, QuoteKind::InstrumentBook)?.into_instruments()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceReport {
    pub prices: Vec<PriceRow>,
    pub swaptions: Vec<SwaptionGridRow>,
    pub swap_rates: Vec<SwapRateRow>,
}

pub fn cmd_price(cfg: &RunConfig) -> Result<PriceReport> {
    let market = load_market(cfg)?;
    let surface = pricing_surface(cfg, &market)?;
    let book = match &cfg.book {
        Some(p) => load_book(p)?,
        None => Vec::new(),
    };
    let prices = book
        .iter()
        .map(|ins| match ins.value(&market.curves, &surface) {
            Ok(v) => PriceRow {
                id: ins.id.clone(),
                kind: ins.kind.to_string(),
                pv: Some(v.pv),
                pv_per_unit: Some(v.pv / ins.notional),
                vol: v.vol,
                status: "ok".into(),
            },
            Err(e) => PriceRow {
                id: ins.id.clone(),
                kind: ins.kind.to_string(),
                pv: None,
                pv_per_unit: None,
                vol: None,
                status: format!("error: {e}"),
            },
        })
        .collect();
    let mut swaptions = Vec::new();
    let mut swap_rates = Vec::new();
    for &(m, n) in &cfg.swaption_grid.spans {
        let view = swap_rate_view(&market.curves, &market.grid, m, n)?;
        swap_rates.push(SwapRateRow {
            start: m,
            end: n,
            rate: view.rate,
            annuity: view.annuity,
        });
        for &k in &cfg.swaption_grid.strikes_pct {
            let q = price_swaption(&market.curves, &surface, m, n, k / 100.0, 1.0)?;
            swaptions.push(SwaptionGridRow {
                start: m,
                end: n,
                strike_pct: k,
                price: q.price,
                vol: q.vol,
            });
        }
    }
    let out = cfg.output_dir();
    let report = PriceReport {
        prices,
        swaptions,
        swap_rates,
    };
    write_csv(&report.prices, &out.join("prices.csv"))?;
    write_csv(&report.swaptions, &out.join("swaption_grid.csv"))?;
    write_csv(&report.swap_rates, &out.join("swap_rates.csv"))?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub id: String,
    pub kind: String,
    pub mc: f64,
    pub std_error: f64,
    pub closed_form: f64,
    /// `(mc - closed_form) / std_error`; 0 when a zero-variance estimate
    /// matches to rounding, absent when it does not.
    pub z_score: Option<f64>,
}

/// Contents of `simulation.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub mc: McConfig,
    pub rows: Vec<SimulationRow>,
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulationReport> {
    let market = load_market(cfg)?;
    let surface = pricing_surface(cfg, &market)?;
    let book = if !cfg.simulate.instruments.is_empty() {
        cfg.simulate.instruments.clone()
    } else if let Some(p) = &cfg.book {
        load_book(p)?
    } else {
        cfg.default_simulation_book()
    };
    let model = MarketModel::from_curves(surface.clone(), &market.curves)?;
    let est: Vec<McEstimate> = mc_values(&model, &book, &cfg.mc)?;
    let mut rows = Vec::with_capacity(book.len());
    for (ins, e) in book.iter().zip(&est) {
        let closed = ins.value(&market.curves, &surface)?.pv;
        rows.push(SimulationRow {
            id: ins.id.clone(),
            kind: ins.kind.to_string(),
            mc: e.mean,
            std_error: e.std_error,
            closed_form: closed,
            z_score: Some(e.z_score(closed)).filter(|z| z.is_finite()),
        });
    }
    let out = cfg.output_dir();
    if cfg.simulate.write_paths > 0 {
        let horizon = book
            .iter()
            .map(|i| i.end)
            .chain(match cfg.mc.measure {
                Measure::Spot => None,
                Measure::Forward { maturity } => Some(market.grid.date(maturity)),
                Measure::Annuity { start, .. } => Some(market.grid.date(start)),
            })
            .fold(0.0, f64::max);
        let n = market.grid.require_index(horizon)?;
        let mc = McConfig {
            paths: cfg.simulate.write_paths
                + (cfg.simulate.write_paths % 2) * usize::from(cfg.mc.antithetic),
            ..cfg.mc.clone()
        };
        let set = simulate(
            &model.truncated(n.max(mc_needed(&cfg.mc.measure)))?,
            horizon,
            &mc,
        )?;
        let path = out.join("paths.csv");
        std::fs::create_dir_all(&out).map_err(|source| Error::Io {
            path: out.clone(),
            source,
        })?;
        let file = std::fs::File::create(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        set.write_csv(std::io::BufWriter::new(file))?;
    }
    let report = SimulationReport {
        mc: cfg.mc.clone(),
        rows,
    };
    write_json(&report, &out.join("simulation.json"))?;
    Ok(report)
}

fn mc_needed(m: &Measure) -> usize {
    match *m {
        Measure::Spot => 0,
        Measure::Forward { maturity } => maturity,
        Measure::Annuity { end, .. } => end,
    }
}
