//! Shared fixtures for the benchmarks: the bundled Euro quotes on an annual
//! grid, a flat 4% nominal curve and 15% nominal vols.

use inflmm::calibration::{calibrate_nonparametric, CalibrationSettings, CalibrationTarget};
use inflmm::curves::{
    inflation_discount, real_curve_from_zciis, InflationCurve, NominalCurve, TenorGrid,
    ZciisQuoteSet,
};
use inflmm::io::{parse_quotes_str, QuoteKind, TABLE1_ZCIIS, TABLE2_CAPS};
use inflmm::model::{CorrelationSpec, VolSurface};

pub const RHO: f64 = -0.0535;

pub fn zciis_quotes() -> ZciisQuoteSet {
    let q = parse_quotes_str(TABLE1_ZCIIS, QuoteKind::Zciis, "table1").expect("fixture");
    ZciisQuoteSet::new(q.into_zciis().expect("fixture")).expect("fixture")
}

pub fn nominal() -> NominalCurve {
    NominalCurve::flat(0.04, 1.0, 30.0).expect("flat curve")
}

pub fn curves() -> InflationCurve {
    let n = nominal();
    let real = real_curve_from_zciis(&n, &zciis_quotes()).expect("real curve");
    inflation_discount(&n, &real)
}

/// Cap-price targets for the 2% column.
pub fn cap_targets(grid: &TenorGrid) -> Vec<CalibrationTarget> {
    parse_quotes_str(TABLE2_CAPS, QuoteKind::Cap, "table2")
        .and_then(|q| q.into_caps())
        .expect("fixture")
        .into_iter()
        .filter(|q| q.strike == 0.02)
        .map(|q| {
            CalibrationTarget::cap_price(
                0,
                grid.require_index(q.maturity).expect("grid date"),
                0.02,
                q.price,
            )
        })
        .collect()
}

pub fn base_surface(periods: usize, inflation_vol: f64) -> VolSurface {
    VolSurface::two_factor(
        TenorGrid::uniform(1.0, periods).expect("grid"),
        |_, _| 0.15,
        |_, _| inflation_vol,
        &CorrelationSpec::constant(RHO),
    )
    .expect("surface")
}

/// Surface calibrated to the 2% caps on a 30y annual grid.
pub fn calibrated_surface(curves: &InflationCurve) -> VolSurface {
    let base = base_surface(30, 0.0);
    let targets = cap_targets(base.grid());
    calibrate_nonparametric(curves, &base, &targets, &CalibrationSettings::default())
        .expect("calibration")
        .surface
}
