//! Checks against the 2008-04-07 Euro quotes bundled as fixtures.

use inflmm::calibration::{bootstrap_caplet_vols, CapQuote};
use inflmm::curves::{
    forward_real_bond_price, inflation_discount, real_curve_from_zciis, NominalCurve, RealCurve,
    TenorGrid, ZciisQuoteSet,
};
use inflmm::io::{parse_quotes_str, QuoteKind, TABLE1_ZCIIS, TABLE2_CAPS};
use inflmm::model::{CorrelationSpec, VolSurface};
use inflmm::pricing::price_cap_span;

fn table1() -> ZciisQuoteSet {
    let q = parse_quotes_str(TABLE1_ZCIIS, QuoteKind::Zciis, "table1").unwrap();
    assert_eq!(q.as_of.as_deref(), Some("2008-04-07"));
    ZciisQuoteSet::new(q.into_zciis().unwrap()).unwrap()
}

fn table2() -> Vec<CapQuote> {
    parse_quotes_str(TABLE2_CAPS, QuoteKind::Cap, "table2")
        .unwrap()
        .into_caps()
        .unwrap()
}

#[test]
fn fixture_rows_are_converted_to_decimals() {
    let z = table1();
    assert_eq!(z.quotes().len(), 9);
    let ten = z.quotes().iter().find(|q| q.maturity == 10.0).unwrap();
    assert!((ten.rate - 0.02353).abs() < 1e-15);
    let caps = table2();
    assert_eq!(caps.len(), 27);
    let five = caps
        .iter()
        .find(|q| q.maturity == 5.0 && q.strike == 0.02)
        .unwrap();
    assert!((five.price - 0.02532).abs() < 1e-15);
}

#[test]
fn forward_real_bond_from_two_pillars() {
    let real = RealCurve::from_pillars(&[(1.0, 0.981), (2.0, 0.960)]).unwrap();
    let f = forward_real_bond_price(&real, 1.0, 2.0).unwrap();
    assert!((f - 0.9785933).abs() < 1e-7);
    assert_eq!(forward_real_bond_price(&real, 2.0, 2.0).unwrap(), 1.0);
}

#[test]
fn bootstrap_reprices_every_strike_column() {
    let nominal = NominalCurve::flat(0.04, 1.0, 30.0).unwrap();
    let curves = inflation_discount(
        &nominal,
        &real_curve_from_zciis(&nominal, &table1()).unwrap(),
    );
    let grid = TenorGrid::uniform(1.0, 30).unwrap();
    let caps = table2();
    for k in [0.02, 0.03, 0.04] {
        let column: Vec<CapQuote> = caps.iter().copied().filter(|q| q.strike == k).collect();
        let boot = bootstrap_caplet_vols(&curves, &grid, &column).unwrap();
        // first strip: caplets 1 and 2 share one vol
        assert_eq!(boot.vols[0], boot.vols[1]);
        if k == 0.02 {
            let third = boot
                .strips
                .iter()
                .find(|s| (s.from, s.to) == (2, 3))
                .unwrap();
            assert!((third.price - 0.00561).abs() < 1e-12);
        }
        let n = column.last().unwrap().maturity as usize;
        let surface = VolSurface::two_factor(
            grid.truncated(n).unwrap(),
            |_, _| 0.15,
            |j, _| boot.vols[j - 1],
            &CorrelationSpec::constant(-0.0535),
        )
        .unwrap();
        for q in &column {
            let p = price_cap_span(&curves, &surface, 0, q.maturity as usize, k, 1.0).unwrap();
            assert!(
                (p - q.price).abs() < 1e-12,
                "K={k} T={}: {p} vs {}",
                q.maturity,
                q.price
            );
        }
        for v in &boot.vols {
            assert!((0.001..0.02).contains(v), "K={k}: {v}");
        }
    }
}
