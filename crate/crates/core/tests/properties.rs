use inflmm::curves::{
    inflation_discount, real_curve_from_zciis, NominalCurve, TenorGrid, ZciisQuote, ZciisQuoteSet,
};
use inflmm::model::{CorrelationSpec, VolSurface};
use inflmm::pricing::{
    implied_caplet_vol, price_cap, price_caplet, price_floor, price_floorlet, price_swaption,
    price_yyiis,
};
use proptest::prelude::*;

fn quotes(rates: &[f64]) -> ZciisQuoteSet {
    ZciisQuoteSet::new(
        rates
            .iter()
            .enumerate()
            .map(|(i, &rate)| ZciisQuote {
                maturity: (i + 1) as f64,
                rate,
            })
            .collect(),
    )
    .unwrap()
}

fn surface(n: usize, g: f64, rho: f64) -> VolSurface {
    VolSurface::two_factor(
        TenorGrid::uniform(1.0, n).unwrap(),
        |_, _| 0.15,
        |_, _| g,
        &CorrelationSpec::constant(rho),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn zciis_quotes_round_trip(r in 0.001f64..0.08, rates in prop::collection::vec(-0.01f64..0.06, 1..12)) {
        let nominal = NominalCurve::flat(r, 1.0, 12.0).unwrap();
        let real = real_curve_from_zciis(&nominal, &quotes(&rates)).unwrap();
        for (i, &k) in rates.iter().enumerate() {
            let back = real.implied_zciis_rate(&nominal, (i + 1) as f64).unwrap();
            prop_assert!((back - k).abs() <= 1e-12 * k.abs().max(1e-3));
        }
    }

    #[test]
    fn discount_factors_factorise_and_forwards_telescope(
        r in 0.001f64..0.08,
        rates in prop::collection::vec(-0.01f64..0.06, 2..12),
    ) {
        let n = rates.len();
        let nominal = NominalCurve::flat(r, 1.0, n as f64).unwrap();
        let curves = inflation_discount(&nominal, &real_curve_from_zciis(&nominal, &quotes(&rates)).unwrap());
        let mut product = 1.0;
        for j in 1..=n {
            let t = j as f64;
            let p = nominal.discount(t).unwrap();
            prop_assert!((p - curves.real().discount(t).unwrap() * curves.discount(t).unwrap()).abs() < 1e-14);
            let f = curves.inflation_forward(t - 1.0, t).unwrap();
            prop_assert!(1.0 + f > 0.0);
            product *= 1.0 + f;
        }
        let total = 1.0 / curves.discount(n as f64).unwrap();
        prop_assert!((product - total).abs() <= 1e-13 * total);
    }

    #[test]
    fn option_prices_are_monotone(
        g in 0.001f64..0.03,
        k1 in -0.01f64..0.06,
        dk in 0.0005f64..0.02,
        j in 1usize..=8,
    ) {
        let nominal = NominalCurve::flat(0.03, 1.0, 8.0).unwrap();
        let curves = inflation_discount(&nominal, &real_curve_from_zciis(&nominal, &quotes(&[0.02; 8])).unwrap());
        let vols = surface(8, g, -0.2);
        let lo = price_caplet(&curves, &vols, j, k1, 1.0).unwrap();
        let hi = price_caplet(&curves, &vols, j, k1 + dk, 1.0).unwrap();
        prop_assert!(hi < lo);
        prop_assert!(price_floorlet(&curves, &vols, j, k1 + dk, 1.0).unwrap() > price_floorlet(&curves, &vols, j, k1, 1.0).unwrap());
        let more = price_caplet(&curves, &surface(8, g * 1.5, -0.2), j, k1, 1.0).unwrap();
        prop_assert!(more >= lo - 1e-15);
        let cap_lo = price_cap(&curves, &vols, j, k1, 1.0).unwrap();
        prop_assert!(price_cap(&curves, &vols, j, k1 + dk, 1.0).unwrap() < cap_lo);
        let s = price_swaption(&curves, &vols, 1, 5, k1, 1.0).unwrap().price;
        prop_assert!(price_swaption(&curves, &vols, 1, 5, k1 + dk, 1.0).unwrap().price < s);
    }

    #[test]
    fn cap_floor_parity_is_the_yyiis(g in 0.0f64..0.03, rho in -1.0f64..1.0, k in -0.02f64..0.08, n in 1usize..=10) {
        let nominal = NominalCurve::flat(0.035, 1.0, 10.0).unwrap();
        let curves = inflation_discount(&nominal, &real_curve_from_zciis(&nominal, &quotes(&[0.021; 10])).unwrap());
        let vols = surface(10, g, rho);
        let grid = vols.grid().clone();
        let cap = price_cap(&curves, &vols, n, k, 1.0).unwrap();
        let floor = price_floor(&curves, &vols, n, k, 1.0).unwrap();
        let rhs = price_yyiis(&curves, &grid, 0, n, k, 1.0).unwrap();
        prop_assert!((cap - floor - rhs).abs() <= 1e-12 * cap.max(floor));
    }

    #[test]
    fn implied_caplet_vol_inverts_the_price(g in 0.001f64..0.03, k in 0.0f64..0.05, j in 1usize..=10) {
        let nominal = NominalCurve::flat(0.035, 1.0, 10.0).unwrap();
        let curves = inflation_discount(&nominal, &real_curve_from_zciis(&nominal, &quotes(&[0.021; 10])).unwrap());
        let vols = surface(10, g, 0.0);
        let p = price_caplet(&curves, &vols, j, k, 1.0).unwrap();
        let sigma = implied_caplet_vol(&curves, vols.grid(), j, k, p).unwrap();
        let back = price_caplet(&curves, &surface(10, sigma, 0.0), j, k, 1.0).unwrap();
        prop_assert!((back - p).abs() <= 1e-12 * p + 1e-14, "{back} vs {p}");
        // deep in or out of the money the price carries no vega to invert
        let mu = 1.0 + curves.inflation_forward(j as f64 - 1.0, j as f64).unwrap();
        let moneyness = (mu / (1.0 + k)).ln().abs() / (vols.caplet_vol(j) * (j as f64).sqrt());
        if moneyness < 4.0 {
            prop_assert!((sigma - vols.caplet_vol(j)).abs() < 1e-8 * vols.caplet_vol(j));
        }
    }
}
