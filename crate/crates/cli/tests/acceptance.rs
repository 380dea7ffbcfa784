//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use inflmm::calibration::{
    calibrate_nonparametric, implied_correlation, CalibrationSettings, CalibrationTarget,
    CorrelationMode,
};
use inflmm::curves::{
    forward_real_bond_price, inflation_discount, real_bond_replication_pnl, real_curve_from_zciis,
    InflationCurve, NominalCurve, RealCurve, TenorGrid, ZciisQuoteSet,
};
use inflmm::io::{parse_quotes_str, QuoteKind, TABLE1_ZCIIS, TABLE2_CAPS};
use inflmm::model::hjm::{consistency_residual, jy_drift_check, ForwardVols, FD_STEP};
use inflmm::model::{monte_carlo, CorrelationSpec, MarketModel, McConfig, Measure, VolSurface};
use inflmm::pricing::{
    mc_value, mc_values, price_cap_span, price_caplet, price_floor_span, price_floorlet,
    price_swaption, price_yyiis, swap_rate_view, Instrument, InstrumentKind, SwaptionVariance,
};
use inflmm_cli::commands::{calibrate_market, cmd_calibrate, load_market, Market};
use inflmm_cli::config::RunConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(elapsed: Duration, budget_s: f64, name: &str) -> Result<(), String> {
    if elapsed.as_secs_f64() < budget_s {
        Ok(())
    } else {
        Err(format!(
            "{name} took {:.1}s, budget {budget_s}s",
            elapsed.as_secs_f64()
        ))
    }
}

fn euro_market() -> (RunConfig, Market) {
    let cfg = RunConfig::default();
    let market = load_market(&cfg).expect("bundled market data");
    (cfg, market)
}

fn calibrated_model() -> (Market, VolSurface) {
    let (cfg, market) = euro_market();
    let (report, _) = calibrate_market(&cfg, &market).expect("calibration");
    (market, report.result.surface)
}

fn zciis_round_trip() -> Outcome {
    let t0 = Instant::now();
    let quotes =
        parse_quotes_str(TABLE1_ZCIIS, QuoteKind::Zciis, "table1").map_err(|e| e.to_string())?;
    let quotes = quotes.into_zciis().map_err(|e| e.to_string())?;
    let nominal = NominalCurve::flat(0.04, 1.0, 30.0).map_err(|e| e.to_string())?;
    let set = ZciisQuoteSet::new(quotes.clone()).map_err(|e| e.to_string())?;
    let real = real_curve_from_zciis(&nominal, &set).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for q in &quotes {
        let r = real
            .implied_zciis_rate(&nominal, q.maturity)
            .map_err(|e| e.to_string())?;
        worst = worst.max(((r - q.rate) / q.rate).abs());
    }
    within_budget(t0.elapsed(), 1.0, "round trip")?;
    check(
        worst <= 1e-12,
        format!("{} quotes, max relative error {worst:.1e}", quotes.len()),
    )
}

fn calibration_repricing() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        output_dir: Some(dir.path().to_path_buf()),
        ..RunConfig::default()
    };
    let t0 = Instant::now();
    let report = cmd_calibrate(&cfg).map_err(|e| e.to_string())?;
    within_budget(t0.elapsed(), 60.0, "calibration")?;
    let market = load_market(&cfg).map_err(|e| e.to_string())?;
    let caps = parse_quotes_str(TABLE2_CAPS, QuoteKind::Cap, "table2")
        .and_then(|q| q.into_caps())
        .map_err(|e| e.to_string())?;
    let surface = &report.result.surface;
    let mut worst_bp = 0.0f64;
    let mut count = 0;
    for q in caps.iter().filter(|q| q.strike == 0.02) {
        let n = market
            .grid
            .require_index(q.maturity)
            .map_err(|e| e.to_string())?;
        let p =
            price_cap_span(&market.curves, surface, 0, n, 0.02, 1.0).map_err(|e| e.to_string())?;
        worst_bp = worst_bp.max(((p - q.price) * 1e4).abs());
        count += 1;
    }
    let norms = surface.inflation_norms();
    let live: Vec<f64> = norms
        .iter()
        .enumerate()
        .flat_map(|(j, r)| r[..=j].to_vec())
        .collect();
    let (lo, hi) = live
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    check(
        count == 9 && worst_bp < 0.5 && lo >= 0.001 && hi <= 0.02,
        format!(
            "{count} caps, max error {worst_bp:.1e} bp, gamma_I in [{:.3}%, {:.3}%]",
            lo * 100.0,
            hi * 100.0
        ),
    )
}

fn caplet(j: usize, strike: f64) -> Instrument {
    Instrument {
        id: format!("caplet_{j}"),
        kind: InstrumentKind::Caplet,
        start: (j - 1) as f64,
        end: j as f64,
        freq: 1.0,
        strike,
        notional: 1.0,
    }
}

fn caplet_mc_oracle() -> Outcome {
    let (market, surface) = calibrated_model();
    let model =
        MarketModel::from_curves(surface.clone(), &market.curves).map_err(|e| e.to_string())?;
    let t0 = Instant::now();
    let (mut worst_z, mut worst_rel) = (0.0f64, 0.0f64);
    for j in 1..=10 {
        let cfg = McConfig {
            paths: 200_000,
            steps_per_year: 4,
            seed: 20_080_407 + j as u64,
            antithetic: true,
            measure: Measure::Forward { maturity: j },
        };
        let ins = caplet(j, 0.02);
        let e = mc_value(&model, &ins, &cfg).map_err(|e| e.to_string())?;
        let closed =
            price_caplet(&market.curves, &surface, j, 0.02, 1.0).map_err(|e| e.to_string())?;
        worst_z = worst_z.max(e.z_score(closed).abs());
        worst_rel = worst_rel.max(e.std_error / closed);
    }
    within_budget(t0.elapsed(), 120.0, "caplet Monte Carlo")?;
    check(
        worst_z <= 3.0 && worst_rel < 0.003,
        format!(
            "10 tenors, max |z| {worst_z:.2}, max SE/price {:.3}%",
            worst_rel * 100.0
        ),
    )
}

fn swaption_freezing() -> Outcome {
    let (market, surface) = calibrated_model();
    let model =
        MarketModel::from_curves(surface.clone(), &market.curves).map_err(|e| e.to_string())?;
    let strikes = [0.01, 0.02, 0.03, 0.04];
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (m, n) in [(1usize, 3usize), (2, 5), (5, 10)] {
        let book: Vec<Instrument> = strikes
            .iter()
            .map(|&k| Instrument {
                id: format!("swaption_{m}_{n}_{k}"),
                kind: InstrumentKind::Swaption,
                start: m as f64,
                end: n as f64,
                freq: 1.0,
                strike: k,
                notional: 1.0,
            })
            .collect();
        let cfg = McConfig {
            paths: 500_000,
            steps_per_year: 4,
            seed: 7 + m as u64,
            antithetic: true,
            measure: Measure::Spot,
        };
        let est = mc_values(&model, &book, &cfg).map_err(|e| e.to_string())?;
        for (&k, e) in strikes.iter().zip(&est) {
            let closed = price_swaption(&market.curves, &surface, m, n, k, 1.0)
                .map_err(|e| e.to_string())?
                .price;
            let tol = (0.01 * closed.abs()).max(3.0 * e.std_error);
            let ratio = (e.mean - closed).abs() / tol;
            worst = worst.max(ratio);
            if ratio > 1.0 {
                lines.push(format!(
                    "({m},{n}) K={k}: mc {:.4e} closed {closed:.4e}",
                    e.mean
                ));
            }
        }
    }
    check(
        worst <= 1.0,
        format!(
            "12 swaptions, worst |diff|/tolerance {worst:.2}{}",
            lines.iter().map(|l| format!("; {l}")).collect::<String>()
        ),
    )
}

fn random_curves(rng: &mut ChaCha8Rng, grid: &TenorGrid) -> InflationCurve {
    let horizon = grid.last_date();
    let step = grid.accrual(1);
    let nominal = NominalCurve::flat(rng.random_range(0.001..0.08), step, horizon).unwrap();
    let mut pi = 1.0;
    let mut pillars = Vec::new();
    for j in 1..=grid.periods() {
        let f: f64 = rng.random_range(-0.02..0.08);
        pi /= 1.0 + step * f;
        let t = grid.date(j);
        pillars.push((t, nominal.discount(t).unwrap() / pi));
    }
    inflation_discount(&nominal, &RealCurve::from_pillars(&pillars).unwrap())
}

fn parity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale.max(f64::MIN_POSITIVE);
    for _ in 0..1000 {
        let step = [0.25, 0.5, 1.0][rng.random_range(0..3)];
        let n = rng.random_range(2..=12);
        let grid = TenorGrid::uniform(step, n).unwrap();
        let curves = random_curves(&mut rng, &grid);
        let g = rng.random_range(0.0005..0.05);
        let rho = rng.random_range(-1.0..1.0);
        let vols = VolSurface::two_factor(
            grid.clone(),
            |_, _| 0.15,
            |j, i| g * (1.0 + 0.1 * (j as f64 - i as f64)),
            &CorrelationSpec::constant(rho),
        )
        .unwrap();
        let k = rng.random_range(-0.02..0.1);
        let j = rng.random_range(1..=n);
        let t = grid.date(j);
        let p = curves.nominal().discount(t).unwrap();
        let f = curves.inflation_forward(grid.date(j - 1), t).unwrap();
        let c = price_caplet(&curves, &vols, j, k, 1.0).unwrap();
        let fl = price_floorlet(&curves, &vols, j, k, 1.0).unwrap();
        worst = worst.max(rel(c - fl, step * p * (f - k), c.max(fl)));

        let m = rng.random_range(0..n);
        let cap = price_cap_span(&curves, &vols, m, n, k, 1.0).unwrap();
        let floor = price_floor_span(&curves, &vols, m, n, k, 1.0).unwrap();
        let swap = price_yyiis(&curves, &grid, m, n, k, 1.0).unwrap();
        worst = worst.max(rel(cap - floor, swap, cap.max(floor)));

        // floating leg from inflation discount factors directly
        let mut leg = 0.0;
        let mut fixed = 0.0;
        for i in m + 1..=n {
            let (a, b) = (grid.date(i - 1), grid.date(i));
            let pb = curves.nominal().discount(b).unwrap();
            leg += pb * (curves.discount(a).unwrap() / curves.discount(b).unwrap() - 1.0);
            fixed += step * pb;
        }
        worst = worst.max(rel(swap + k * fixed, leg, leg.abs().max(k.abs() * fixed)));
    }
    check(
        worst <= 1e-12,
        format!("1000 draws, max relative violation {worst:.1e}"),
    )
}

fn martingale_suite() -> Outcome {
    let (market, surface) = calibrated_model();
    let model = MarketModel::from_curves(surface, &market.curves).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for j in [1usize, 3, 5, 10] {
        let cfg = McConfig {
            paths: 100_000,
            seed: 20_080_407,
            measure: Measure::Forward { maturity: j },
            ..McConfig::default()
        };
        let sub = model.truncated(j).map_err(|e| e.to_string())?;
        let e = monte_carlo(&sub, j as f64, &cfg, 1, |v, out| out[0] = v.displaced(j, j))
            .map_err(|e| e.to_string())?;
        let z = e[0].z_score(model.displaced(j));
        worst = worst.max(z.abs());
    }
    for (m, n) in [(1usize, 3usize), (2, 5), (5, 10)] {
        let cfg = McConfig {
            paths: 100_000,
            seed: 20_080_407,
            measure: Measure::Annuity { start: m, end: n },
            ..McConfig::default()
        };
        let sub = model.truncated(n).map_err(|e| e.to_string())?;
        let e = monte_carlo(&sub, m as f64, &cfg, 1, |v, out| {
            let a = v.annuity(m, m, n);
            out[0] = (m + 1..=n)
                .map(|i| v.bond(m, i) * v.displaced(m, i))
                .sum::<f64>()
                / a;
        })
        .map_err(|e| e.to_string())?;
        let view = swap_rate_view(&market.curves, &market.grid, m, n).map_err(|e| e.to_string())?;
        let z = e[0].z_score(view.displaced_rate());
        worst = worst.max(z.abs());
    }
    check(
        worst <= 3.0,
        format!("4 forward and 3 annuity measures, max |z| {worst:.2}"),
    )
}

/// Fixed rotation of R^3 so the factor subspaces are not coordinate axes.
fn rotate(v: [f64; 3]) -> Vec<f64> {
    let (a, b) = (0.7f64, -0.4f64);
    let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
    let x = [ca * v[0] - sa * v[1], sa * v[0] + ca * v[1], v[2]];
    vec![x[0], cb * x[1] - sb * x[2], sb * x[1] + cb * x[2]]
}

fn consistency_bridge() -> Outcome {
    let real = |t: f64, s: f64| [0.01 + 0.002 * (s - t), 0.006 * (-0.3 * (s - t)).exp(), 0.0];
    let infl = |t: f64, s: f64| [0.0, 0.0, 0.004 * (-0.1 * (s - t)).exp()];
    let leak = [0.004, 0.0, 0.0];
    let build = move |eps: f64| ForwardVols {
        factors: 3,
        nominal: move |t: f64, s: f64| {
            let (r, i) = (real(t, s), infl(t, s));
            rotate([r[0] + i[0] + eps * leak[0], r[1] + i[1], r[2] + i[2]])
        },
        inflation: move |t: f64, s: f64| {
            let i = infl(t, s);
            rotate([i[0] + eps * leak[0], i[1], i[2]])
        },
    };
    let residual = |eps: f64, t1: f64, t2: f64| {
        let v = build(eps);
        consistency_residual(
            |t, u| v.bond_vol(t, u),
            |t, u| v.real_bond_vol(t, u),
            0.25,
            t1,
            t2,
        )
    };
    let spans = [(0.5, 1.0), (1.0, 3.0), (2.0, 7.5), (5.0, 10.0)];
    let base = spans
        .iter()
        .map(|&(a, b)| residual(0.0, a, b).abs())
        .fold(0.0, f64::max);
    let rep = jy_drift_check(&build(0.0), 0.25, 10.0, FD_STEP, 1e-10).map_err(|e| e.to_string())?;
    let slopes: Vec<f64> = [1e-3, 1e-2, 1e-1]
        .iter()
        .map(|&e| residual(e, 1.0, 3.0) / e)
        .collect();
    let spread = slopes
        .iter()
        .map(|s| (s / slopes[0] - 1.0).abs())
        .fold(0.0, f64::max);
    check(
        base < 1e-12 && rep.drift_mismatch < 1e-6 && slopes[0] != 0.0 && spread <= 0.1,
        format!(
            "residual {base:.1e}, drift mismatch {:.1e}, slope {:.3e} varies by {:.1e}",
            rep.drift_mismatch, slopes[0], spread
        ),
    )
}

fn replication() -> Outcome {
    let (market, surface) = calibrated_model();
    let (i1, i2) = (2usize, 5usize);
    let real = market.curves.real();
    let p1 = real.discount(i1 as f64).map_err(|e| e.to_string())?;
    let p2 = real.discount(i2 as f64).map_err(|e| e.to_string())?;
    let fr = forward_real_bond_price(real, i1 as f64, i2 as f64).map_err(|e| e.to_string())?;
    let on_curve = real_bond_replication_pnl(fr, p1, p2, 1.0);

    let model = MarketModel::from_curves(surface, &market.curves)
        .and_then(|m| m.truncated(i2))
        .map_err(|e| e.to_string())?;
    let cfg = McConfig {
        paths: 1000,
        seed: 11,
        ..McConfig::default()
    };
    let paths = inflmm::model::simulate(&model, i2 as f64, &cfg).map_err(|e| e.to_string())?;
    let (mut worst, mut sign_ok) = (0.0f64, true);
    for p in 0..1000 {
        let ratio = paths.view(p).cpi_ratio(0, i2);
        worst = worst.max(real_bond_replication_pnl(fr, p1, p2, ratio).abs());
        sign_ok &= real_bond_replication_pnl(fr + 0.001, p1, p2, ratio) < 0.0;
        sign_ok &= real_bond_replication_pnl(fr - 0.001, p1, p2, ratio) > 0.0;
    }
    check(
        on_curve == 0.0 && worst < 1e-10 && sign_ok,
        format!("curve P&L {on_curve:e}, max path P&L {worst:.1e}, 10 bp mispricing signs consistent: {sign_ok}"),
    )
}

fn generate_then_recover() -> Outcome {
    let (_, market) = euro_market();
    let grid = TenorGrid::uniform(1.0, 12).map_err(|e| e.to_string())?;
    let truth = |rho: f64| {
        VolSurface::two_factor(
            grid.clone(),
            |_, _| 0.15,
            |j, i| 0.004 + 0.0002 * j as f64 + 0.0001 * i as f64,
            &CorrelationSpec::constant(rho),
        )
        .unwrap()
    };
    let base = truth(0.0);
    let fwd = market
        .curves
        .nominal()
        .forwards_on(&grid)
        .map_err(|e| e.to_string())?;
    let targets_for = |s: &VolSurface| -> Vec<CalibrationTarget> {
        let mut t: Vec<CalibrationTarget> = (1..=12)
            .map(|j| CalibrationTarget::caplet_vol(j, s.caplet_vol(j)))
            .collect();
        for n in [3usize, 5, 7, 10] {
            t.push(CalibrationTarget::cap_price(
                0,
                n,
                0.025,
                price_cap_span(&market.curves, s, 0, n, 0.025, 1.0).unwrap(),
            ));
        }
        for m in 1..=9 {
            let view = swap_rate_view(&market.curves, &grid, m, m + 3).unwrap();
            let var = SwaptionVariance::new(&view, s, &fwd)
                .unwrap()
                .total_variance(s);
            t.push(CalibrationTarget::swaption_vol(
                m,
                m + 3,
                (var / m as f64).sqrt(),
            ));
        }
        t
    };
    let surface_targets = targets_for(&truth(-0.0535));
    let settings = CalibrationSettings {
        time_homogeneous: false,
        correlation: CorrelationMode::Fixed { rho: vec![-0.0535] },
        ..CalibrationSettings::default()
    };
    let fit = calibrate_nonparametric(&market.curves, &base, &surface_targets[..12], &settings)
        .map_err(|e| e.to_string())?;
    let fit_all = calibrate_nonparametric(&market.curves, &base, &surface_targets[12..], &settings)
        .map_err(|e| e.to_string())?;
    let reprice = fit
        .max_relative_residual()
        .max(fit_all.max_relative_residual());

    let homogeneous = VolSurface::two_factor(
        grid.clone(),
        |_, _| 0.15,
        |j, _| 0.004 + 0.0003 * j as f64,
        &CorrelationSpec::constant(0.0),
    )
    .map_err(|e| e.to_string())?;
    let rho_targets: Vec<CalibrationTarget> = {
        let t = targets_for(&homogeneous);
        [&t[..12], &t[16..]].concat()
    };
    let solve = CalibrationSettings {
        correlation: CorrelationMode::Solve { initial: -0.3 },
        ..CalibrationSettings::default()
    };
    let rho = implied_correlation(&market.curves, &base, &rho_targets, &solve)
        .map_err(|e| e.to_string())?;
    let rho_err = rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    check(
        fit.converged && fit_all.converged && reprice < 1e-8 && rho_err <= 1e-3,
        format!("max relative repricing residual {reprice:.1e}, max |rho| {rho_err:.1e}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("ZCIIS round trip", zciis_round_trip),
        ("calibration repricing", calibration_repricing),
        ("caplet Monte Carlo oracle", caplet_mc_oracle),
        ("swaption freezing error", swaption_freezing),
        ("parity suite", parity_suite),
        ("martingale suite", martingale_suite),
        ("consistency / JY bridge", consistency_bridge),
        ("real bond replication", replication),
        ("generate-then-recover calibration", generate_then_recover),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS [{}] {name}: {d} ({secs:.2}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{}] {name}: {d} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
