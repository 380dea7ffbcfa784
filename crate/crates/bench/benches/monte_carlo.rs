use criterion::{criterion_group, criterion_main, Criterion};
use inflmm::model::{simulate, MarketModel, McConfig, Measure};
use inflmm::pricing::{mc_values, Instrument, InstrumentKind};
use inflmm_bench::{calibrated_surface, curves};

fn bench(c: &mut Criterion) {
    let curves = curves();
    let model = MarketModel::from_curves(calibrated_surface(&curves), &curves)
        .and_then(|m| m.truncated(10))
        .unwrap();
    let book: Vec<Instrument> = (1..=10)
        .map(|j| Instrument {
            id: format!("caplet_{j}"),
            kind: InstrumentKind::Caplet,
            start: (j - 1) as f64,
            end: j as f64,
            freq: 1.0,
            strike: 0.02,
            notional: 1.0,
        })
        .collect();
    let mut group = c.benchmark_group("monte carlo");
    group.sample_size(10);
    for measure in [Measure::Spot, Measure::Forward { maturity: 10 }] {
        let cfg = McConfig {
            paths: 20_000,
            measure,
            ..McConfig::default()
        };
        group.bench_function(format!("10 caplets, 20k paths, {measure:?}"), |b| {
            b.iter(|| mc_values(&model, &book, &cfg).unwrap())
        });
    }
    let cfg = McConfig {
        paths: 2_000,
        ..McConfig::default()
    };
    group.bench_function("store 2k paths to 10y", |b| {
        b.iter(|| simulate(&model, 10.0, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
