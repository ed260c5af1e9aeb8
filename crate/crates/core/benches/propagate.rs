use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rafu::config::StudyConfig;
use rafu::engine::{plan, propagate_with, ExecMode, ModelEvaluator};

fn study(gamma_e: &str, n: usize, model: &str) -> StudyConfig {
    StudyConfig::from_json(&format!(
        r#"{{
            "parameters": [
                {{"name": "x1", "aleatory": {{"kind": "uniform", "lo": 0, "hi": 1}}}},
                {{"name": "x2", "aleatory": {{"kind": "normal", "mean": 1, "sd": 0.2}}}},
                {{"name": "e1", "epistemic": {{"kind": "triangular", "a": 0, "core": 1, "b": 2}}}},
                {{"name": "e2", "epistemic": {{"kind": "trapezoidal", "a": 1, "core_lo": 2, "core_hi": 3, "b": 5}}}}
            ],
            "model": "{model}",
            "triplet": {{"gamma_s": "cdf", "gamma_e": {gamma_e}, "gamma_a": "none"}},
            "sample_size": {n},
            "seed": 1
        }}"#
    ))
    .unwrap()
}

fn bench_modes(c: &mut Criterion) {
    let cases = [
        ("grid21_n1000", r#"{"kind": "grid", "levels": 21}"#, 1000),
        ("random_n10000", r#"{"kind": "random_alpha"}"#, 10_000),
    ];
    let model = "x1 * exp(e1 / 3) + x2 * sqrt(e2) - ln(1 + e1 * e2)";
    let mut group = c.benchmark_group("propagate");
    group.sample_size(20);
    for (name, gamma_e, n) in cases {
        let config = study(gamma_e, n, model);
        let plan = plan(&config).unwrap();
        let evaluator = ModelEvaluator::for_config(&config);
        for (label, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &mode, |b, &mode| {
                b.iter(|| propagate_with(&plan, &config, &evaluator, mode).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_modes);
criterion_main!(benches);
