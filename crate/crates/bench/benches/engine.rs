use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gradclust_bench::fixture;
use gradclust_core::engine::{assign, center_gradient, gradient_step, run};
use gradclust_core::{DivergencePair, StepConfig};
use std::hint::black_box;

fn pairs() -> Vec<(&'static str, DivergencePair)> {
    vec![
        ("sq_euclid", DivergencePair::squared_euclidean()),
        ("huber", DivergencePair::huber(1.0).unwrap()),
    ]
}

fn bench_assign(c: &mut Criterion) {
    let mut group = c.benchmark_group("assign");
    for (name, pair) in pairs() {
        let (data, init) = fixture(10, 64, 500, &pair);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| assign(black_box(&init), &data, &pair, None).unwrap())
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient_step");
    for (name, pair) in pairs() {
        let (data, init) = fixture(10, 64, 500, &pair);
        let a = assign(&init, &data, &pair, None).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let g = center_gradient(black_box(&init), &a, &data, &pair).unwrap();
                gradient_step(&init, &g, 0.5).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_run(c: &mut Criterion) {
    let pair = DivergencePair::squared_euclidean();
    let (data, init) = fixture(3, 8, 300, &pair);
    let config = StepConfig::new(1.0);
    c.bench_function("run/sq_euclid_k3", |b| {
        b.iter(|| run(&data, &pair, black_box(init.clone()), &config).unwrap())
    });
}

criterion_group!(benches, bench_assign, bench_step, bench_run);
criterion_main!(benches);
