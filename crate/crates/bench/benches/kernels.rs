use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kksym::lie_algebra::{classify, AlgebraElement};
use kksym::sampling::Sampler;
use kksym::symmetry::{self, symmetry_residual};
use kksym::{christoffel_at, integrate, Coordinates, IntegratorConfig, MetricParams, PhaseState};

fn bench_christoffel(c: &mut Criterion) {
    let p = MetricParams::default();
    let x = Coordinates::new(0.0, 3.7, 1.1, 0.4, 2.2);
    c.bench_function("christoffel_at", |b| {
        b.iter(|| christoffel_at(black_box(&x), &p).unwrap())
    });
}

fn bench_symmetry_residual(c: &mut Criterion) {
    let p = MetricParams::default();
    let jet = Sampler::new(p, 7).on_shell_jet();
    let gens = symmetry::basis();
    c.bench_function("symmetry_residual X1..X7", |b| {
        b.iter(|| {
            for g in &gens {
                black_box(symmetry_residual(g, black_box(&jet), &p).unwrap());
            }
        })
    });
}

fn bench_integrate(c: &mut Criterion) {
    let p = MetricParams::default();
    let initial = PhaseState::new(
        0.0,
        Coordinates::new(0.0, 5.0, 1.0, 0.0, 0.0),
        [1.5, 0.0, 0.02, 0.05, 0.05],
    );
    let cfg = IntegratorConfig::default();
    let mut group = c.benchmark_group("integrate");
    group.sample_size(20);
    group.bench_function("default tolerances, s_end = 10", |b| {
        b.iter(|| integrate(black_box(&initial), &p, &cfg).unwrap())
    });
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let u = AlgebraElement([0.3, -1.2, 0.5, 2.0, -0.7, 1.1, 0.4]);
    c.bench_function("classify dense element", |b| {
        b.iter(|| classify(black_box(&u)).unwrap())
    });
}

criterion_group!(
    kernels,
    bench_christoffel,
    bench_symmetry_residual,
    bench_integrate,
    bench_classify
);
criterion_main!(kernels);
