//! Benchmarks of the hot paths: the dealiased right-hand side, one
//! integrating-factor step, polynomial quadrature, the divergence sum,
//! Gaussian sampling, and the Leibniz derivative of the top functional.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnls_core::flows::{default_dt, evolve, gdnls_rhs, ModelParams};
use dnls_core::gauge::gauge_divergence;
use dnls_core::invariants::{dn_energy, DerivativeMode, EnergyIndex};
use dnls_core::measures::{sample_gamma, MeasureSpec, VarianceConvention};
use dnls_core::spectral::{integral_product, ProductFactor};
use dnls_core::states::random_smooth_state;
use std::hint::black_box;

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("gdnls_rhs");
    for n in [32usize, 64, 128] {
        let params = ModelParams::canonical(1.0, 2, n);
        let state = random_smooth_state(n, 0.1, 0.2, 1, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(gdnls_rhs(black_box(&state), &params)))
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("if_rk4_step");
    for n in [32usize, 64] {
        let params = ModelParams::canonical(1.0, 2, n);
        let state = random_smooth_state(n, 0.1, 0.2, 1, 0);
        let dt = default_dt(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(evolve(black_box(&state), &params, dt, dt).unwrap()))
        });
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let state = random_smooth_state(64, 0.1, 0.2, 1, 0);
    c.bench_function("integral_product_degree10_n64", |b| {
        let factors: Vec<ProductFactor> = (0..10)
            .map(|i| ProductFactor::new(&state, i % 2 == 1, u32::from(i == 0)))
            .collect();
        b.iter(|| black_box(integral_product(black_box(&factors)).unwrap()))
    });
}

fn bench_divergence(c: &mut Criterion) {
    let state = random_smooth_state(1024, 0.5, 0.01, 1, 0);
    c.bench_function("gauge_divergence_n1024", |b| {
        b.iter(|| black_box(gauge_divergence(black_box(&state), 1024)))
    });
}

fn bench_sampling(c: &mut Criterion) {
    let spec = MeasureSpec::new(2, 64, VarianceConvention::Physical);
    c.bench_function("sample_gamma_n64", |b| {
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            black_box(sample_gamma(&spec, i, 3))
        })
    });
}

fn bench_leibniz(c: &mut Criterion) {
    let n = 32usize;
    let params = ModelParams::canonical(1.0, 2, n);
    let spec = MeasureSpec::new(2, n, VarianceConvention::Wick).with_restriction(0.5);
    let state = {
        let (s, _) = dnls_core::measures::sample_gamma_restricted(&spec, 5, 11).unwrap();
        s
    };
    c.bench_function("dn_energy_leibniz_e2_n32", |b| {
        b.iter(|| {
            black_box(
                dn_energy(
                    black_box(&state),
                    EnergyIndex::Two,
                    &params,
                    DerivativeMode::Leibniz,
                    0.0,
                )
                .unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    bench_rhs,
    bench_step,
    bench_quadrature,
    bench_divergence,
    bench_sampling,
    bench_leibniz
);
criterion_main!(benches);
