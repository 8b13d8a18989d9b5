use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use zenolab::apparatus::{log_space, regime_scan, ApparatusProfile, LevelStructure};
use zenolab::qstate::herm_propagator;
use zenolab::spatial::{evolve_master, max_stable_dt, GridState, MasterEquationSpec};
use zenolab::{CMatrix, C64};

fn tridiagonal(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => C64::new(i as f64 * 0.1, 0.0),
        1 => C64::new(1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    })
}

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("herm_propagator");
    for n in [2, 16, 64] {
        let h = tridiagonal(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| herm_propagator(black_box(h), 0.7).unwrap())
        });
    }
    group.finish();
}

fn master_equation(c: &mut Criterion) {
    let gs = GridState::gaussian(64, 1.0, 10.0, -0.1, 0.05, 5.0).unwrap();
    let spec = MasterEquationSpec::new(10.0, 0.0, true).unwrap();
    let dt = max_stable_dt(&gs, &spec);
    c.bench_function("master_equation_64x64_10_steps", |b| {
        b.iter(|| evolve_master(black_box(&gs), &spec, 10.0 * dt, dt).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let ls = LevelStructure::sampled(
        -100.0,
        100.0,
        4001,
        |_| 1.0,
        |e| 0.01 * (-e * e / 800.0).exp() + 5.0 * (-(e - 10.0).powi(2) / 2.0).exp(),
        1.0,
        0.0,
    )
    .unwrap();
    let app = ApparatusProfile::gaussian(1.0, 257).unwrap();
    let gammas = log_space(1e-2, 1e4, 41);
    let mut group = c.benchmark_group("regime_scan_41");
    group.sample_size(10);
    for parallel in [false, true] {
        group.bench_with_input(BenchmarkId::from_parameter(parallel), &parallel, |b, &p| {
            b.iter(|| regime_scan(&ls, &app, &gammas, 1.0, p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, propagator, master_equation, scan);
criterion_main!(benches);
