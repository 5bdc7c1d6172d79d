use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use taa_core::{
    build_effective_hamiltonian, eigendecompose, scatter_exact, scatter_markovian, sweep, Angle, Axis, AxisParam,
    Direction, Observable, Spacing, SweepSpec, SystemParams,
};

fn eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigendecompose");
    for n in [7, 21, 61] {
        let h = build_effective_hamiltonian(&SystemParams {
            n,
            ..SystemParams::reference(Angle::from_pi(0.2), 0.0)
        })
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| eigendecompose(black_box(h))));
    }
    group.finish();
}

fn scattering(c: &mut Criterion) {
    let params = SystemParams::reference(Angle::from_pi(0.2), 0.013);
    c.bench_function("scatter_markovian/N7", |b| {
        b.iter(|| scatter_markovian(black_box(&params), black_box(0.3), Direction::Left))
    });
    c.bench_function("scatter_exact/N7", |b| {
        b.iter(|| scatter_exact(black_box(&params), black_box(0.3), Direction::Left))
    });
}

fn sweeps(c: &mut Criterion) {
    let base = SystemParams::reference(Angle::from_pi(0.2), 0.0);
    let spec = SweepSpec::new(
        base,
        vec![
            Axis::linear(AxisParam::Phi, 0.1, 0.4, 40),
            Axis::linear(AxisParam::GammaF, -0.03, 0.03, 41).with_spacing(Spacing::SignedLog),
        ],
        vec![Observable::T, Observable::R, Observable::DeltaChi],
    );
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("phi_x_gamma_f/40x41", |b| b.iter(|| sweep(black_box(&spec))));
    group.finish();
}

criterion_group!(benches, eigensolve, scattering, sweeps);
criterion_main!(benches);
