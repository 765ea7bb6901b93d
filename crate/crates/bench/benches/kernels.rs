use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use thermoprobe_core::matcore::hermitian_eig;
use thermoprobe_core::metrology::qfi;
use thermoprobe_core::sensor::{
    build_hamiltonian, gibbs_state, thermal_state_closed_form, ThermalFamily, ThermalPoint,
};
use thermoprobe_core::sweep::{figure_preset, run_sweep, FigurePreset, SweepOptions};
use thermoprobe_core::teleport::{InputState, TeleportedFamily};
use thermoprobe_core::SensorParams;

fn reference_params() -> SensorParams {
    SensorParams::symmetric(1.0, 0.1, 1.0, 1.0, 1.0)
}

fn bench_eigensolver(c: &mut Criterion) {
    let h = build_hamiltonian(&reference_params());
    c.bench_function("hermitian_eig_4x4", |b| {
        b.iter(|| hermitian_eig(black_box(&h)).unwrap())
    });
}

fn bench_thermal_state(c: &mut Criterion) {
    let p = reference_params();
    let t = ThermalPoint::new(0.5).unwrap();
    c.bench_function("thermal_state_closed_form", |b| {
        b.iter(|| thermal_state_closed_form(black_box(&p), black_box(&t)).unwrap())
    });
    c.bench_function("gibbs_state_spectral", |b| {
        b.iter(|| gibbs_state(black_box(&p), black_box(&t)).unwrap())
    });
}

fn bench_qfi(c: &mut Criterion) {
    let direct = ThermalFamily::new(reference_params()).unwrap();
    let remote = TeleportedFamily::new(
        reference_params(),
        InputState::new(PI / 2.0, PI / 2.0).unwrap(),
    )
    .unwrap();
    c.bench_function("qfi_direct_point", |b| {
        b.iter(|| qfi(black_box(&direct), black_box(0.5)).unwrap())
    });
    c.bench_function("qfi_remote_point", |b| {
        b.iter(|| qfi(black_box(&remote), black_box(0.5)).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let (mut spec, _) = figure_preset(FigurePreset::Fig4);
    spec.t_grid.count = 50;
    let opts = SweepOptions::default();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(20);
    group.bench_function("fig4_50_points", |b| {
        b.iter(|| run_sweep(black_box(&spec), black_box(&opts)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_eigensolver,
    bench_thermal_state,
    bench_qfi,
    bench_sweep
);
criterion_main!(benches);
