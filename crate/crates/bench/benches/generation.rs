use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hopss_bench::{base_pairs, grf_field, ns_desk};
use hopss_core::hopss::{mixup_pair, HopssGenerator, ResidualOperator};
use hopss_core::solver::Stepper;
use hopss_core::spectral::{forward, inverse};
use hopss_core::{GrfParams, HopssConfig, NonlinearForm, SolverOptions, TraditionConfig};

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft");
    for (dims, n) in [(1, 1024), (2, 64), (2, 128)] {
        let f = grf_field(dims, n, GrfParams::new(2.0, 2.5, 1.0), 1);
        group.bench_function(format!("{dims}d_{n}_round_trip"), |b| b.iter(|| inverse(&forward(black_box(&f)))));
    }
    group.finish();
}

fn solver_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver_step");
    let presets = [
        ("ns2d_64", TraditionConfig::navier_stokes_desk()),
        ("ns2d_128", TraditionConfig::navier_stokes()),
        ("burgers_1024", TraditionConfig::burgers()),
        ("kdv_512", TraditionConfig::kdv()),
    ];
    for (name, config) in presets {
        let grid = config.fine_grid().unwrap();
        let u = grf_field(grid.dims(), grid.n(), config.forcing, 2);
        let f = grf_field(grid.dims(), grid.n(), config.forcing, 3);
        let mut stepper = Stepper::new(config.pde, grid, config.dt, SolverOptions::default()).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| stepper.run(black_box(&u), &f, 10, 10).unwrap());
        });
    }
    group.finish();
}

fn residual(c: &mut Criterion) {
    let base = base_pairs(ns_desk(1, 200), 4);
    let u = &base[0].u;
    let mut op = ResidualOperator::new(base[0].pde, u.grid(), u.dt(), NonlinearForm::Convective).unwrap();
    c.bench_function("residual/ns2d_64x21", |b| b.iter(|| op.residual(black_box(u)).unwrap()));
}

fn generation(c: &mut Criterion) {
    let base = base_pairs(ns_desk(8, 200), 5);
    let generator = HopssGenerator::new(&base, HopssConfig::default(), 6).unwrap();
    let mut group = c.benchmark_group("generation");
    group.sample_size(20);
    let mut k = 0u64;
    group.bench_function("hopss_pair/ns2d_64x21", |b| {
        b.iter(|| {
            k += 1;
            generator.pair(k).unwrap()
        })
    });
    group.bench_function("mixup_pair/ns2d_64x21_from_8", |b| {
        b.iter(|| {
            k += 1;
            mixup_pair(&base, 7, k).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, fft, solver_step, residual, generation);
criterion_main!(benches);
