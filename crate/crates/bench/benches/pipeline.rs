use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twocrystal_bench::{source_fixture, tomography_fixture};
use twocrystal_core::interference::default_tau_grid;
use twocrystal_core::source::DEFAULT_POSITION_GRID;
use twocrystal_core::{
    chsh_scan, dual_basis, effective_spectrum, fringe_pattern, linear_inversion, log_likelihood,
    mle_reconstruct, position_averaged_p, standard_set, MleOptions, OptimizerKind, SpectrumMode,
    TriangularParam,
};

fn tomography(c: &mut Criterion) {
    let data = tomography_fixture(0.53, 3e4, 1);
    let set = standard_set();
    let dual = dual_basis(&set).unwrap();
    let mut g = c.benchmark_group("tomography");
    g.bench_function("dual_basis", |b| {
        b.iter(|| dual_basis(black_box(&set)).unwrap())
    });
    g.bench_function("linear_inversion", |b| {
        b.iter(|| linear_inversion(black_box(&data), &dual).unwrap())
    });
    let t = TriangularParam::from_density(&linear_inversion(&data, &dual).unwrap().matrix)
        .unwrap_or_else(|_| TriangularParam::new([0.5; 16]));
    g.bench_function("log_likelihood", |b| {
        b.iter(|| log_likelihood(black_box(&t), &data))
    });
    g.sample_size(20);
    for kind in [OptimizerKind::Simplex, OptimizerKind::Annealing] {
        let opts = MleOptions::default().with_optimizer(kind);
        g.bench_with_input(BenchmarkId::new("mle", kind), &opts, |b, opts| {
            b.iter(|| mle_reconstruct(black_box(&data), opts).ok())
        });
    }
    g.finish();
}

fn source(c: &mut Criterion) {
    let mut g = c.benchmark_group("source");
    for length in [0.5, 3.0] {
        let cfg = source_fixture(length);
        g.bench_with_input(
            BenchmarkId::new("position_average", length),
            &cfg,
            |b, cfg| b.iter(|| position_averaged_p(black_box(cfg), DEFAULT_POSITION_GRID).unwrap()),
        );
    }
    let thetas: Vec<f64> = (0..=180).map(|i| i as f64 * 0.5).collect();
    g.bench_function("chsh_scan", |b| {
        b.iter(|| chsh_scan(0.77, black_box(&thetas)).unwrap())
    });
    g.finish();
}

fn interference(c: &mut Criterion) {
    let cfg = source_fixture(3.0);
    let taus = default_tau_grid();
    let mut g = c.benchmark_group("interference");
    g.sample_size(10);
    g.bench_function("coincidence_spectrum", |b| {
        b.iter(|| effective_spectrum(black_box(&cfg), SpectrumMode::Coincidence).unwrap())
    });
    let spectrum = effective_spectrum(&cfg, SpectrumMode::Single).unwrap();
    g.bench_function("fringe_pattern", |b| {
        b.iter(|| fringe_pattern(black_box(&spectrum), &taus))
    });
    g.finish();
}

criterion_group!(benches, tomography, source, interference);
criterion_main!(benches);
