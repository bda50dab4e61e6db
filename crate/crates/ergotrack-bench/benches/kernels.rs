//! Criterion benchmarks for the hot kernels.
//!
//! - `tracking_dp`: windowed minimal-cost word search on a subshift;
//! - `risk_scan`: angle identification over a theta/start grid;
//! - `exact_simplex`: rational simplex on a block-coupling program;
//! - `block_counts`: arc-based label word counting over an angle grid;
//! - `mle_grid`: grid likelihood scan with refinement.
//!
//! Inputs are seeded once outside the measured loops, so numbers track code
//! changes rather than sampling noise.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ergotrack_core::joinlp::{build_instance, hamming_table, rat, solve, ExactProcess};
use ergotrack_core::mle::{mle_estimate, DensityFamily};
use ergotrack_core::quantident::{block_complexity, estimate_theta, generate, RotationFamily};
use ergotrack_core::tracking::{optimal_tracking, TrackingOptions, TrackingProblem};
use ergotrack_core::{
    Angle, CostFunction, DensityKind, Grid, ObservationSource, Partition, RngStream, SftGraph,
    TopologicalSystem,
};

fn tracking_dp(c: &mut Criterion) {
    let window = ObservationSource::iid_binary(0.5)
        .unwrap()
        .sample(4096, RngStream::new(11))
        .unwrap();
    let problem = TrackingProblem {
        reference: TopologicalSystem::subshift(SftGraph::golden_mean()),
        cost: CostFunction::hamming(),
    };
    let opts = TrackingOptions::default();
    c.bench_function("tracking_dp/golden_mean_n4096", |b| {
        b.iter(|| optimal_tracking(black_box(&problem), black_box(&window), &opts).unwrap())
    });
}

fn risk_scan(c: &mut Criterion) {
    let family = RotationFamily::new(
        Grid::new(0.0, 0.5 / 200.0, 201).unwrap(),
        Grid::new(0.0, 0.01, 100).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    let run = generate(
        Angle::float(std::f64::consts::SQRT_2 / 4.0).unwrap(),
        0.1,
        2_000,
        RngStream::new(12),
        family.partition(),
        None,
    )
    .unwrap();
    c.bench_function("risk_scan/theta201_u100_n2000", |b| {
        b.iter(|| estimate_theta(black_box(&family), black_box(&run.observed)).unwrap())
    });
}

fn exact_simplex(c: &mut Criterion) {
    let graph = SftGraph::golden_mean();
    let cost = hamming_table(2, 2);
    let blocks = ExactProcess::iid_bits(rat(1, 2)).unwrap().blocks(3).unwrap();
    let instance = build_instance(&graph, &blocks, &cost, 2).unwrap();
    c.bench_function("exact_simplex/golden_mean_k2", |b| {
        b.iter(|| solve(black_box(&instance)).unwrap())
    });
}

fn block_counts(c: &mut Criterion) {
    let family = RotationFamily::new(
        Grid::new(0.0, 0.5 / 99.0, 100).unwrap(),
        Grid::new(0.0, 0.01, 100).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    c.bench_function("block_counts/grid100_n32", |b| {
        b.iter(|| block_complexity(black_box(&family), 32).unwrap())
    });
}

fn mle_grid(c: &mut Criterion) {
    let family = DensityFamily::new(
        DensityKind::Bernoulli,
        Grid::covering(0.0, 1.0, 0.01).unwrap(),
    )
    .unwrap();
    let window = ObservationSource::markov(vec![vec![0.9, 0.1], vec![0.3, 0.7]])
        .unwrap()
        .sample(20_000, RngStream::new(13))
        .unwrap();
    c.bench_function("mle_grid/bernoulli_grid101_n20000", |b| {
        b.iter(|| mle_estimate(black_box(&family), black_box(&window), true).unwrap())
    });
}

criterion_group!(benches, tracking_dp, risk_scan, exact_simplex, block_counts, mle_grid);
criterion_main!(benches);
