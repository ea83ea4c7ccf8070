//! Solver benchmarks over seeded instances, so runs are comparable
//! across machines and revisions.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mapu::generator::{random_instance, random_square_integer_instance};
use mapu::{optimal_assignment, solve, UpgradeSet};

/// Full pipeline on square integer instances of growing size.
fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for n in [50usize, 100, 200] {
        let instance = random_square_integer_instance(7, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &instance, |b, instance| {
            b.iter(|| solve(black_box(instance)).expect("solver succeeds"));
        });
    }
    group.finish();
}

/// The matching kernel alone: one assignment for a fixed upgrade set.
fn bench_assignment(c: &mut Criterion) {
    let mut group = c.benchmark_group("assignment");
    for n in [50usize, 100, 200] {
        let instance = random_square_integer_instance(11, n);
        let upgrades = UpgradeSet::from_ids(
            instance.suppliers().iter().take(instance.k()).map(|s| s.id.clone()),
        );
        group.bench_with_input(BenchmarkId::from_parameter(n), &instance, |b, instance| {
            b.iter(|| {
                optimal_assignment(black_box(instance), black_box(&upgrades))
                    .expect("assignment succeeds")
            });
        });
    }
    group.finish();
}

/// Small ragged instances, the shape the randomized test sweeps use.
fn bench_small_sweep(c: &mut Criterion) {
    let instances: Vec<_> = (0..32u64).map(|seed| random_instance(seed, 7)).collect();
    c.bench_function("sweep/32-small-instances", |b| {
        b.iter(|| {
            for instance in &instances {
                solve(black_box(instance)).expect("solver succeeds");
            }
        });
    });
}

criterion_group!(benches, bench_solve, bench_assignment, bench_small_sweep);
criterion_main!(benches);
