//! One worker thread against the default rayon pool on the two Monte Carlo
//! workloads that dominate run time.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funkmeans::assoc::{monte_carlo_suite, AssocConfig, GenModel};
use funkmeans::fourier::{empirical_penalty_mc, PeriodicProblem};
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = ThreadPoolBuilder::new().build().unwrap();
    let label = format!("default-{}", default.current_num_threads());
    vec![
        (
            "1-thread".to_string(),
            ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        ),
        (label, default),
    ]
}

fn assoc_suite(c: &mut Criterion) {
    let config = AssocConfig {
        starts: 3,
        ..AssocConfig::new(GenModel::three_tracks())
    };
    let mut group = c.benchmark_group("assoc_suite");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| monte_carlo_suite(&config, black_box(&[300]), 8, 1).unwrap()))
        });
    }
    group.finish();
}

fn fourier_mc(c: &mut Criterion) {
    let problem = PeriodicProblem::noise_only(1001, 1.0, 0.0, 1.0).unwrap();
    let mut group = c.benchmark_group("fourier_mc");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| empirical_penalty_mc(black_box(&problem), 500, 1).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, assoc_suite, fourier_mc);
criterion_main!(benches);
