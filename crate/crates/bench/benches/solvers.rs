use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use omega_core::experiments::{instance_rng, random_matrix};
use omega_core::{
    maximize_rho, minimize_rho, oracle_extremes, perron, EntryDistribution, Matrix,
    OptimizeOptions, OracleOptions, PerronOptions,
};

fn sample(n: usize) -> Matrix {
    let dist = EntryDistribution::UniformInt { lo: 1, hi: 9 };
    random_matrix(n, &mut instance_rng(1, n, 0), &dist).unwrap()
}

fn bench_perron(c: &mut Criterion) {
    let mut group = c.benchmark_group("perron");
    for n in [5, 50, 200] {
        let a = sample(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| perron(black_box(a), &PerronOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_optimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize");
    group.sample_size(20);
    for n in [5, 50, 200] {
        let a = sample(n);
        group.bench_with_input(BenchmarkId::new("max", n), &a, |b, a| {
            b.iter(|| maximize_rho(black_box(a), &OptimizeOptions::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("min", n), &a, |b, a| {
            b.iter(|| minimize_rho(black_box(a), &OptimizeOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for n in [3, 4] {
        let a = sample(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| oracle_extremes(black_box(a), &OracleOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_perron, bench_optimize, bench_oracle);
criterion_main!(benches);
