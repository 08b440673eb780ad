use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use forestmat::markov::{DEFAULT_CESARO_TOL, DEFAULT_T_MAX};
use forestmat::{
    cesaro_limit, check_condition, dissemination_estimate, enumerate_out_forests,
    exact_forest_recurrence, forest_stack, inverse_corresponding_chain, out_accessibility,
    verify_digraph, Condition, Direction, MeasureSpec, Mode, Tau, Variant,
};
use forestmat_bench::{cycle, probability_path, random_digraph};

fn recurrence(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest_recurrence");
    // The recurrence loses accuracy past n ~ 16; stay inside its working range.
    for n in [4, 8, 12, 16] {
        let g = random_digraph(n, 0.6, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| forest_stack(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_recurrence");
    for n in [4, 6, 8] {
        let g = random_digraph(n, 0.4, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| exact_forest_recurrence(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_out_forests");
    group.sample_size(10);
    for n in [4, 5, 6] {
        let g = random_digraph(n, 0.5, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| enumerate_out_forests(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn accessibility(c: &mut Criterion) {
    let g = random_digraph(6, 0.4, 11);
    c.bench_function("out_accessibility/n6", |b| {
        b.iter(|| out_accessibility(black_box(&g), Tau::Finite(1.0)).unwrap())
    });
    let spec = MeasureSpec {
        direction: Direction::Out,
        tau: Tau::Finite(1.0),
    };
    let mut group = c.benchmark_group("monotonicity");
    group.sample_size(10);
    group.bench_function("n6", |b| {
        b.iter(|| check_condition(&g, spec, Condition::Monotonicity, Variant::A, Mode::Strict).unwrap())
    });
    group.finish();
}

fn markov(c: &mut Criterion) {
    let mut group = c.benchmark_group("cesaro_limit");
    for n in [5, 20] {
        let chain = inverse_corresponding_chain(&cycle(n), None).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &chain, |b, chain| {
            b.iter(|| cesaro_limit(black_box(chain), DEFAULT_CESARO_TOL, DEFAULT_T_MAX).unwrap())
        });
    }
    group.finish();

    let g = probability_path(4, 0.5);
    let mut group = c.benchmark_group("dissemination");
    group.sample_size(10);
    group.bench_function("path4/1e4", |b| {
        b.iter(|| dissemination_estimate(black_box(&g), 10_000, 1).unwrap())
    });
    group.finish();
}

fn verification(c: &mut Criterion) {
    let g = random_digraph(5, 0.4, 5);
    let mut group = c.benchmark_group("verify_digraph");
    group.sample_size(10);
    group.bench_function("n5", |b| b.iter(|| verify_digraph(black_box(&g)).unwrap()));
    group.finish();
}

criterion_group!(benches, recurrence, exact, enumeration, accessibility, markov, verification);
criterion_main!(benches);
