use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use weakphase_core::geometry::{bargmann, geodesic_triangle_phase};
use weakphase_core::linalg::haar_random_ket;
use weakphase_core::pointer::{protocol_run, weak_limit_estimate, Parallelism};
use weakphase_core::sic::{builtin_sic, phase_composition_check, triple_phase_census};
use weakphase_core::ProtocolConfig;

fn bench_bargmann(c: &mut Criterion) {
    let mut group = c.benchmark_group("bargmann");
    for d in [2usize, 4, 8, 16] {
        let states: Vec<_> = (0..8).map(|s| haar_random_ket(d, s).unwrap()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(d), &states, |b, s| {
            b.iter(|| bargmann(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_triangle(c: &mut Criterion) {
    let mut group = c.benchmark_group("geodesic_triangle_phase");
    let a = haar_random_ket(3, 1).unwrap();
    let b = haar_random_ket(3, 2).unwrap();
    let k = haar_random_ket(3, 3).unwrap();
    for n in [64usize, 512, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, &n| {
            bch.iter(|| geodesic_triangle_phase(&a, &b, &k, black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_sic(c: &mut Criterion) {
    let set = builtin_sic(3).unwrap();
    c.bench_function("census_d3", |b| {
        b.iter(|| triple_phase_census(black_box(&set)))
    });
    c.bench_function("composition_d3", |b| {
        b.iter(|| phase_composition_check(black_box(&set)))
    });
}

fn bench_pointer(c: &mut Criterion) {
    let set = builtin_sic(2).unwrap();
    let s = set.states();
    c.bench_function("weak_limit_estimate", |b| {
        b.iter(|| weak_limit_estimate(&s[1], &s[0], &s[2], 1.0, black_box(0.01)).unwrap())
    });
    let cfg = ProtocolConfig {
        dim: 2,
        i: 0,
        j: 1,
        k: 2,
        g: 0.01,
        sigma: 1.0,
        shots_x: 20_000,
        shots_p: 20_000,
        seed: 7,
        grid: None,
    };
    let mut group = c.benchmark_group("protocol_40k_shots");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| protocol_run(&set, &cfg, Parallelism::Sequential).unwrap())
    });
    group.bench_function("parallel", |b| {
        b.iter(|| protocol_run(&set, &cfg, Parallelism::Global).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_bargmann,
    bench_triangle,
    bench_sic,
    bench_pointer
);
criterion_main!(benches);
