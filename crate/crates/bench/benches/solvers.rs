use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tverberg::constructions::{gen_gaussian, gen_hyperbolic};
use tverberg::search::random_partition;
use tverberg::{banach, euclid, hyperbolic, oracle, NormKind, TransversalPartition};

fn bench_euclid(c: &mut Criterion) {
    let mut group = c.benchmark_group("euclid_local_search");
    for &(k, r, dim) in &[(4, 3, 4), (8, 4, 6), (16, 5, 8)] {
        let cfg = gen_gaussian(k, r, dim, 1).unwrap();
        let init = random_partition(k, r, 2);
        let eps = euclid::default_eps(&cfg);
        group.bench_with_input(BenchmarkId::from_parameter(format!("k{k}_r{r}_d{dim}")), &cfg, |b, cfg| {
            b.iter(|| euclid::local_search_euclid(black_box(cfg), &init, eps).unwrap())
        });
    }
    group.finish();
}

fn bench_banach(c: &mut Criterion) {
    let mut group = c.benchmark_group("banach_local_search");
    for norm in [NormKind::Lp(1.0), NormKind::Lp(1.5), NormKind::LInfinity] {
        let cfg = gen_gaussian(6, 4, 6, 3).unwrap();
        let init = TransversalPartition::identity(6, 4);
        let eps = banach::default_eps(&cfg, norm);
        group.bench_with_input(BenchmarkId::from_parameter(norm.to_string()), &cfg, |b, cfg| {
            b.iter(|| banach::local_search_banach(black_box(cfg), norm, &init, eps).unwrap())
        });
    }
    group.finish();
}

fn bench_hyper(c: &mut Criterion) {
    let cfg = gen_hyperbolic(4, 4, 3, 1.0, 5).unwrap();
    let parts = cfg.parts_of(&random_partition(4, 4, 6)).unwrap();
    c.bench_function("hyper_common_point_k4_r4_d3", |b| {
        b.iter(|| hyperbolic::find_common_point_hyper(black_box(&parts), 1e-12, 100_000).unwrap())
    });
    let eps = hyperbolic::default_eps(&cfg);
    let init = TransversalPartition::identity(4, 4);
    c.bench_function("hyper_local_search_k4_r4_d3", |b| {
        b.iter(|| hyperbolic::local_search_hyper(black_box(&cfg), &init, eps).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let cfg = gen_gaussian(4, 3, 3, 7).unwrap();
    c.bench_function("oracle_euclid_k4_r3", |b| {
        b.iter(|| oracle::global_opt(black_box(&cfg), oracle::Objective::EuclidSum).unwrap())
    });
}

criterion_group!(benches, bench_euclid, bench_banach, bench_hyper, bench_oracle);
criterion_main!(benches);
