use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kbm::algnum::dominant_root;
use kbm::meet::{search, SearchConfig};
use kbm::redux::{expand_cf, gamma_mu, reduce_for_k};
use num_bigint::BigUint;

fn bench_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    for bits in [64u64, 200] {
        let cfg = SearchConfig::with_bits(2, 30, bits).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(bits), &cfg, |b, cfg| {
            b.iter(|| search(black_box(cfg)).unwrap())
        });
    }
    g.finish();
}

fn bench_root(c: &mut Criterion) {
    let mut g = c.benchmark_group("dominant_root");
    for bits in [128u32, 1024] {
        g.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, &bits| {
            b.iter(|| dominant_root(black_box(7), bits).unwrap())
        });
    }
    g.finish();
}

fn bench_reduce(c: &mut Criterion) {
    let m = BigUint::from(10u32).pow(60);
    c.bench_function("reduce_for_k/k5_1e60", |b| {
        b.iter(|| reduce_for_k(black_box(5), &m).unwrap())
    });
}

fn bench_cf(c: &mut Criterion) {
    let (g, _) = gamma_mu(3, 2048).unwrap();
    c.bench_function("expand_cf/200", |b| {
        b.iter(|| expand_cf(black_box(&g), 200).unwrap())
    });
}

criterion_group!(benches, bench_search, bench_root, bench_reduce, bench_cf);
criterion_main!(benches);
