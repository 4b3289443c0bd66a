use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wasep::PrecisionContext;

fn kernels(c: &mut Criterion) {
    let ctx = PrecisionContext::with_bits(128).unwrap();
    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);

    g.bench_function("erf_zeros_32", |b| b.iter(|| wasep::edge::erf_zeros(black_box(32), &ctx).unwrap()));

    let q = ctx.real(0.6);
    g.bench_function("oracle_L10", |b| b.iter(|| wasep::markov_oracle::oracle_gap(10, 5, black_box(&q), &ctx).unwrap()));

    let mu = ctx.real(1.0);
    g.bench_function("bethe_gap_L32", |b| {
        b.iter(|| wasep::bethe_finite::solve_gap_roots(32, 16, black_box(&mu), &ctx, None).unwrap())
    });

    g.bench_function("series_order_8", |b| b.iter(|| wasep::series::run_series(black_box(8)).unwrap()));

    g.bench_function("edge_roots_mu1_M8", |b| {
        b.iter(|| wasep::edge::solve_edge_roots(black_box(&mu), 8, &ctx, None).unwrap())
    });
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
