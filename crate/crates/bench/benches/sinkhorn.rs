use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use eot_bench::{chain, positive};
use eot_core::kernels::{f_of_g, g_of_f};
use eot_core::sinkhorn::{run, solve_until, RunConfig};

fn half_updates(c: &mut Criterion) {
    let mut group = c.benchmark_group("half_update");
    for n in [16, 64, 256] {
        let p = positive(n, 7);
        let g = vec![0.0; n];
        let f = f_of_g(&p, &g);
        group.bench_with_input(BenchmarkId::new("row", n), &n, |b, _| {
            b.iter(|| f_of_g(&p, black_box(&g)))
        });
        group.bench_with_input(BenchmarkId::new("col", n), &n, |b, _| {
            b.iter(|| g_of_f(&p, black_box(&f)))
        });
    }
    group.finish();
}

fn traced_runs(c: &mut Criterion) {
    let soules = eot_core::generate::soules();
    c.bench_function("trace_soules_10k", |b| {
        b.iter(|| run(&soules, &RunConfig::with_max_iters(10_000)))
    });
    let p = chain(3, 12, 5);
    c.bench_function("trace_chain12_1k", |b| {
        b.iter(|| run(&p, &RunConfig::with_max_iters(1_000)))
    });
    let q = positive(64, 3);
    c.bench_function("solve_positive64", |b| {
        b.iter(|| solve_until(&q, vec![0.0; 64], 1e-10, 100_000))
    });
}

criterion_group!(benches, half_updates, traced_runs);
criterion_main!(benches);
