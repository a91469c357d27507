use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use prg_core::census::{count_induced_exact, count_induced_sampled};
use prg_core::certifier::{assumption_deviation, ScanMode};
use prg_core::exec;
use prg_core::generators::gen_er;

fn compare<F: Fn()>(c: &mut Criterion, group: &str, param: usize, work: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    g.bench_with_input(BenchmarkId::new("parallel", param), &param, |b, _| b.iter(&work));
    g.bench_with_input(BenchmarkId::new("sequential", param), &param, |b, _| b.iter(|| exec::sequential(&work)));
    g.finish();
}

fn benches(c: &mut Criterion) {
    let g = gen_er(512, 0.5, 1).unwrap();
    compare(c, "census_exact_s4", 512, || {
        black_box(count_induced_exact(&g, 4).unwrap());
    });
    compare(c, "codegree_scan", 512, || {
        black_box(assumption_deviation(&g, 0.5, 2, ScanMode::Exact).unwrap());
    });
    compare(c, "census_sampled_s5", 512, || {
        black_box(count_induced_sampled(&g, 5, 200_000, 3).unwrap());
    });
    compare(c, "gen_er", 2048, || {
        black_box(gen_er(2048, 0.5, 7).unwrap());
    });
}

criterion_group!(parallel_vs_sequential, benches);
criterion_main!(parallel_vs_sequential);
