use catchup_bench::{ball_complement, fixed_family, oscillating_input, projection_sets, queries, step_pair};
use catchup_core::kurzweil::ks_integral;
use catchup_core::sweeper::catching_up;
use catchup_core::vector::point;
use catchup_core::default_jump_constant;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

fn bench_catching_up(c: &mut Criterion) {
    let family = fixed_family(ball_complement());
    let x0 = point(&[1.0, 0.0]);
    let mut group = c.benchmark_group("catching_up");
    for steps in [1_000usize, 10_000, 40_000] {
        let (u, w) = oscillating_input(steps);
        group.throughput(Throughput::Elements(steps as u64));
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, _| {
            b.iter(|| catching_up(black_box(&u), &w, family.as_ref(), &x0, 1.0, default_jump_constant()).unwrap())
        });
    }
    group.finish();
}

fn bench_projections(c: &mut Criterion) {
    let ys = queries(1024, 5);
    let mut group = c.benchmark_group("nearest_point");
    group.throughput(Throughput::Elements(ys.len() as u64));
    for (name, set) in projection_sets() {
        group.bench_function(name, |b| {
            b.iter(|| ys.iter().map(|y| set.nearest_point(black_box(y))[0]).sum::<f64>())
        });
    }
    group.finish();
}

fn bench_ks_integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("ks_integral");
    for n in [100usize, 1_000, 10_000] {
        let (f, g) = step_pair(n, n as u64);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| ks_integral(black_box(&f), black_box(&g)).unwrap().value)
        });
    }
    group.finish();
}

criterion_group!(benches, bench_catching_up, bench_projections, bench_ks_integral);
criterion_main!(benches);
