use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use conicrank::batch::{analyze_all, analyze_all_sequential};
use conicrank::selftest::CurveGenerator;

const BATCH_LABEL: &str = if cfg!(feature = "parallel") { "rayon" } else { "fallback" };

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    for n in [16usize, 64] {
        let curves = CurveGenerator::new(42).curves(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &curves, |b, cs| {
            b.iter(|| analyze_all_sequential(cs, false))
        });
        group.bench_with_input(BenchmarkId::new(BATCH_LABEL, n), &curves, |b, cs| {
            b.iter(|| analyze_all(cs, false))
        });
    }
    group.finish();
}

fn single(c: &mut Criterion) {
    let curve = conicrank::curve::CurveInput::parse("(x^3-x)T + 4").unwrap();
    c.bench_function("analyze_with_points", |b| {
        b.iter(|| conicrank::report::analyze(&curve, true).unwrap())
    });
}

criterion_group!(benches, batch, single);
criterion_main!(benches);
