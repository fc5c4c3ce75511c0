use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentsq_bench::origin;
use momentsq_core::extension::{comb_ratio, weighted_norms, QuadratureSpec, TestFunction};
use momentsq_core::{FieldSpec, Prime, Scale};

fn padic_norms(c: &mut Criterion) {
    let p = Prime::new(5).unwrap();
    let f = TestFunction::random_padic(p, 2, 0).unwrap();
    let center = origin(2);
    let mut group = c.benchmark_group("padic_norms");
    for s in [1u32, 2] {
        let scale = Scale::padic(p, s).unwrap();
        group.bench_with_input(BenchmarkId::new("q5_n2", s), &scale, |b, scale| {
            b.iter(|| weighted_norms(black_box(&f), scale, &center, &QuadratureSpec::PAdicExact).unwrap())
        });
    }
    group.finish();
}

fn real_norms(c: &mut Criterion) {
    let f = TestFunction::random_real(16, 0).unwrap();
    let center = origin(2);
    let quad = QuadratureSpec::default_for(FieldSpec::Real, 2);
    let mut group = c.benchmark_group("real_norms");
    group.sample_size(10);
    for r in [4u64, 8] {
        let scale = Scale::archimedean(r).unwrap();
        group.bench_with_input(BenchmarkId::new("m16_n2", r), &scale, |b, scale| {
            b.iter(|| weighted_norms(black_box(&f), scale, &center, &quad).unwrap())
        });
    }
    group.finish();
}

fn comb(c: &mut Criterion) {
    let quad = QuadratureSpec::default_for(FieldSpec::Real, 2);
    let mut group = c.benchmark_group("comb_ratio");
    group.sample_size(10);
    for atoms in [10u64, 20] {
        group.bench_with_input(BenchmarkId::from_parameter(atoms), &atoms, |b, &atoms| {
            b.iter(|| comb_ratio(2, black_box(atoms), &quad).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, padic_norms, real_norms, comb);
criterion_main!(benches);
