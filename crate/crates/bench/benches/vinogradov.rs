use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentsq_core::vinogradov::{count_solutions, CountMethod};
use momentsq_core::Curve;

fn hash_join(c: &mut Criterion) {
    let mut group = c.benchmark_group("hash_join");
    group.sample_size(10);
    for (n, big_n) in [(2usize, 200u64), (3, 50), (3, 100), (3, 200)] {
        let curve = Curve::moment(n).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("n{n}"), big_n), &big_n, |b, &big_n| {
            b.iter(|| count_solutions(&curve, black_box(big_n), CountMethod::HashJoin).unwrap())
        });
    }
    group.finish();
}

fn formula_vs_brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("vinogradov_n3_N20");
    group.sample_size(10);
    let curve = Curve::moment(3).unwrap();
    for method in [
        CountMethod::BruteForce,
        CountMethod::HashJoin,
        CountMethod::PermutationFormula,
    ] {
        group.bench_function(method.name(), |b| {
            b.iter(|| count_solutions(&curve, black_box(20), method).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hash_join, formula_vs_brute_force);
criterion_main!(benches);
