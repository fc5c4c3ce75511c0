use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentsq_bench::padic_tuple;
use momentsq_core::poly::ratio;
use momentsq_core::syzygy::{syzygy_set_nonarch, syzygy_set_real, SyzygyAtlas};
use momentsq_core::{CellTuple, Curve, FieldSpec, Scale};

fn atlas(c: &mut Criterion) {
    let mut group = c.benchmark_group("atlas");
    group.sample_size(10);
    for (p, n, s) in [(5u64, 2usize, 1u32), (5, 2, 2), (7, 2, 1), (5, 3, 1), (7, 3, 1)] {
        group.bench_function(BenchmarkId::from_parameter(format!("p{p}_n{n}_s{s}")), |b| {
            b.iter(|| SyzygyAtlas::build(black_box(p), n, s).unwrap())
        });
    }
    group.finish();
}

fn single_tuple(c: &mut Criterion) {
    let mut group = c.benchmark_group("syzygy_set_nonarch");
    for (p, n, s) in [(5u64, 2usize, 1u32), (5, 2, 2), (5, 3, 1)] {
        let i = padic_tuple(p, n, s);
        group.bench_function(BenchmarkId::from_parameter(format!("p{p}_n{n}_s{s}")), |b| {
            b.iter(|| syzygy_set_nonarch(black_box(&i)).unwrap())
        });
    }
    group.finish();
}

fn real_sampler(c: &mut Criterion) {
    let curve = Curve::moment(2).unwrap();
    let scale = Scale::archimedean(8).unwrap();
    let i = CellTuple::from_indices(FieldSpec::Real, scale, &[4, 7]).unwrap();
    let eps = ratio(1, 64);
    let step = ratio(1, 64);
    c.bench_function("syzygy_set_real/r8_4_7", |b| {
        b.iter(|| syzygy_set_real(&curve, black_box(&i), scale, &eps, &step).unwrap())
    });
}

criterion_group!(benches, atlas, single_tuple, real_sampler);
criterion_main!(benches);
