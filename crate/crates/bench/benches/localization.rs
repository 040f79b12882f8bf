use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use torloc_bench::*;

fn bench_divide_exact(c: &mut Criterion) {
    let (f, lam) = division_instance();
    c.bench_function("divide_exact/medium", |b| {
        b.iter(|| divide_exact(black_box(&f), black_box(&lam)).unwrap())
    });
}

fn bench_singular_multiplicity(c: &mut Criterion) {
    let cf = p112();
    let sing = cf.fan.find_cone(&[0, 2]).unwrap();
    c.bench_function("em_point/p112-singular", |b| {
        b.iter(|| em_point_with_policy(black_box(&cf.fan), sing, PivotPolicy::MinSum).unwrap())
    });
}

fn bench_euler_cube(c: &mut Criterion) {
    let cf = cube();
    let d = cf.fan.divisor("d1").unwrap().clone();
    c.bench_function("euler_char/cube", |b| {
        b.iter(|| euler_char(black_box(&cf.fan), black_box(&d)).unwrap())
    });
}

fn bench_membership(c: &mut Criterion) {
    let batch = membership_batch();
    c.bench_function("membership/fn3-batch", |b| {
        b.iter(|| {
            for tuple in &batch {
                let _ = membership(SurfaceKind::Fn(3), black_box(tuple)).unwrap();
            }
        })
    });
}

criterion_group!(
    benches,
    bench_divide_exact,
    bench_singular_multiplicity,
    bench_euler_cube,
    bench_membership
);
criterion_main!(benches);
