use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use steinhaus::entropy::{radial_density, GridSpec};
use steinhaus::moments::{f_p_integral_batch, mc_negative_moment, quad_negative_moment, CoefficientVector};
use steinhaus::specfun::bessel::{j0, j01};
use steinhaus::specfun::bessel_j0_enclosure;
use steinhaus::Enclosure;

fn bessel(c: &mut Criterion) {
    let ts: Vec<f64> = (0..1000).map(|k| k as f64 * 0.05).collect();
    c.bench_function("j0 x1000", |b| b.iter(|| ts.iter().map(|&t| j0(black_box(t))).sum::<f64>()));
    c.bench_function("j01 x1000", |b| b.iter(|| ts.iter().map(|&t| j01(black_box(t)).1).sum::<f64>()));
    let small: Vec<f64> = (0..1000).map(|k| k as f64 * 0.016).collect();
    c.bench_function("j0 enclosure x1000", |b| {
        b.iter(|| small.iter().map(|&t| bessel_j0_enclosure(Enclosure::point(black_box(t))).unwrap().hi()).sum::<f64>())
    });
}

fn moments(c: &mut Criterion) {
    let a = CoefficientVector::normalized(&[1.0, 0.7, 0.5, 0.4, 0.3, 0.2]).unwrap();
    c.bench_function("quad moment n=6 p=0.5", |b| b.iter(|| quad_negative_moment(black_box(&a), 0.5, 1e-8).unwrap()));
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("mc moment n=6 1e5 samples", |b| {
        b.iter_batched(|| 7u64, |seed| mc_negative_moment(&a, 0.5, 100_000, seed).unwrap(), BatchSize::SmallInput)
    });
    let ps: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    g.bench_function("f_p batch 99 p at s=5", |b| b.iter(|| f_p_integral_batch(black_box(&ps), 5.0, 1e-6).unwrap()));
    g.bench_function("radial density n=4", |b| {
        let v = CoefficientVector::equal(4).unwrap();
        b.iter(|| radial_density(black_box(&v), GridSpec::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bessel, moments);
criterion_main!(benches);
