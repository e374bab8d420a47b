use criterion::{black_box, criterion_group, criterion_main, Criterion};
use cubic_melnikov::abelian::{generator_vector, PerturbationPoly};
use cubic_melnikov::analyzer::zero_scan;
use cubic_melnikov::charts::Center;
use cubic_melnikov::homoclinic::{loop_constants_with, LoopGeometry};
use cubic_melnikov::hopf::{hopf_coefficients, HopfDelta};
use cubic_melnikov::tracer::trace_orbit;
use cubic_melnikov_bench::d6_sample;

fn tracing(c: &mut Criterion) {
    let (p, an) = d6_sample();
    let h = 0.5 * (an.h_lo + an.h_hi);
    c.bench_function("trace_orbit", |b| b.iter(|| trace_orbit(&p, &an, black_box(h), 256).unwrap()));
}

fn generators(c: &mut Criterion) {
    let (p, an) = d6_sample();
    let h = 0.5 * (an.h_lo + an.h_hi);
    c.bench_function("generator_vector", |b| b.iter(|| generator_vector(&p, &an, black_box(h)).unwrap()));
}

fn scan(c: &mut Criterion) {
    let (p, an) = d6_sample();
    let pert = PerturbationPoly::new(3, &[(1, 0, 1.0), (3, 0, -2.0)], &[(0, 1, 0.5), (2, 1, 1.0)]).unwrap();
    let mut g = c.benchmark_group("zero_scan");
    g.sample_size(10);
    g.bench_function("grid_128", |b| b.iter(|| zero_scan(&p, &pert, &an, black_box(128), None).unwrap()));
    g.finish();
}

fn hopf(c: &mut Criterion) {
    let delta = HopfDelta::new([0.1, -0.2, 0.3, 1.0]);
    c.bench_function("hopf_coefficients", |b| b.iter(|| hopf_coefficients(black_box(&delta), Center::First)));
}

fn homoclinic(c: &mut Criterion) {
    let mut g = c.benchmark_group("loop_constants");
    g.sample_size(10);
    g.bench_function("tol_1e-12", |b| b.iter(|| loop_constants_with(LoopGeometry::default(), black_box(1e-12)).unwrap()));
    g.finish();
}

criterion_group!(benches, tracing, generators, scan, hopf, homoclinic);
criterion_main!(benches);
