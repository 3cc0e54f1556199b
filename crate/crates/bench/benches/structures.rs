use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use genpoisson::dynamics::{build_system, evolve};
use genpoisson::gps::{gji_residual, GeneralizedPoissonStructure};
use genpoisson::liealg::{build_cocycle, build_cocycle_permsum, catalog_load, invariant_symmetric_tensor, CocycleTensor};
use genpoisson::PolyMultivector;

fn su3_cocycle() -> CocycleTensor {
    let g = catalog_load("su3").unwrap();
    let k = invariant_symmetric_tensor(&g, 3).unwrap();
    build_cocycle(&g, &k).unwrap()
}

fn cocycles(c: &mut Criterion) {
    let g = catalog_load("su3").unwrap();
    let k = invariant_symmetric_tensor(&g, 3).unwrap();
    c.bench_function("su3 m=3 build_cocycle", |b| b.iter(|| build_cocycle(black_box(&g), black_box(&k)).unwrap()));
    c.bench_function("su3 m=3 build_cocycle_permsum", |b| {
        b.iter(|| build_cocycle_permsum(black_box(&g), black_box(&k)).unwrap())
    });
}

fn jacobi(c: &mut Criterion) {
    let w = su3_cocycle();
    c.bench_function("su3 p=2 gji_residual", |b| b.iter(|| gji_residual(black_box(&w.omega)).unwrap()));
    let s = GeneralizedPoissonStructure::from_cocycle(w).unwrap();
    c.bench_function("su3 p=2 schouten self-bracket", |b| {
        b.iter(|| black_box(&s.lambda).schouten_nijenhuis(black_box(&s.lambda)).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let s = GeneralizedPoissonStructure::from_cocycle(su3_cocycle()).unwrap();
    let hs: Vec<PolyMultivector> = [0, 3, 7].iter().map(|&i| PolyMultivector::coordinate(8, i)).collect();
    let sys = build_system(&s, &hs).unwrap();
    let x0 = [0.5, -0.3, 0.4, 0.75, -0.7, 0.2, 0.45, -0.2];
    c.bench_function("su3 p=2 rk4 1000 steps", |b| b.iter(|| evolve(&sys, black_box(&x0), 1e-3, 1000, &[]).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = cocycles, jacobi, dynamics
}
criterion_main!(benches);
