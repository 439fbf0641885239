use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use graf_core::classify;
use graf_core::exterior::Metric;
use graf_core::sample;
use graf_core::{GrafAlgebra, Rep, Signature};

fn product(c: &mut Criterion) {
    for (p, q) in [(3, 2), (6, 0), (9, 0)] {
        let s = Signature::new(p, q).unwrap();
        let alg = GrafAlgebra::orthonormal(s);
        let mut r = sample::rng(1);
        let f = sample::form(&mut r, s.n(), 5, 0.3);
        let g = sample::form(&mut r, s.n(), 5, 0.3);
        c.bench_function(&format!("graf product ({p},{q})"), |b| {
            b.iter(|| alg.product(black_box(&f), black_box(&g)).unwrap())
        });
    }
}

fn contracted_wedge(c: &mut Criterion) {
    let s = Signature::new(9, 0).unwrap();
    let metric = Metric::orthonormal(s);
    let mut r = sample::rng(2);
    let f = sample::form_of_grade(&mut r, 9, 4, 5, 1.0);
    let g = sample::form_of_grade(&mut r, 9, 4, 5, 1.0);
    for k in [1, 2, 4] {
        c.bench_function(&format!("contracted wedge grade 4, k = {k}"), |b| {
            b.iter(|| metric.contracted_wedge(black_box(&f), black_box(&g), k).unwrap())
        });
    }
}

fn build_rep(c: &mut Criterion) {
    for (p, q) in [(1, 2), (3, 3), (9, 0)] {
        let s = Signature::new(p, q).unwrap();
        c.bench_function(&format!("build rep ({p},{q})"), |b| b.iter(|| Rep::build(black_box(s), 1).unwrap()));
    }
}

fn covariants(c: &mut Criterion) {
    let ctx = classify::context_90().unwrap();
    let mut r = sample::rng(3);
    let alpha = sample::spinor(&mut r, 16, 5);
    c.bench_function("pinor covariants (9,0)", |b| {
        b.iter(|| classify::covariants_90(&ctx, black_box(&alpha)).unwrap())
    });
    let cov = classify::covariants_90(&ctx, &alpha).unwrap();
    c.bench_function("reduced system check (9,0)", |b| {
        b.iter(|| classify::check_reduced_90(&ctx.algebra, black_box(&cov), &cov.b()).unwrap())
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = product, contracted_wedge, build_rep, covariants
}
criterion_main!(kernels);
