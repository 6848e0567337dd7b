use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use orbital_core::density::search_certificate;
use orbital_core::{
    cartan_projection, exp_cartan, haar_sample, support_sample, CartanElement, DenseMatrix,
    FieldTag, GrassmannShape, Tolerance,
};

const SHAPES: [(usize, usize); 3] = [(2, 3), (3, 4), (4, 5)];

fn element(shape: GrassmannShape, scale: f64) -> CartanElement {
    let h = (0..shape.p())
        .map(|i| scale * (shape.p() - i) as f64)
        .collect();
    CartanElement::new(shape, h).unwrap()
}

fn haar(c: &mut Criterion) {
    let mut g = c.benchmark_group("haar_sample");
    for field in FieldTag::ALL {
        g.bench_with_input(BenchmarkId::new(field.to_string(), 9), &field, |b, &f| {
            b.iter(|| haar_sample(f, black_box(9), 1))
        });
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut g = c.benchmark_group("cartan_projection");
    for (p, q) in SHAPES {
        let shape = GrassmannShape::new(p, q).unwrap();
        let k = DenseMatrix::block_diag(
            &haar_sample(FieldTag::Real, p, 3),
            &haar_sample(FieldTag::Real, q, 4),
        );
        let m = &(&exp_cartan(&element(shape, 0.3)) * &k) * &exp_cartan(&element(shape, 0.2));
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{p},{q}")),
            &m,
            |b, m| b.iter(|| cartan_projection(black_box(m), shape, &tol).unwrap()),
        );
    }
    g.finish();
}

fn certificate(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut g = c.benchmark_group("search_certificate");
    for (p, q) in SHAPES {
        let shape = GrassmannShape::new(p, q).unwrap();
        let (x, y) = (element(shape, 0.5), element(shape, 0.25));
        g.bench_function(BenchmarkId::from_parameter(format!("{p},{q}")), |b| {
            b.iter(|| search_certificate(black_box(&x), &y, 20, 0, &tol).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let tol = Tolerance::default();
    let shape = GrassmannShape::new(3, 4).unwrap();
    let (x, y) = (element(shape, 0.5), element(shape, 0.25));
    let mut g = c.benchmark_group("support_sample");
    g.sample_size(20);
    for field in FieldTag::ALL {
        g.bench_function(BenchmarkId::new(field.to_string(), 100), |b| {
            b.iter(|| support_sample(&x, &y, field, 100, 0, &tol).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, haar, projection, certificate, sampling);
criterion_main!(benches);
