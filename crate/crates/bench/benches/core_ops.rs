use criterion::{black_box, criterion_group, criterion_main, Criterion};

use mwt_bench::{random_signal, random_vector};
use mwt_core::pdedata::solve_burgers_dt;
use mwt_core::transform::{decompose, project_kernel, reconstruct, NamedKernel};
use mwt_core::{
    build_filters, Activation, BasisKind, ConvSpec, ModelConfig, OperatorModel,
};

fn bench_filters(c: &mut Criterion) {
    c.bench_function("build_filters legendre k=4", |b| {
        b.iter(|| build_filters(black_box(BasisKind::Legendre), black_box(4)).unwrap())
    });
    c.bench_function("build_filters chebyshev k=6", |b| {
        b.iter(|| build_filters(black_box(BasisKind::Chebyshev), black_box(6)).unwrap())
    });
}

fn bench_transform(c: &mut Criterion) {
    let bank = build_filters(BasisKind::Legendre, 4).unwrap();
    let fine = random_signal(4, 1 << 10, 1);
    c.bench_function("round trip k=4 N=10", |b| {
        b.iter(|| {
            let coeffs = decompose(&bank, black_box(&fine), 0).unwrap();
            reconstruct(&bank, &coeffs).unwrap()
        })
    });
}

fn bench_model(c: &mut Criterion) {
    let config = ModelConfig {
        kind: BasisKind::Legendre,
        k: 4,
        layers: 2,
        coarsest: 0,
        conv: ConvSpec::Conv { width: 3 },
        activation: Activation::Relu,
        two_d: false,
    };
    let model = OperatorModel::new(config, 1).unwrap();
    let input = random_vector(256, 2);
    let upstream = random_vector(256, 3);
    c.bench_function("forward s=256", |b| {
        b.iter(|| model.forward(black_box(&input)).unwrap())
    });
    c.bench_function("forward+backward s=256", |b| {
        b.iter(|| model.backward(black_box(&input), black_box(&upstream)).unwrap())
    });
}

fn bench_kernel_projection(c: &mut Criterion) {
    let bank = build_filters(BasisKind::Legendre, 4).unwrap();
    c.bench_function("project_kernel gaussian k=4 N=5", |b| {
        b.iter(|| {
            project_kernel(
                |x, y| NamedKernel::Gaussian.eval(x, y),
                black_box(&bank),
                5,
                0,
                1e-8,
            )
            .unwrap()
        })
    });
}

fn bench_burgers_step(c: &mut Criterion) {
    let u0 = random_vector(8192, 4);
    c.bench_function("burgers 100 steps at 2^13", |b| {
        b.iter(|| solve_burgers_dt(black_box(&u0), 0.1, 0.025, 2.5e-4).unwrap())
    });
}

criterion_group!(
    benches,
    bench_filters,
    bench_transform,
    bench_model,
    bench_kernel_projection,
    bench_burgers_step
);
criterion_main!(benches);
