use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epitaxy_core::datagen::make_random_smooth;
use epitaxy_core::dynamics::{rhs_spectral, Etdrk4, ModelSpec, Workspace};
use epitaxy_core::semigroup::{kernel_evaluate, KernelTable};
use epitaxy_core::spectral::{dealiased_cubic, transform_forward, transform_inverse};
use epitaxy_core::TorusGrid;
use std::hint::black_box;

fn data(dim: usize, n: usize) -> epitaxy_core::Field {
    make_random_smooth(7, 6, 1.0, TorusGrid::new(dim, n).unwrap()).unwrap()
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    for (dim, n) in [(1, 1024), (1, 8192), (2, 128), (2, 256)] {
        let f = data(dim, n);
        let coeffs = transform_forward(&f).unwrap();
        let id = format!("{dim}d_{n}");
        g.bench_with_input(BenchmarkId::new("forward", &id), &f, |b, f| {
            b.iter(|| transform_forward(black_box(f)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("inverse", &id), &coeffs, |b, c| {
            b.iter(|| transform_inverse(f.grid(), black_box(c)).unwrap())
        });
    }
    g.finish();
}

fn cubic(c: &mut Criterion) {
    let mut g = c.benchmark_group("dealiased_cubic");
    for (dim, n) in [(1, 1024), (2, 128)] {
        let f = data(dim, n);
        g.bench_function(format!("{dim}d_{n}"), |b| {
            b.iter(|| dealiased_cubic(black_box(&f), &f, &f).unwrap())
        });
    }
    g.finish();
}

fn stepping(c: &mut Criterion) {
    let model = ModelSpec::slope_selection(0.1).unwrap();
    let mut g = c.benchmark_group("etdrk4_step");
    for (dim, n) in [(1, 512), (2, 64), (2, 128)] {
        let f = data(dim, n);
        let ws = Workspace::new(f.grid(), &model);
        let mut scheme = Etdrk4::new();
        g.bench_function(format!("{dim}d_{n}"), |b| {
            b.iter(|| scheme.step(&model, &ws, black_box(f.spectral()), 1e-4))
        });
    }
    g.finish();
    let f = data(1, 512);
    let ws = Workspace::new(f.grid(), &model);
    c.bench_function("rhs_1d_512", |b| {
        b.iter(|| rhs_spectral(&model, &ws, black_box(f.spectral())))
    });
}

fn kernel(c: &mut Criterion) {
    c.bench_function("kernel_evaluate_gamma4", |b| {
        b.iter(|| kernel_evaluate(4.0, black_box(3.7)).unwrap())
    });
    let mut g = c.benchmark_group("kernel_table");
    g.sample_size(10);
    g.bench_function("build_gamma3", |b| b.iter(|| KernelTable::build(black_box(3.0)).unwrap()));
    g.finish();
}

criterion_group!(benches, transforms, cubic, stepping, kernel);
criterion_main!(benches);
