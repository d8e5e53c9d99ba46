//! Parallel core against a single worker. `cargo bench -p hf2d` compares a
//! one-thread pool with the full pool; `--no-default-features` builds the
//! sequential fallback, where both rows should match.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hf2d::farfield::hat_on_circle;
use hf2d::field::{lp_norm, Grid, GridField, RealField};
use hf2d::par;
use hf2d::resolvent::{RealOperator, Resolvent};
use hf2d::Complex64;

fn pools() -> Vec<(&'static str, usize)> {
    let all = par::current_threads();
    if all > 1 {
        vec![("seq", 1), ("par", all)]
    } else {
        vec![("seq", 1)]
    }
}

fn gaussian(g: Grid) -> RealField {
    RealField::from_fn(g, |x, y| (-0.5 * (x * x + y * y)).exp())
}

fn resolvent(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolvent_apply");
    group.sample_size(10);
    for n in [256, 512] {
        let g = Grid::new(n, 2.0 * PI / 16.0).unwrap();
        let res = Resolvent::new(g).unwrap();
        let f = gaussian(g);
        for (name, t) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| par::install(t, || black_box(res.apply_real(f.samples()))))
            });
        }
    }
    group.finish();
}

fn far_field(c: &mut Criterion) {
    let mut group = c.benchmark_group("hat_on_circle");
    group.sample_size(10);
    let g = Grid::new(256, 2.0 * PI / 16.0).unwrap();
    let f = gaussian(g);
    for (name, t) in pools() {
        group.bench_function(name, |b| b.iter(|| par::install(t, || black_box(hat_on_circle(&f, 64).unwrap()))));
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp_norm");
    let g = Grid::new(1024, 0.05).unwrap();
    let f = GridField::from_fn(g, |x, y| Complex64::new((x * y).sin(), x.cos()));
    for (name, t) in pools() {
        group.bench_function(name, |b| b.iter(|| par::install(t, || black_box(lp_norm(&f, 3.0).unwrap()))));
    }
    group.finish();
}

criterion_group!(benches, resolvent, far_field, norms);
criterion_main!(benches);
