//! Sequential vs rayon paths on the two heaviest node-wise workloads.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use quermass::par::{self, Mode};
use quermass::spheregeom::{curvature_table_at, shape_operator_fd, Domain, Grid, SphereField};

fn modes(c: &mut Criterion) {
    let field = SphereField::random(Grid::new(48, 96), 16, 8, 0.05, 7).unwrap();
    let domain = Domain::Sphere(field.clone());
    let mut group = c.benchmark_group("curvature_table");
    group.sample_size(10);
    for mode in [Mode::Sequential, Mode::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &m| {
            par::set_mode(m);
            b.iter(|| curvature_table_at(black_box(&domain), 2, 1).unwrap());
        });
    }
    group.finish();

    let mut group = c.benchmark_group("fd_oracle");
    group.sample_size(10);
    for mode in [Mode::Sequential, Mode::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &m| {
            par::set_mode(m);
            b.iter(|| shape_operator_fd(black_box(&field)).unwrap());
        });
    }
    group.finish();
    par::set_mode(Mode::Parallel);
}

criterion_group!(benches, modes);
criterion_main!(benches);
