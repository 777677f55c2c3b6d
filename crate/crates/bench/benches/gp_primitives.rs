//! GP building blocks: the cubic-cost posterior solves that dominate the
//! planners' inner loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use transect_core::gp::{self, GpHyperParams};
use transect_core::grid::TransectGrid;

fn posterior_and_entropy(c: &mut Criterion) {
    let params = GpHyperParams::new(1.0, 0.05, 2.5, 1.0, 0.0).unwrap();
    let grid = TransectGrid::new(8, 16, 1.0, 1.0).unwrap();
    let all = grid.all_locations();

    let mut group = c.benchmark_group("gp_primitives");
    group.sample_size(20);
    for conditioning in [8usize, 32, 96] {
        group.bench_with_input(
            BenchmarkId::new("conditional_entropy", conditioning),
            &conditioning,
            |b, &s| {
                let target = &all[..8];
                let given = &all[8..8 + s];
                b.iter(|| gp::conditional_entropy(target, given, &params).unwrap());
            },
        );
    }
    group.bench_function("joint_entropy_64", |b| {
        let c64 = gp::cov_matrix(&all[..64], &params);
        b.iter(|| gp::joint_entropy(&c64).unwrap());
    });
    group.finish();
}

criterion_group!(benches, posterior_and_entropy);
criterion_main!(benches);
