use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use robust_moss::{recording_grid, run_single, PolicyKind, ProblemParams};
use robust_moss_bench::experiment_env;

fn single_runs(c: &mut Criterion) {
    let env = experiment_env();
    let mut group = c.benchmark_group("run_single");
    group.sample_size(10);
    for (kind, horizon) in [
        (PolicyKind::RobustMoss, 10_000),
        (PolicyKind::Moss, 10_000),
        (PolicyKind::RobustUcbTruncated, 10_000),
        (PolicyKind::RobustUcbCatoni, 2_000),
    ] {
        let params = ProblemParams::experiment_defaults(horizon, env.len()).unwrap();
        let grid = recording_grid(horizon, 200);
        group.bench_with_input(BenchmarkId::new(kind.name(), horizon), &horizon, |b, _| {
            b.iter(|| black_box(run_single(&env, kind, &params, 7, 0, &grid).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, single_runs);
criterion_main!(benches);
