//! Parallel-versus-sequential benchmarks for the randomized suite
//! workloads. `run_trials` dispatches to rayon when the `parallel`
//! feature (default) is enabled; `run_trials_seq` is the sequential
//! fallback. Per-trial seeds make both produce identical results, so
//! the comparison is purely about throughput:
//!
//! ```text
//! cargo bench -p stereoshape
//! cargo bench -p stereoshape --no-default-features   # both arms sequential
//! ```

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stereoshape::equivalence::recover_transform;
use stereoshape::projection::verify_intertwining;
use stereoshape::seeding::trial_seed;
use stereoshape::suites::{
    run_trials, run_trials_seq, sample_intertwining_pair, sample_roundtrip_instance,
};
use stereoshape::Tolerances;

const SEED: u64 = 0xBE7C;

fn intertwining_trial(trial: u32) -> f64 {
    let tol = Tolerances::default();
    let n = 4 + (trial as usize % 9);
    let (x, t) = sample_intertwining_pair(trial_seed(SEED, trial as u64), n, &tol)
        .expect("sampler converges");
    verify_intertwining(t.g(), &x, &tol)
        .expect("valid pair")
        .residual
}

fn recovery_trial(trial: u32) -> f64 {
    let tol = Tolerances::default();
    let n = 4 + (trial as usize % 9);
    let inst = sample_roundtrip_instance(trial_seed(SEED ^ 1, trial as u64), n, &tol)
        .expect("sampler converges");
    recover_transform(&inst.p, &inst.q, &tol)
        .expect("valid instance")
        .residual
}

fn bench_workloads(c: &mut Criterion) {
    let trials: u32 = 256;

    let mut group = c.benchmark_group("intertwining");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("parallel", trials), &trials, |b, &n| {
        b.iter(|| run_trials(n, intertwining_trial))
    });
    group.bench_with_input(BenchmarkId::new("sequential", trials), &trials, |b, &n| {
        b.iter(|| run_trials_seq(n, intertwining_trial))
    });
    group.finish();

    let mut group = c.benchmark_group("recovery");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("parallel", trials), &trials, |b, &n| {
        b.iter(|| run_trials(n, recovery_trial))
    });
    group.bench_with_input(BenchmarkId::new("sequential", trials), &trials, |b, &n| {
        b.iter(|| run_trials_seq(n, recovery_trial))
    });
    group.finish();

    // The two execution strategies must agree bit for bit.
    let par = run_trials(64, intertwining_trial);
    let seq = run_trials_seq(64, intertwining_trial);
    assert_eq!(par, seq, "parallel and sequential runs diverged");
}

criterion_group!(benches, bench_workloads);
criterion_main!(benches);
