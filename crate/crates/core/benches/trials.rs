use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use majolab::ineq::CheckerId;
use majolab::lab::search::{search, SearchConfig};
use majolab::lab::trials::run_trial;
use majolab::par::{self, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn trial_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_batch_256");
    group.sample_size(10);
    for checker in [
        CheckerId::SubaddConcave,
        CheckerId::Prop4,
        CheckerId::Prop3Equiv,
    ] {
        for (name, exec) in MODES {
            group.bench_with_input(
                BenchmarkId::new(checker.as_str(), name),
                &exec,
                |b, &exec| {
                    b.iter(|| {
                        par::map(exec, 0..256, |i| {
                            run_trial(checker, 4, i, 1e-9).unwrap().margin
                        })
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max)
                    })
                },
            );
        }
    }
    group.finish();
}

fn q2_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("q2_search_2000");
    group.sample_size(10);
    let cfg = SearchConfig {
        n_trials: 2000,
        ..SearchConfig::default()
    };
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| search(black_box(&cfg), exec, None).unwrap().trials_run)
        });
    }
    group.finish();
}

criterion_group!(benches, trial_batches, q2_search);
criterion_main!(benches);
