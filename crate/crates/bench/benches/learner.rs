use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pride_bench::{random_transitions, s11_transitions};
use pride_core::oracle::optimal_program;
use pride_core::{pride, LearnerConfig, TieBreak};

fn learner_random(c: &mut Criterion) {
    let mut g = c.benchmark_group("pride/random");
    g.sample_size(10);
    for n in [250, 1000, 4000] {
        let (schema, ts) = random_transitions(n, 8, 3, 1);
        for tie in [TieBreak::LowestIndex, TieBreak::MostExcluding] {
            let cfg = LearnerConfig { tie_break: tie, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(format!("{tie:?}"), n), &ts, |b, ts| {
                b.iter(|| pride(ts, &schema, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn learner_s11(c: &mut Criterion) {
    let mut g = c.benchmark_group("pride/s11");
    g.sample_size(10);
    for n in [2000, 8000] {
        let (schema, ts) = s11_transitions(n, 1);
        let cfg = LearnerConfig { tie_break: TieBreak::MostExcluding, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(n), &ts, |b, ts| b.iter(|| pride(ts, &schema, &cfg).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for features in [3, 4, 5] {
        let (schema, ts) = random_transitions(40, features, 2, 2);
        g.bench_with_input(BenchmarkId::from_parameter(features), &ts, |b, ts| {
            b.iter(|| optimal_program(ts, &schema).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, learner_random, learner_s11, oracle);
criterion_main!(benches);
