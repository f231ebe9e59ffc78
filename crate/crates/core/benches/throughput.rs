use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use natlog::corpus::{generate, run_corpus, run_sequential, DEFAULT_SEED};
use natlog::lexicon::KnowledgeBase;
use natlog::proof::RunConfig;

fn corpus_runs(c: &mut Criterion) {
    let kb = KnowledgeBase::default_kb();
    let config = RunConfig::default();
    let problems = generate(DEFAULT_SEED, 200);
    let mut group = c.benchmark_group("corpus");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("sequential", problems.len()), |b| {
        b.iter(|| run_sequential(&problems, &kb, &config))
    });
    group.bench_function(BenchmarkId::new("parallel", problems.len()), |b| {
        b.iter(|| run_corpus(&problems, &kb, &config, 0))
    });
    group.finish();
}

criterion_group!(benches, corpus_runs);
criterion_main!(benches);
