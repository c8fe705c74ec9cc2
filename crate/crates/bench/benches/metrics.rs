//! Benchmarks for the evaluation metrics: tokenization, the overlap scores
//! (dominated by METEOR's alignment beam), stemming, and agreement.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tagt_core::backend::stub::stub_for_task;
use tagt_core::backend::Task;
use tagt_core::metrics::{
    bleu4, fleiss_kappa, meteor, rouge_l, subjectivity_pct, tokenize, RatingMatrix, TokenSeq,
};
use tagt_core::pipeline::{run, PipelineConfig};
use tagt_core::table::{synth_fixture, Genre};

/// A realistic candidate/reference pair: the pipeline's final text for one
/// fixture table against the same text minus its last sentence.
fn fixture_pair() -> (TokenSeq, TokenSeq) {
    let table = synth_fixture(Genre::Finance, 7);
    let config = PipelineConfig {
        verbalizer: Some(stub_for_task(Task::Verbalize)),
        aggregator: Some(stub_for_task(Task::Aggregate)),
        subjectifier: Some(stub_for_task(Task::Subjectify)),
        skip_aggregation: false,
        skip_subjectivity: false,
        skip_empty_cells: false,
        group_size: 8,
        seed: Some(7),
    };
    let record = run("bench", &table, &config).expect("stub pipeline");
    (tokenize(&record.stage3_text), tokenize(&record.stage2_text))
}

fn bench_metrics(c: &mut Criterion) {
    let (candidate, reference) = fixture_pair();
    let text: String = "The quarterly revenue rose sharply. ".repeat(40);

    c.bench_function("tokenize_280_words", |b| {
        b.iter(|| tokenize(black_box(&text)))
    });
    c.bench_function("bleu4_fixture_pair", |b| {
        b.iter(|| {
            bleu4(
                black_box(std::slice::from_ref(&candidate)),
                black_box(std::slice::from_ref(&reference)),
            )
            .unwrap()
        })
    });
    c.bench_function("rouge_l_fixture_pair", |b| {
        b.iter(|| rouge_l(black_box(&candidate), black_box(&reference)).unwrap())
    });
    c.bench_function("meteor_fixture_pair", |b| {
        b.iter(|| meteor(black_box(&candidate), black_box(&reference)).unwrap())
    });

    let classifier = stub_for_task(Task::ClassifySubjectivity);
    let passage = "Revenue was steady all year. Costs fell twice. \
                   The outlook looks impressive. Analysts took notes.";
    c.bench_function("subjectivity_four_sentences", |b| {
        b.iter(|| subjectivity_pct(black_box(passage), classifier.as_ref()).unwrap())
    });

    let counts: Vec<Vec<u32>> = (0..100)
        .map(|i| match i % 3 {
            0 => vec![5, 0, 0],
            1 => vec![3, 2, 0],
            _ => vec![1, 2, 2],
        })
        .collect();
    let matrix = RatingMatrix::new(counts).unwrap();
    c.bench_function("fleiss_kappa_100x5", |b| {
        b.iter(|| fleiss_kappa(black_box(&matrix)).unwrap())
    });
}

criterion_group!(benches, bench_metrics);
criterion_main!(benches);
