//! Benchmarks for table parsing, graph extraction, N-Triples round trips,
//! and the full three-stage pipeline against the in-process stubs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tagt_core::backend::stub::stub_for_task;
use tagt_core::backend::Task;
use tagt_core::pipeline::{run, PipelineConfig};
use tagt_core::rdf::{extract, from_ntriples, to_ntriples};
use tagt_core::table::{parse_csv, synth_fixture, write_csv, Genre};

fn stub_config() -> PipelineConfig {
    PipelineConfig {
        verbalizer: Some(stub_for_task(Task::Verbalize)),
        aggregator: Some(stub_for_task(Task::Aggregate)),
        subjectifier: Some(stub_for_task(Task::Subjectify)),
        skip_aggregation: false,
        skip_subjectivity: false,
        skip_empty_cells: false,
        group_size: 8,
        seed: Some(7),
    }
}

fn bench_pipeline(c: &mut Criterion) {
    let table = synth_fixture(Genre::Finance, 7);
    let csv = write_csv(&table);
    let graphs = extract(&table, false);
    let nt = to_ntriples(&graphs);
    let config = stub_config();

    c.bench_function("parse_csv_11x5", |b| {
        b.iter(|| parse_csv(black_box(&csv)).unwrap())
    });
    c.bench_function("extract_star_graphs_11x5", |b| {
        b.iter(|| extract(black_box(&table), false))
    });
    c.bench_function("to_ntriples_44_triples", |b| {
        b.iter(|| to_ntriples(black_box(&graphs)))
    });
    c.bench_function("from_ntriples_44_triples", |b| {
        b.iter(|| from_ntriples(black_box(&nt)).unwrap())
    });
    c.bench_function("stub_pipeline_full_table", |b| {
        b.iter(|| run("bench", black_box(&table), &config).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
