//! Three-stage pipeline orchestration.
//!
//! Stage 1 verbalizes every triple into one sentence, stage 2 fuses each
//! row's sentences into a passage (chunked calls when a row carries more
//! sentences than `group_size`), and stage 3 rewrites the passage with
//! subjective coloring. Two ablation switches short-circuit stages: with
//! `skip_aggregation` the stage-1 sentences are space-joined instead of sent
//! to the aggregator, and with `skip_subjectivity` stage 3 passes the
//! stage-2 text through unchanged. Each run records its inputs, all
//! intermediate artifacts, the backend wiring, and per-stage timings.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{call, linearize_triple, Backend, BackendError, BackendHandle, BackendRequest, Task};
use crate::parallel::parallel_map;
use crate::rdf::{extract, StarGraph};
use crate::table::Table;

/// Pipeline wiring: which backends run each stage plus the ablation and
/// extraction switches.
#[derive(Clone)]
pub struct PipelineConfig {
    pub verbalizer: Option<BackendHandle>,
    pub aggregator: Option<BackendHandle>,
    pub subjectifier: Option<BackendHandle>,
    /// Skip stage 2: join stage-1 sentences with single spaces.
    pub skip_aggregation: bool,
    /// Skip stage 3: stage-3 text equals stage-2 text.
    pub skip_subjectivity: bool,
    /// Drop triples for cells that are empty after trimming.
    pub skip_empty_cells: bool,
    /// Maximum sentences per aggregation request (minimum 2).
    pub group_size: usize,
    /// Forwarded to every backend request as `params["seed"]`.
    pub seed: Option<u64>,
}

impl PipelineConfig {
    /// A fully stubbed configuration: template verbalizer, join aggregator,
    /// appending subjectifier. Runs with zero network access.
    pub fn stubbed(seed: Option<u64>) -> Self {
        use crate::backend::stub::stub_for_task;
        PipelineConfig {
            verbalizer: Some(stub_for_task(Task::Verbalize)),
            aggregator: Some(stub_for_task(Task::Aggregate)),
            subjectifier: Some(stub_for_task(Task::Subjectify)),
            skip_aggregation: false,
            skip_subjectivity: false,
            skip_empty_cells: true,
            group_size: 8,
            seed,
        }
    }

    /// Checks that every stage the flags leave active has a backend and that
    /// `group_size` is at least 2.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.group_size < 2 {
            return Err(PipelineError::InvalidConfig {
                reason: format!("group_size must be at least 2, got {}", self.group_size),
            });
        }
        if self.verbalizer.is_none() {
            return Err(PipelineError::InvalidConfig {
                reason: "no verbalizer backend configured".into(),
            });
        }
        if !self.skip_aggregation && self.aggregator.is_none() {
            return Err(PipelineError::InvalidConfig {
                reason: "no aggregator backend configured (or set skip_aggregation)".into(),
            });
        }
        if !self.skip_subjectivity && self.subjectifier.is_none() {
            return Err(PipelineError::InvalidConfig {
                reason: "no subjectifier backend configured (or set skip_subjectivity)".into(),
            });
        }
        Ok(())
    }

    fn params(&self) -> BTreeMap<String, String> {
        let mut params = BTreeMap::new();
        if let Some(seed) = self.seed {
            params.insert("seed".to_string(), seed.to_string());
        }
        params
    }
}

/// Serializable snapshot of a [`PipelineConfig`], stored in every run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfigRecord {
    pub verbalizer: Option<String>,
    pub aggregator: Option<String>,
    pub subjectifier: Option<String>,
    pub skip_aggregation: bool,
    pub skip_subjectivity: bool,
    pub skip_empty_cells: bool,
    pub group_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl From<&PipelineConfig> for RunConfigRecord {
    fn from(config: &PipelineConfig) -> Self {
        let name = |b: &Option<BackendHandle>| b.as_ref().map(|b| b.name().to_string());
        RunConfigRecord {
            verbalizer: name(&config.verbalizer),
            aggregator: name(&config.aggregator),
            subjectifier: name(&config.subjectifier),
            skip_aggregation: config.skip_aggregation,
            skip_subjectivity: config.skip_subjectivity,
            skip_empty_cells: config.skip_empty_cells,
            group_size: config.group_size,
            seed: config.seed,
        }
    }
}

/// Wall-clock milliseconds spent per stage. Informational only — the one
/// nondeterministic part of a run record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub extract_ms: u64,
    pub verbalize_ms: u64,
    pub aggregate_ms: u64,
    pub subjectify_ms: u64,
}

/// Full provenance of one table's trip through the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub table_id: String,
    pub graphs: Vec<StarGraph>,
    pub stage1_sentences: Vec<String>,
    pub stage2_text: String,
    pub stage3_text: String,
    pub config: RunConfigRecord,
    pub timings: StageTimings,
}

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Extract,
    Verbalize,
    Aggregate,
    Subjectify,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Extract => "extract",
            Stage::Verbalize => "verbalize",
            Stage::Aggregate => "aggregate",
            Stage::Subjectify => "subjectify",
        })
    }
}

/// A failure inside one stage, with enough context to locate the bad call.
#[derive(Debug, Error)]
pub enum StageError {
    #[error("verbalizing triple {triple} of row {graph}: {source}")]
    Verbalize {
        graph: usize,
        triple: usize,
        source: BackendError,
    },
    #[error("aggregating sentence group {group}: {source}")]
    Aggregate { group: usize, source: BackendError },
    #[error("subjectifying passage: {source}")]
    Subjectify { source: BackendError },
    #[error("{stage} produced an empty output")]
    EmptyOutput { stage: Stage },
    #[error("{stage} received no input text")]
    EmptyInput { stage: Stage },
}

impl StageError {
    pub fn stage(&self) -> Stage {
        match self {
            StageError::Verbalize { .. } => Stage::Verbalize,
            StageError::Aggregate { .. } => Stage::Aggregate,
            StageError::Subjectify { .. } => Stage::Subjectify,
            StageError::EmptyOutput { stage } | StageError::EmptyInput { stage } => *stage,
        }
    }
}

/// Whatever the pipeline had finished before a stage failed.
#[derive(Debug, Default)]
pub struct PartialRun {
    pub graphs: Vec<StarGraph>,
    pub stage1_sentences: Option<Vec<String>>,
    pub stage2_text: Option<String>,
}

/// A run that died mid-pipeline: the failing stage, the error, and all
/// intermediate artifacts produced before it.
#[derive(Debug)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: StageError,
    pub partial: PartialRun,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {reason}")]
    InvalidConfig { reason: String },
    #[error("stage {} failed: {}", .0.stage, .0.error)]
    Stage(Box<StageFailure>),
}

fn nonempty(text: String, stage: Stage) -> Result<String, StageError> {
    if text.trim().is_empty() {
        Err(StageError::EmptyOutput { stage })
    } else {
        Ok(text)
    }
}

/// Stage 1: one verbalization request per triple, in graph order. Returns a
/// flat sentence list (use [`group_sentences`] to regroup by row). An empty
/// graph list yields an empty sentence list without any backend call.
pub fn run_stage1(
    graphs: &[StarGraph],
    verbalizer: &dyn Backend,
    params: &BTreeMap<String, String>,
) -> Result<Vec<String>, StageError> {
    let mut sentences = Vec::new();
    for (g, graph) in graphs.iter().enumerate() {
        for (t, triple) in graph.triples.iter().enumerate() {
            let request = BackendRequest::new(Task::Verbalize, vec![linearize_triple(triple)])
                .with_params(params.clone());
            let response =
                call(verbalizer, &request).map_err(|source| StageError::Verbalize {
                    graph: g,
                    triple: t,
                    source,
                })?;
            sentences.push(nonempty(
                response.outputs.into_iter().next().expect("validated"),
                Stage::Verbalize,
            )?);
        }
    }
    Ok(sentences)
}

/// Regroups flat stage-1 sentences by their source row. Panics if the
/// sentence count does not match the graphs' triple count.
pub fn group_sentences(graphs: &[StarGraph], sentences: &[String]) -> Vec<Vec<String>> {
    let total: usize = graphs.iter().map(|g| g.triples.len()).sum();
    assert_eq!(
        total,
        sentences.len(),
        "sentence list does not line up with graph triples"
    );
    let mut groups = Vec::with_capacity(graphs.len());
    let mut offset = 0;
    for graph in graphs {
        let end = offset + graph.triples.len();
        groups.push(sentences[offset..end].to_vec());
        offset = end;
    }
    groups
}

/// Stage 2: fuses each row's sentences into one passage.
///
/// Rows are aggregated independently; a row with more than `group_size`
/// sentences is split into consecutive chunks of at most `group_size` (7
/// sentences at `group_size` 4 → two requests). Chunk outputs are joined
/// with single spaces. If the whole stage receives exactly one sentence it
/// is returned as-is with no backend call; zero sentences is an error.
pub fn run_stage2(
    groups: &[Vec<String>],
    aggregator: &dyn Backend,
    group_size: usize,
    params: &BTreeMap<String, String>,
) -> Result<String, StageError> {
    let total: usize = groups.iter().map(|g| g.len()).sum();
    if total == 0 {
        return Err(StageError::EmptyInput {
            stage: Stage::Aggregate,
        });
    }
    if total == 1 {
        let sentence = groups
            .iter()
            .flatten()
            .next()
            .expect("total == 1")
            .clone();
        return nonempty(sentence, Stage::Aggregate);
    }
    let group_size = group_size.max(2);
    let mut pieces = Vec::new();
    let mut call_index = 0usize;
    for group in groups {
        for chunk in group.chunks(group_size) {
            if chunk.is_empty() {
                continue;
            }
            let request = BackendRequest::new(Task::Aggregate, chunk.to_vec())
                .with_params(params.clone());
            let response = call(aggregator, &request).map_err(|source| StageError::Aggregate {
                group: call_index,
                source,
            })?;
            pieces.push(nonempty(
                response.outputs.into_iter().next().expect("validated"),
                Stage::Aggregate,
            )?);
            call_index += 1;
        }
    }
    Ok(pieces.join(" "))
}

/// Stage 3: one request rewriting the passage with subjective coloring.
/// Empty input is rejected before any call is made.
pub fn run_stage3(
    text: &str,
    subjectifier: &dyn Backend,
    params: &BTreeMap<String, String>,
) -> Result<String, StageError> {
    if text.trim().is_empty() {
        return Err(StageError::EmptyInput {
            stage: Stage::Subjectify,
        });
    }
    let request = BackendRequest::new(Task::Subjectify, vec![text.to_string()])
        .with_params(params.clone());
    let response =
        call(subjectifier, &request).map_err(|source| StageError::Subjectify { source })?;
    nonempty(
        response.outputs.into_iter().next().expect("validated"),
        Stage::Subjectify,
    )
}

/// Runs the full pipeline over one table.
pub fn run(table_id: &str, table: &Table, config: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    config.validate()?;
    let params = config.params();
    let fail = |stage: Stage, error: StageError, partial: PartialRun| {
        PipelineError::Stage(Box::new(StageFailure {
            stage,
            error,
            partial,
        }))
    };
    let mut timings = StageTimings::default();

    let t0 = Instant::now();
    let graphs = extract(table, config.skip_empty_cells);
    timings.extract_ms = t0.elapsed().as_millis() as u64;

    let verbalizer = config.verbalizer.as_ref().expect("validated").as_ref();
    let t1 = Instant::now();
    let sentences = run_stage1(&graphs, verbalizer, &params).map_err(|e| {
        fail(
            e.stage(),
            e,
            PartialRun {
                graphs: graphs.clone(),
                ..PartialRun::default()
            },
        )
    })?;
    timings.verbalize_ms = t1.elapsed().as_millis() as u64;

    let t2 = Instant::now();
    let stage2_text = if config.skip_aggregation {
        sentences.join(" ")
    } else {
        let groups = group_sentences(&graphs, &sentences);
        let aggregator = config.aggregator.as_ref().expect("validated").as_ref();
        run_stage2(&groups, aggregator, config.group_size, &params).map_err(|e| {
            fail(
                e.stage(),
                e,
                PartialRun {
                    graphs: graphs.clone(),
                    stage1_sentences: Some(sentences.clone()),
                    stage2_text: None,
                },
            )
        })?
    };
    timings.aggregate_ms = t2.elapsed().as_millis() as u64;

    let t3 = Instant::now();
    let stage3_text = if config.skip_subjectivity {
        stage2_text.clone()
    } else {
        let subjectifier = config.subjectifier.as_ref().expect("validated").as_ref();
        run_stage3(&stage2_text, subjectifier, &params).map_err(|e| {
            fail(
                e.stage(),
                e,
                PartialRun {
                    graphs: graphs.clone(),
                    stage1_sentences: Some(sentences.clone()),
                    stage2_text: Some(stage2_text.clone()),
                },
            )
        })?
    };
    timings.subjectify_ms = t3.elapsed().as_millis() as u64;

    Ok(PipelineRun {
        table_id: table_id.to_string(),
        graphs,
        stage1_sentences: sentences,
        stage2_text,
        stage3_text,
        config: RunConfigRecord::from(config),
        timings,
    })
}

/// Runs the pipeline over many tables on up to `workers` threads. Results
/// come back in input order; per-table failures don't stop the rest.
pub fn run_corpus(
    tables: &[(String, Table)],
    config: &PipelineConfig,
    workers: usize,
) -> Vec<Result<PipelineRun, PipelineError>> {
    parallel_map(tables, workers, |_, (id, table)| run(id, table, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::stub::{
        AppendingSubjectifier, JoinAggregator, TemplateVerbalizer, APPENDED_OPINION,
    };
    use crate::backend::BackendResponse;
    use crate::table::parse_csv;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::{Arc, Mutex};

    fn demo_table() -> Table {
        parse_csv(b"Metric,2019,2020\nRevenue,580.60,823.50\nNet Income,98.20,105.00\n").unwrap()
    }

    /// Counts calls and records the input sizes it saw.
    struct Recording<B> {
        inner: B,
        calls: AtomicUsize,
        input_sizes: Mutex<Vec<usize>>,
        seen_params: Mutex<Vec<BTreeMap<String, String>>>,
    }

    impl<B> Recording<B> {
        fn new(inner: B) -> Self {
            Recording {
                inner,
                calls: AtomicUsize::new(0),
                input_sizes: Mutex::new(Vec::new()),
                seen_params: Mutex::new(Vec::new()),
            }
        }
    }

    impl<B: Backend> Backend for Recording<B> {
        fn name(&self) -> &str {
            self.inner.name()
        }

        fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.input_sizes.lock().unwrap().push(request.inputs.len());
            self.seen_params.lock().unwrap().push(request.params.clone());
            self.inner.execute(request)
        }
    }

    struct AlwaysFails;

    impl Backend for AlwaysFails {
        fn name(&self) -> &str {
            "test:fails"
        }

        fn execute(&self, _request: &BackendRequest) -> Result<BackendResponse, BackendError> {
            Err(BackendError::RemoteFailure {
                code: "boom".into(),
                message: "synthetic failure".into(),
            })
        }
    }

    #[test]
    fn full_stub_run_produces_expected_texts() {
        let run = run("t1", &demo_table(), &PipelineConfig::stubbed(Some(7))).unwrap();
        assert_eq!(run.table_id, "t1");
        assert_eq!(
            run.stage1_sentences,
            vec![
                "Revenue's 2019 is 580.60.",
                "Revenue's 2020 is 823.50.",
                "Net Income's 2019 is 98.20.",
                "Net Income's 2020 is 105.00.",
            ]
        );
        assert_eq!(
            run.stage2_text,
            "Revenue's 2019 is 580.60. Revenue's 2020 is 823.50. \
             Net Income's 2019 is 98.20. Net Income's 2020 is 105.00."
        );
        assert_eq!(
            run.stage3_text,
            format!("{} {}", run.stage2_text, APPENDED_OPINION)
        );
        assert_eq!(run.config.verbalizer.as_deref(), Some("stub:verbalize"));
        assert_eq!(run.config.seed, Some(7));
    }

    #[test]
    fn skip_aggregation_joins_sentences() {
        let mut config = PipelineConfig::stubbed(None);
        config.skip_aggregation = true;
        config.aggregator = None;
        let run = run("t", &demo_table(), &config).unwrap();
        assert_eq!(run.stage2_text, run.stage1_sentences.join(" "));
    }

    #[test]
    fn skip_subjectivity_passes_stage2_through() {
        let mut config = PipelineConfig::stubbed(None);
        config.skip_subjectivity = true;
        config.subjectifier = None;
        let run = run("t", &demo_table(), &config).unwrap();
        assert_eq!(run.stage3_text, run.stage2_text);
    }

    #[test]
    fn aggregator_called_once_per_row_group() {
        let aggregator = Arc::new(Recording::new(JoinAggregator));
        let mut config = PipelineConfig::stubbed(None);
        config.aggregator = Some(aggregator.clone());
        run("t", &demo_table(), &config).unwrap();
        // Two rows with two sentences each, group_size 8 → 2 calls of 2.
        assert_eq!(aggregator.calls.load(Ordering::SeqCst), 2);
        assert_eq!(*aggregator.input_sizes.lock().unwrap(), vec![2, 2]);
    }

    #[test]
    fn oversized_group_is_chunked() {
        let sentences: Vec<String> = (1..=7).map(|i| format!("S{i}.")).collect();
        let groups = vec![sentences];
        let aggregator = Recording::new(JoinAggregator);
        let text = run_stage2(&groups, &aggregator, 4, &BTreeMap::new()).unwrap();
        assert_eq!(aggregator.calls.load(Ordering::SeqCst), 2);
        assert_eq!(*aggregator.input_sizes.lock().unwrap(), vec![4, 3]);
        assert_eq!(text, "S1. S2. S3. S4. S5. S6. S7.");
    }

    #[test]
    fn singleton_stage_skips_the_backend() {
        let groups = vec![vec!["Only sentence.".to_string()]];
        let aggregator = Recording::new(JoinAggregator);
        let text = run_stage2(&groups, &aggregator, 8, &BTreeMap::new()).unwrap();
        assert_eq!(text, "Only sentence.");
        assert_eq!(aggregator.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn singleton_group_among_many_still_calls() {
        let groups = vec![
            vec!["A.".to_string()],
            vec!["B.".to_string(), "C.".to_string()],
        ];
        let aggregator = Recording::new(JoinAggregator);
        run_stage2(&groups, &aggregator, 8, &BTreeMap::new()).unwrap();
        assert_eq!(aggregator.calls.load(Ordering::SeqCst), 2);
        assert_eq!(*aggregator.input_sizes.lock().unwrap(), vec![1, 2]);
    }

    #[test]
    fn stage1_empty_graphs_no_calls() {
        let verbalizer = Recording::new(TemplateVerbalizer);
        let out = run_stage1(&[], &verbalizer, &BTreeMap::new()).unwrap();
        assert!(out.is_empty());
        assert_eq!(verbalizer.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn stage2_empty_input_is_error() {
        let err = run_stage2(&[], &JoinAggregator, 4, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, StageError::EmptyInput { stage: Stage::Aggregate }));
    }

    #[test]
    fn stage3_empty_input_is_error() {
        let err = run_stage3("  ", &AppendingSubjectifier, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, StageError::EmptyInput { stage: Stage::Subjectify }));
    }

    #[test]
    fn seed_reaches_backend_params() {
        let verbalizer = Arc::new(Recording::new(TemplateVerbalizer));
        let mut config = PipelineConfig::stubbed(Some(99));
        config.verbalizer = Some(verbalizer.clone());
        run("t", &demo_table(), &config).unwrap();
        let params = verbalizer.seen_params.lock().unwrap();
        assert!(params.iter().all(|p| p.get("seed") == Some(&"99".to_string())));
    }

    #[test]
    fn config_validation() {
        let mut config = PipelineConfig::stubbed(None);
        config.group_size = 1;
        assert!(matches!(
            run("t", &demo_table(), &config),
            Err(PipelineError::InvalidConfig { .. })
        ));

        let mut config = PipelineConfig::stubbed(None);
        config.aggregator = None;
        assert!(matches!(
            config.validate(),
            Err(PipelineError::InvalidConfig { .. })
        ));
        config.skip_aggregation = true;
        assert!(config.validate().is_ok());

        let mut config = PipelineConfig::stubbed(None);
        config.subjectifier = None;
        assert!(config.validate().is_err());
        config.skip_subjectivity = true;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn subjectify_failure_keeps_partial_artifacts() {
        let mut config = PipelineConfig::stubbed(None);
        config.subjectifier = Some(Arc::new(AlwaysFails));
        let err = run("t", &demo_table(), &config).unwrap_err();
        match err {
            PipelineError::Stage(failure) => {
                assert_eq!(failure.stage, Stage::Subjectify);
                assert_eq!(failure.partial.graphs.len(), 2);
                assert_eq!(
                    failure.partial.stage1_sentences.as_ref().map(|s| s.len()),
                    Some(4)
                );
                assert!(failure.partial.stage2_text.is_some());
            }
            other => panic!("expected stage failure, got {other:?}"),
        }
    }

    #[test]
    fn verbalize_failure_has_graphs_only() {
        let mut config = PipelineConfig::stubbed(None);
        config.verbalizer = Some(Arc::new(AlwaysFails));
        let err = run("t", &demo_table(), &config).unwrap_err();
        match err {
            PipelineError::Stage(failure) => {
                assert_eq!(failure.stage, Stage::Verbalize);
                assert!(!failure.partial.graphs.is_empty());
                assert!(failure.partial.stage1_sentences.is_none());
                assert!(failure.partial.stage2_text.is_none());
            }
            other => panic!("expected stage failure, got {other:?}"),
        }
    }

    #[test]
    fn corpus_preserves_order_and_isolates_failures() {
        let good = demo_table();
        let tables: Vec<(String, Table)> = (0..6)
            .map(|i| (format!("t{i}"), good.clone()))
            .collect();
        let results = run_corpus(&tables, &PipelineConfig::stubbed(Some(1)), 4);
        assert_eq!(results.len(), 6);
        for (i, result) in results.iter().enumerate() {
            assert_eq!(result.as_ref().unwrap().table_id, format!("t{i}"));
        }
    }

    #[test]
    fn identical_runs_are_reproducible_modulo_timings() {
        let config = PipelineConfig::stubbed(Some(5));
        let mut a = run("t", &demo_table(), &config).unwrap();
        let mut b = run("t", &demo_table(), &config).unwrap();
        a.timings = StageTimings::default();
        b.timings = StageTimings::default();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn run_record_round_trips_through_json() {
        let run = run("t", &demo_table(), &PipelineConfig::stubbed(Some(3))).unwrap();
        let json = serde_json::to_string(&run).unwrap();
        let back: PipelineRun = serde_json::from_str(&json).unwrap();
        assert_eq!(back, run);
    }
}
