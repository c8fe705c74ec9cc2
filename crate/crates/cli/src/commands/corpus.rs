//! Shared corpus execution: run the pipeline over many tables with a worker
//! pool, writing run records in table order as they complete. Every record
//! is flushed on write, so an interrupt never loses finished work.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};
use tagt_core::pipeline::{self, PipelineConfig, PipelineError, PipelineRun};
use tagt_core::Table;

use crate::error::CliError;
use crate::jsonl::JsonlWriter;

/// One pipeline failure, with whatever artifacts the run finished first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub table_id: String,
    pub stage: String,
    pub error: String,
    pub graphs_extracted: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage1_sentences: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage2_text: Option<String>,
}

pub struct CorpusOutcome {
    /// Successful runs, in table order.
    pub runs: Vec<PipelineRun>,
    pub failures: usize,
}

/// Runs the pipeline over every table using `workers` threads. Successful
/// runs stream to `runs_path` (JSONL, table order); failures stream to
/// `failures_path`, which is only created if something fails. Per-table
/// status lines go to stdout, prefixed with `label` when given.
pub fn execute(
    tables: &[(String, Table)],
    config: &PipelineConfig,
    workers: usize,
    runs_path: &Path,
    failures_path: &Path,
    label: Option<&str>,
) -> Result<CorpusOutcome, CliError> {
    config
        .validate()
        .map_err(|e| CliError::input(e.to_string()))?;
    let mut runs_writer = JsonlWriter::create(runs_path)?;
    let mut failures_writer: Option<JsonlWriter> = None;
    let mut runs = Vec::with_capacity(tables.len());
    let mut failures = 0usize;

    let next = AtomicUsize::new(0);
    let worker_count = workers.clamp(1, tables.len().max(1));
    let (tx, rx) = mpsc::channel::<(usize, Result<PipelineRun, PipelineError>)>();
    let prefix = label.map(|l| format!("[{l}] ")).unwrap_or_default();

    thread::scope(|scope| -> Result<(), CliError> {
        for _ in 0..worker_count {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tables.len() {
                    break;
                }
                let (id, table) = &tables[i];
                let result = pipeline::run(id, table, config);
                if tx.send((i, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // Reorder buffer: emit results in table order as soon as the next
        // expected index is in.
        let mut pending: BTreeMap<usize, Result<PipelineRun, PipelineError>> = BTreeMap::new();
        let mut expected = 0usize;
        for (i, result) in rx {
            pending.insert(i, result);
            while let Some(result) = pending.remove(&expected) {
                let id = &tables[expected].0;
                match result {
                    Ok(run) => {
                        runs_writer.push(&run)?;
                        println!("{prefix}ok {id}");
                        runs.push(run);
                    }
                    Err(PipelineError::InvalidConfig { reason }) => {
                        return Err(CliError::input(format!(
                            "invalid pipeline config: {reason}"
                        )));
                    }
                    Err(PipelineError::Stage(failure)) => {
                        let record = FailureRecord {
                            table_id: id.clone(),
                            stage: failure.stage.to_string(),
                            error: failure.error.to_string(),
                            graphs_extracted: failure.partial.graphs.len(),
                            stage1_sentences: failure.partial.stage1_sentences.clone(),
                            stage2_text: failure.partial.stage2_text.clone(),
                        };
                        let writer = match failures_writer.as_mut() {
                            Some(w) => w,
                            None => {
                                failures_writer = Some(JsonlWriter::create(failures_path)?);
                                failures_writer.as_mut().expect("just set")
                            }
                        };
                        writer.push(&record)?;
                        failures += 1;
                        println!("{prefix}FAILED {id}: {}", record.error);
                    }
                }
                expected += 1;
            }
        }
        Ok(())
    })?;
    Ok(CorpusOutcome { runs, failures })
}
