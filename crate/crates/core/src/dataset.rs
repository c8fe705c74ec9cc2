//! Builders for the two training corpora the learned stages need:
//! sentence-aggregation pairs (from a triples+references corpus) and
//! neutral→subjective style pairs (from a neutrality-edit corpus, reversed).
//! Both serialize as JSONL, one validated record per line.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{call, linearize_triple, Backend, BackendError, BackendRequest, Task};
use crate::parallel::parallel_map;
use crate::rdf::Triple;
use crate::text::normalize_ws;

#[derive(Debug, Error)]
pub enum DatasetError {
    /// No usable entries survived filtering.
    #[error("no entries with at least two triples — nothing to aggregate")]
    EmptyCorpus,
    /// A surviving entry has no (non-blank) reference text.
    #[error("entry {entry} has no reference text")]
    MissingReference { entry: usize },
    /// An entry carries a triple with an empty subject or predicate.
    #[error("entry {entry} has an invalid triple: {reason}")]
    InvalidTriple { entry: usize, reason: String },
    /// Verbalizing an entry failed.
    #[error("verbalizing entry {entry}: {source}")]
    Backend {
        entry: usize,
        source: BackendError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A JSONL/TSV line failed to parse or validate.
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

/// One stage-2 training example: the sentences to fuse and the fused target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationPair {
    pub inputs: Vec<String>,
    pub target: String,
}

/// One stage-3 training example: neutral source, subjective target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StylePair {
    pub source: String,
    pub target: String,
}

/// A record type that can live in a JSONL dataset file.
pub trait JsonlRecord: Serialize + DeserializeOwned {
    /// Structural validity check applied on both read and write.
    fn check(&self) -> Result<(), String>;
}

impl JsonlRecord for AggregationPair {
    fn check(&self) -> Result<(), String> {
        if self.inputs.len() < 2 {
            return Err(format!(
                "aggregation pair needs at least 2 inputs, found {}",
                self.inputs.len()
            ));
        }
        if self.inputs.iter().any(|i| i.trim().is_empty()) {
            return Err("aggregation pair has a blank input sentence".into());
        }
        if self.target.trim().is_empty() {
            return Err("aggregation pair has a blank target".into());
        }
        Ok(())
    }
}

impl JsonlRecord for StylePair {
    fn check(&self) -> Result<(), String> {
        if self.source.trim().is_empty() {
            return Err("style pair has a blank source".into());
        }
        if self.target.trim().is_empty() {
            return Err("style pair has a blank target".into());
        }
        if normalize_ws(&self.source) == normalize_ws(&self.target) {
            return Err("style pair source and target are identical".into());
        }
        Ok(())
    }
}

/// One entry of a triples-with-references corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub triples: Vec<Triple>,
    pub references: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CorpusEntryWire {
    triples: Vec<(String, String, String)>,
    references: Vec<String>,
}

/// Loads a triples+references corpus from JSONL. Each line is an object
/// `{"triples": [[s, p, o], …], "references": [text, …]}`; unknown extra
/// fields are rejected, blank lines are skipped.
pub fn load_corpus_jsonl<R: BufRead>(reader: R) -> Result<Vec<CorpusEntry>, DatasetError> {
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: CorpusEntryWire =
            serde_json::from_str(&line).map_err(|e| DatasetError::MalformedLine {
                line: i + 1,
                reason: e.to_string(),
            })?;
        entries.push(CorpusEntry {
            triples: wire
                .triples
                .into_iter()
                .map(|(subject, predicate, object)| Triple {
                    subject,
                    predicate,
                    object,
                })
                .collect(),
            references: wire.references,
        });
    }
    Ok(entries)
}

/// Builds stage-2 training pairs: verbalizes each entry's triples one by one
/// and pairs the sentences with the entry's first reference text.
///
/// Entries with fewer than two triples are dropped (a single sentence needs
/// no aggregation); if nothing survives, that is an error. Surviving entries
/// must carry at least one non-blank reference and well-formed triples.
pub fn build_aggregation_dataset(
    entries: &[CorpusEntry],
    verbalizer: &dyn Backend,
    workers: usize,
    params: &BTreeMap<String, String>,
) -> Result<Vec<AggregationPair>, DatasetError> {
    let survivors: Vec<(usize, &CorpusEntry)> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.triples.len() >= 2)
        .collect();
    if survivors.is_empty() {
        return Err(DatasetError::EmptyCorpus);
    }
    for &(index, entry) in &survivors {
        let target = entry.references.iter().find(|r| !r.trim().is_empty());
        if target.is_none() {
            return Err(DatasetError::MissingReference { entry: index });
        }
        for triple in &entry.triples {
            if triple.subject.trim().is_empty() || triple.predicate.trim().is_empty() {
                return Err(DatasetError::InvalidTriple {
                    entry: index,
                    reason: "subject and predicate must be non-empty".into(),
                });
            }
        }
    }
    let results = parallel_map(&survivors, workers, |_, &(index, entry)| {
        let mut inputs = Vec::with_capacity(entry.triples.len());
        for triple in &entry.triples {
            let request = BackendRequest::new(Task::Verbalize, vec![linearize_triple(triple)])
                .with_params(params.clone());
            let response = call(verbalizer, &request)
                .map_err(|source| DatasetError::Backend { entry: index, source })?;
            inputs.push(response.outputs.into_iter().next().expect("validated"));
        }
        let target = entry
            .references
            .iter()
            .find(|r| !r.trim().is_empty())
            .expect("checked above")
            .clone();
        Ok(AggregationPair { inputs, target })
    });
    results.into_iter().collect()
}

/// Reverses a neutrality-edit corpus into style-transfer pairs: each row is
/// `(subjective, neutral)` and becomes a pair with the neutral text as the
/// source and the subjective text as the target. Rows whose two sides are
/// equal after whitespace normalization (or have a blank side) are dropped.
pub fn reverse_wnc(rows: &[(String, String)]) -> Vec<StylePair> {
    rows.iter()
        .filter_map(|(subjective, neutral)| {
            let pair = StylePair {
                source: neutral.clone(),
                target: subjective.clone(),
            };
            pair.check().ok().map(|_| pair)
        })
        .collect()
}

/// Loads `(subjective, neutral)` rows from a TSV stream. `subjective_col`
/// and `neutral_col` are 0-based column indices; rows may carry extra
/// columns, blank lines are skipped.
pub fn load_wnc_tsv<R: BufRead>(
    reader: R,
    subjective_col: usize,
    neutral_col: usize,
) -> Result<Vec<(String, String)>, DatasetError> {
    let mut rows = Vec::new();
    let needed = subjective_col.max(neutral_col) + 1;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < needed {
            return Err(DatasetError::MalformedLine {
                line: i + 1,
                reason: format!("expected at least {needed} tab-separated columns, found {}", fields.len()),
            });
        }
        rows.push((
            fields[subjective_col].to_string(),
            fields[neutral_col].to_string(),
        ));
    }
    Ok(rows)
}

/// Writes records as JSONL, validating each; flushes after every line so a
/// crash never leaves a half-written record silently truncated.
pub fn write_jsonl<W: Write, T: JsonlRecord>(
    mut writer: W,
    records: &[T],
) -> Result<(), DatasetError> {
    for (i, record) in records.iter().enumerate() {
        record.check().map_err(|reason| DatasetError::MalformedLine {
            line: i + 1,
            reason,
        })?;
        let line = serde_json::to_string(record).expect("records serialize infallibly");
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
    Ok(())
}

/// Reads and validates JSONL records; blank lines are skipped, errors carry
/// 1-based line numbers.
pub fn read_jsonl<R: BufRead, T: JsonlRecord>(reader: R) -> Result<Vec<T>, DatasetError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| DatasetError::MalformedLine {
            line: i + 1,
            reason: e.to_string(),
        })?;
        record.check().map_err(|reason| DatasetError::MalformedLine {
            line: i + 1,
            reason,
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes records to a JSONL file (created fresh).
pub fn write_jsonl_file<T: JsonlRecord>(path: &Path, records: &[T]) -> Result<(), DatasetError> {
    let file = std::fs::File::create(path)?;
    write_jsonl(std::io::BufWriter::new(file), records)
}

/// Reads records from a JSONL file.
pub fn read_jsonl_file<T: JsonlRecord>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(file))
}

/// Deterministic Fisher–Yates shuffle keyed by `seed`.
pub fn seeded_shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.shuffle(&mut rng);
}
