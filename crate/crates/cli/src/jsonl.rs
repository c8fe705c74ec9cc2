//! Line-oriented JSON artifact I/O with per-record flushing, so completed
//! work survives an interrupt.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

/// Creates parent directories as needed.
pub fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::input(format!("cannot create directory {}: {e}", parent.display()))
            })?;
        }
    }
    Ok(())
}

/// An append-only JSONL sink that flushes after every record.
pub struct JsonlWriter {
    path: PathBuf,
    writer: BufWriter<File>,
    records: usize,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        ensure_parent(path)?;
        let file = File::create(path)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
        Ok(JsonlWriter {
            path: path.to_path_buf(),
            writer: BufWriter::new(file),
            records: 0,
        })
    }

    pub fn push<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::input(format!("serializing record: {e}")))?;
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .and_then(|_| self.writer.flush())
            .map_err(|e| CliError::input(format!("writing {}: {e}", self.path.display())))?;
        self.records += 1;
        Ok(())
    }

    pub fn records(&self) -> usize {
        self.records
    }
}

/// Reads a JSONL file into typed records; blank lines are skipped and parse
/// errors carry the 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| {
            CliError::input(format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes a complete JSON document (pretty-printed, trailing newline).
pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::input(format!("serializing {}: {e}", path.display())))?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)
        .map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}
