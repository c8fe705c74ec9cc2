//! Input discovery: turn files and directories into a sorted, deduplicated
//! list of tables with stable identifiers.

use std::path::{Path, PathBuf};

use tagt_core::table::{parse_csv, parse_json};
use tagt_core::Table;

use crate::args::TableFormat;
use crate::error::CliError;

/// Concrete format of one discovered file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

/// One table input: its identifier, path, and format.
#[derive(Debug, Clone)]
pub struct DiscoveredTable {
    /// Relative path with the extension stripped, `/`-separated. Used in
    /// output file names and run records.
    pub id: String,
    pub path: PathBuf,
    pub format: FileFormat,
}

fn format_for(path: &Path, requested: TableFormat) -> Option<FileFormat> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase());
    match requested {
        TableFormat::Csv => Some(FileFormat::Csv),
        TableFormat::Json => Some(FileFormat::Json),
        TableFormat::Auto => match ext.as_deref() {
            Some("csv") => Some(FileFormat::Csv),
            Some("json") => Some(FileFormat::Json),
            _ => None,
        },
    }
}

fn id_for(relative: &Path) -> String {
    let stripped = relative.with_extension("");
    let parts: Vec<String> = stripped
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    parts.join("/")
}

fn walk(dir: &Path, base: &Path, requested: TableFormat, found: &mut Vec<DiscoveredTable>) -> Result<(), CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::input(format!("cannot read directory {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::input(format!("reading {}: {e}", dir.display())))?;
        let path = entry.path();
        if path.is_dir() {
            walk(&path, base, requested, found)?;
        } else if let Some(format) = format_for(&path, requested) {
            // Under --format auto, skip files with other extensions; under an
            // explicit format, only take files with a matching extension so a
            // mixed directory doesn't feed JSON to the CSV parser.
            if requested != TableFormat::Auto {
                let matches = match (format, path.extension().and_then(|e| e.to_str())) {
                    (FileFormat::Csv, Some(e)) => e.eq_ignore_ascii_case("csv"),
                    (FileFormat::Json, Some(e)) => e.eq_ignore_ascii_case("json"),
                    _ => false,
                };
                if !matches {
                    continue;
                }
            }
            let relative = path.strip_prefix(base).unwrap_or(&path);
            found.push(DiscoveredTable {
                id: id_for(relative),
                path: path.clone(),
                format,
            });
        }
    }
    Ok(())
}

/// Expands files and directories into a table list sorted by id. Directories
/// are walked recursively; ids are relative to the directory that was given.
/// Duplicate ids (two inputs mapping to the same name) are an error.
pub fn discover(paths: &[PathBuf], requested: TableFormat) -> Result<Vec<DiscoveredTable>, CliError> {
    let mut found = Vec::new();
    for path in paths {
        if path.is_dir() {
            walk(path, path, requested, &mut found)?;
        } else if path.is_file() {
            let format = format_for(path, requested).ok_or_else(|| {
                CliError::input(format!(
                    "{}: unknown table format (expected .csv or .json, or pass --format)",
                    path.display()
                ))
            })?;
            let relative = path.file_name().map(Path::new).unwrap_or(path);
            found.push(DiscoveredTable {
                id: id_for(relative),
                path: path.clone(),
                format,
            });
        } else {
            return Err(CliError::input(format!(
                "{}: no such file or directory",
                path.display()
            )));
        }
    }
    if found.is_empty() {
        return Err(CliError::input("no input tables found"));
    }
    found.sort_by(|a, b| a.id.cmp(&b.id));
    for pair in found.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(CliError::input(format!(
                "duplicate table id {:?} ({} and {})",
                pair[0].id,
                pair[0].path.display(),
                pair[1].path.display()
            )));
        }
    }
    Ok(found)
}

/// Loads and validates one discovered table.
pub fn load_table(input: &DiscoveredTable) -> Result<Table, CliError> {
    let bytes = std::fs::read(&input.path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.path.display())))?;
    let parsed = match input.format {
        FileFormat::Csv => parse_csv(&bytes),
        FileFormat::Json => parse_json(&bytes),
    };
    parsed.map_err(|e| CliError::input(format!("{}: {e}", input.path.display())))
}

/// Loads every discovered table, failing on the first invalid one.
pub fn load_all(inputs: &[DiscoveredTable]) -> Result<Vec<(String, Table)>, CliError> {
    inputs
        .iter()
        .map(|input| Ok((input.id.clone(), load_table(input)?)))
        .collect()
}
