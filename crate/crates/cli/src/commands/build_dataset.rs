//! `tagt build-dataset`: construct training corpora — aggregation pairs from
//! a triples+references corpus, or style pairs from a neutrality-edit TSV.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use tagt_core::dataset::{
    build_aggregation_dataset, load_corpus_jsonl, load_wnc_tsv, reverse_wnc, write_jsonl_file,
    DatasetError,
};

use crate::args::{BuildDatasetArgs, DatasetMode};
use crate::config::resolve;
use crate::error::CliError;

fn dataset_err(e: DatasetError) -> CliError {
    match e {
        DatasetError::Backend { .. } => CliError::partial(e.to_string()),
        other => CliError::input(other.to_string()),
    }
}

pub fn run(args: BuildDatasetArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.backend)?;
    let file = File::open(&args.input)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", args.input.display())))?;
    let reader = BufReader::new(file);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out.display())))?;

    match args.mode {
        DatasetMode::Aggregation => {
            let entries = load_corpus_jsonl(reader)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            if entries.is_empty() {
                return Err(CliError::input(format!(
                    "{}: empty source corpus",
                    args.input.display()
                )));
            }
            let verbalizer = resolved.backends.verbalize.clone().ok_or_else(|| {
                CliError::input(
                    "no verbalizer available: pass --stub or configure endpoints.verbalize",
                )
            })?;
            let mut params = BTreeMap::new();
            if let Some(seed) = resolved.seed {
                params.insert("seed".to_string(), seed.to_string());
            }
            let pairs = build_aggregation_dataset(
                &entries,
                verbalizer.as_ref(),
                resolved.workers,
                &params,
            )
            .map_err(dataset_err)?;
            let out_path = args.out.join("aggregation_pairs.jsonl");
            write_jsonl_file(&out_path, &pairs).map_err(dataset_err)?;
            println!(
                "built {} aggregation pair(s) from {} entr{} -> {}",
                pairs.len(),
                entries.len(),
                if entries.len() == 1 { "y" } else { "ies" },
                out_path.display()
            );
        }
        DatasetMode::WncReverse => {
            let rows = load_wnc_tsv(reader, args.subjective_col, args.neutral_col)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            if rows.is_empty() {
                return Err(CliError::input(format!(
                    "{}: empty source corpus",
                    args.input.display()
                )));
            }
            let pairs = reverse_wnc(&rows);
            let out_path = args.out.join("style_pairs.jsonl");
            write_jsonl_file(&out_path, &pairs).map_err(dataset_err)?;
            println!(
                "kept {} of {} row(s) as style pair(s) -> {}",
                pairs.len(),
                rows.len(),
                out_path.display()
            );
        }
    }
    Ok(())
}
