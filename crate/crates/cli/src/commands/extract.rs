//! `tagt extract`: tables → per-row star graphs → N-Triples files.

use tagt_core::rdf::{extract, from_ntriples, reconstruct, to_ntriples};

use crate::args::ExtractArgs;
use crate::error::CliError;
use crate::inputs::{discover, load_table};
use crate::jsonl::ensure_parent;

pub fn run(args: ExtractArgs) -> Result<(), CliError> {
    let inputs = discover(&args.inputs, args.format)?;
    let mut roundtrip_failures: Vec<String> = Vec::new();
    let mut total_triples = 0usize;

    for input in &inputs {
        let table = load_table(input)?;
        let graphs = extract(&table, args.skip_empty_cells);
        let bytes = to_ntriples(&graphs);
        let out_path = args.out.join(format!("{}.nt", input.id));
        ensure_parent(&out_path)?;
        std::fs::write(&out_path, &bytes).map_err(|e| {
            CliError::input(format!("cannot write {}: {e}", out_path.display()))
        })?;
        let triples: usize = graphs.iter().map(|g| g.triples.len()).sum();
        total_triples += triples;
        println!(
            "{}: {} rows, {} triples -> {}",
            input.id,
            table.row_count(),
            triples,
            out_path.display()
        );

        if args.roundtrip_check {
            // The check always uses the full extraction: graphs from skipped
            // cells cannot reconstruct the original grid.
            let full = extract(&table, false);
            let full_bytes = to_ntriples(&full);
            match from_ntriples(&full_bytes) {
                Ok(reparsed) => {
                    let byte_stable = to_ntriples(&reparsed) == full_bytes;
                    let rebuilt_ok = matches!(
                        reconstruct(&reparsed, &table.headers),
                        Ok(rebuilt) if rebuilt.grid_eq(&table)
                    );
                    if !byte_stable || !rebuilt_ok {
                        roundtrip_failures.push(input.id.clone());
                    }
                }
                Err(e) => roundtrip_failures.push(format!("{} ({e})", input.id)),
            }
        }
    }

    if !roundtrip_failures.is_empty() {
        return Err(CliError::verification(format!(
            "round-trip check failed for {} table(s): {}",
            roundtrip_failures.len(),
            roundtrip_failures.join(", ")
        )));
    }
    println!(
        "extracted {} table(s), {} triples, into {}",
        inputs.len(),
        total_triples,
        args.out.display()
    );
    Ok(())
}
