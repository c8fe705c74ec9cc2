//! `tagt run`: execute the three-stage pipeline over a table corpus.

use crate::args::RunArgs;
use crate::commands::corpus;
use crate::config::resolve;
use crate::error::CliError;
use crate::inputs::{discover, load_all};

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let mut resolved = resolve(&args.backend)?;
    resolved.apply_overrides(
        args.skip_aggregation,
        args.skip_subjectivity,
        args.skip_empty_cells,
        args.group_size,
    );
    let config = resolved.pipeline_config()?;
    let inputs = discover(&args.inputs, args.format)?;
    let tables = load_all(&inputs)?;

    let runs_path = args.out.join("runs.jsonl");
    let failures_path = args.out.join("failures.jsonl");
    let outcome = corpus::execute(
        &tables,
        &config,
        resolved.workers,
        &runs_path,
        &failures_path,
        None,
    )?;
    println!(
        "wrote {} run record(s) to {}",
        outcome.runs.len(),
        runs_path.display()
    );
    if outcome.failures > 0 {
        return Err(CliError::partial(format!(
            "{} of {} table(s) failed; see {}",
            outcome.failures,
            tables.len(),
            failures_path.display()
        )));
    }
    Ok(())
}
