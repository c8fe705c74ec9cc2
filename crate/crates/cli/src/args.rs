//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tagt",
    version,
    about = "Turn tables into star graphs, verbalize them, and infuse subjectivity",
    long_about = "Pipeline tooling: extract per-row RDF star graphs from tables, verbalize \
                  and aggregate them into text through pluggable generation backends, infuse \
                  subjectivity, build training datasets, and evaluate the output."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract per-row star graphs from tables and write N-Triples files
    Extract(ExtractArgs),
    /// Run the three-stage pipeline over tables and write run records
    Run(RunArgs),
    /// Score generated text against references and write a report
    Evaluate(EvaluateArgs),
    /// Run full, no-aggregation, and no-subjectivity configs and compare them
    Ablate(AblateArgs),
    /// Build training datasets (sentence aggregation or style transfer)
    BuildDataset(BuildDatasetArgs),
    /// Compute inter-rater agreement (Fleiss' kappa) from a ratings CSV
    Agreement(AgreementArgs),
}

/// How input table files are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    /// Decide per file by extension (.csv / .json)
    Auto,
    Csv,
    Json,
}

/// Flags shared by every command that talks to generation backends.
#[derive(Debug, Args)]
pub struct BackendFlags {
    /// JSON config file (endpoints, workers, seed, pipeline flags)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Use deterministic in-process stub backends; no network access
    #[arg(long)]
    pub stub: bool,

    /// Seed forwarded to backends (params.seed) and used for shuffling
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker threads for per-table parallelism (default 4)
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Table files or directories to extract from
    #[arg(required = true, value_name = "PATH")]
    pub inputs: Vec<PathBuf>,

    /// Input table format
    #[arg(long, value_enum, default_value_t = TableFormat::Auto)]
    pub format: TableFormat,

    /// Output directory for .nt files
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Drop triples for cells that are empty after trimming
    #[arg(long)]
    pub skip_empty_cells: bool,

    /// Re-parse each N-Triples file and verify the table reconstructs
    /// byte-identically (always checks the full, no-skip extraction)
    #[arg(long)]
    pub roundtrip_check: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Table files or directories to run the pipeline on
    #[arg(required = true, value_name = "PATH")]
    pub inputs: Vec<PathBuf>,

    /// Input table format
    #[arg(long, value_enum, default_value_t = TableFormat::Auto)]
    pub format: TableFormat,

    /// Output directory (runs.jsonl, failures.jsonl)
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub backend: BackendFlags,

    /// Skip stage 2: join stage-1 sentences with spaces instead
    #[arg(long)]
    pub skip_aggregation: bool,

    /// Skip stage 3: final text equals the aggregated text
    #[arg(long)]
    pub skip_subjectivity: bool,

    /// Drop triples for cells that are empty after trimming
    #[arg(long)]
    pub skip_empty_cells: bool,

    /// Maximum sentences per aggregation request (minimum 2)
    #[arg(long, value_name = "N")]
    pub group_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Pipeline run records (runs.jsonl from `tagt run`)
    #[arg(long, value_name = "PATH")]
    pub runs: PathBuf,

    /// Reference texts: JSONL of {"table_id": ..., "reference": ...}
    #[arg(long, value_name = "PATH")]
    pub refs: PathBuf,

    /// Output directory (report.json)
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub backend: BackendFlags,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Table files or directories to run all three configurations on
    #[arg(required = true, value_name = "PATH")]
    pub inputs: Vec<PathBuf>,

    /// Input table format
    #[arg(long, value_enum, default_value_t = TableFormat::Auto)]
    pub format: TableFormat,

    /// Output directory (runs-{full,wa,ws}.jsonl, ablate-report.json)
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub backend: BackendFlags,

    /// Optional references for BLEU/METEOR/ROUGE rows in the report
    #[arg(long, value_name = "PATH")]
    pub refs: Option<PathBuf>,

    /// Drop triples for cells that are empty after trimming
    #[arg(long)]
    pub skip_empty_cells: bool,

    /// Maximum sentences per aggregation request (minimum 2)
    #[arg(long, value_name = "N")]
    pub group_size: Option<usize>,
}

/// Which dataset to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetMode {
    /// Verbalize triples-with-references entries into aggregation pairs
    Aggregation,
    /// Reverse a neutrality-edit TSV into neutral→subjective style pairs
    WncReverse,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Dataset to build
    #[arg(value_enum)]
    pub mode: DatasetMode,

    /// Source file: JSONL corpus (aggregation) or TSV (wnc-reverse)
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Output directory (aggregation_pairs.jsonl / style_pairs.jsonl)
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub backend: BackendFlags,

    /// 0-based TSV column holding the subjective text (wnc-reverse)
    #[arg(long, value_name = "COL", default_value_t = 1)]
    pub subjective_col: usize,

    /// 0-based TSV column holding the neutral text (wnc-reverse)
    #[arg(long, value_name = "COL", default_value_t = 2)]
    pub neutral_col: usize,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// Ratings CSV: header `item_id,rater_id,<metric>...`, one row per
    /// (item, rater), categorical rating values
    #[arg(long, value_name = "PATH")]
    pub ratings: PathBuf,

    /// Optional output directory (agreement.json)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
