//! Pipeline engine that turns tabular data into subjective natural-language
//! text via three stages (star-graph extraction, per-triple verbalization +
//! aggregation, subjectivity infusion), with every learned step delegated to a
//! pluggable generation backend, plus a native metrics suite for evaluating
//! the generated text.
//!
//! The crate is organized around the pipeline's data flow:
//!
//! * [`table`] — parsing and validation of CSV/JSON tables, seeded fixtures.
//! * [`rdf`] — deterministic table → single-star graph extraction and an
//!   N-Triples subset serializer/parser.
//! * [`backend`] — the task envelope spoken by generation/classification
//!   backends, an HTTP client with retries, and deterministic in-process stubs.
//! * [`pipeline`] — stage orchestration, provenance records, ablation switches.
//! * [`dataset`] — builders for the stage-2/stage-3 training corpora.
//! * [`metrics`] — BLEU-4, ROUGE-L, METEOR, subjectivity percentage,
//!   harmonic mean, and Fleiss' kappa.

pub mod backend;
pub mod dataset;
pub mod metrics;
pub mod pipeline;
pub mod rdf;
pub mod table;

mod parallel;
mod text;

pub use backend::{Backend, BackendError, BackendHandle, BackendRequest, BackendResponse, Task};
pub use pipeline::{PipelineConfig, PipelineRun};
pub use rdf::{StarGraph, Triple};
pub use table::{Cell, CellKind, Genre, Row, Table};
