//! Generation/classification backend contract.
//!
//! Every learned step in the pipeline (verbalization, aggregation,
//! subjectivity infusion, subjectivity classification, pairwise scoring) is
//! delegated through one request/response envelope. Backends are pluggable:
//! [`http::HttpBackend`] speaks the wire protocol to a remote service, while
//! the [`stub`] module provides deterministic in-process implementations so
//! the whole pipeline runs hermetically.

pub mod http;
pub mod stub;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::Triple;

/// The task a backend is asked to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// One input per linearized triple; one sentence back per input.
    Verbalize,
    /// Sentences in, a single fused passage out.
    Aggregate,
    /// A passage in, its subjectivity-infused rewrite out.
    Subjectify,
    /// Sentences in, one subjective/objective label back per input.
    ClassifySubjectivity,
    /// `[candidate, reference]` in, a similarity score in `[0, 1]` back.
    ScorePair,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Verbalize => "verbalize",
            Task::Aggregate => "aggregate",
            Task::Subjectify => "subjectify",
            Task::ClassifySubjectivity => "classify_subjectivity",
            Task::ScorePair => "score_pair",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Subjectivity label for one classified input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Subjective,
    Objective,
}

/// One backend invocation. `params` is a flat string map (sampling settings,
/// seeds, …) forwarded verbatim; a `BTreeMap` keeps serialization stable so
/// retried calls send byte-identical bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendRequest {
    pub task: Task,
    pub inputs: Vec<String>,
    /// Always on the wire, `{}` when empty, so request bodies have a fixed shape.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl BackendRequest {
    pub fn new(task: Task, inputs: Vec<String>) -> Self {
        BackendRequest {
            task,
            inputs,
            params: BTreeMap::new(),
        }
    }

    pub fn with_params(mut self, params: BTreeMap<String, String>) -> Self {
        self.params = params;
        self
    }

    /// Checks request invariants: at least one input, and exactly
    /// `[candidate, reference]` for [`Task::ScorePair`].
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.inputs.is_empty() {
            return Err(BackendError::Protocol {
                message: format!("{} request must carry at least one input", self.task),
            });
        }
        if self.task == Task::ScorePair && self.inputs.len() != 2 {
            return Err(BackendError::Protocol {
                message: format!(
                    "score_pair request needs exactly [candidate, reference], got {} inputs",
                    self.inputs.len()
                ),
            });
        }
        Ok(())
    }
}

/// A backend's answer. Which fields must be present depends on the task; see
/// [`BackendResponse::validate_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendResponse {
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl BackendResponse {
    /// Convenience constructor for generation tasks.
    pub fn outputs(outputs: Vec<String>) -> Self {
        BackendResponse {
            outputs,
            labels: None,
            score: None,
        }
    }

    /// Checks the per-task response invariants:
    ///
    /// * generation tasks (`verbalize`, `aggregate`, `subjectify`): at least
    ///   one output, no labels;
    /// * `classify_subjectivity`: exactly one label per input;
    /// * `score_pair`: a score present and within `[0, 1]`.
    ///
    /// A score outside `[0, 1]` is rejected for every task.
    pub fn validate_for(&self, task: Task, input_count: usize) -> Result<(), BackendError> {
        if let Some(score) = self.score {
            if !(0.0..=1.0).contains(&score) || score.is_nan() {
                return Err(BackendError::Protocol {
                    message: format!("score {score} is outside [0, 1]"),
                });
            }
        }
        match task {
            Task::Verbalize | Task::Aggregate | Task::Subjectify => {
                if self.outputs.is_empty() {
                    return Err(BackendError::Protocol {
                        message: format!("{task} response carries no outputs"),
                    });
                }
                if self.labels.is_some() {
                    return Err(BackendError::Protocol {
                        message: format!("{task} response must not carry labels"),
                    });
                }
            }
            Task::ClassifySubjectivity => match &self.labels {
                Some(labels) if labels.len() == input_count => {}
                Some(labels) => {
                    return Err(BackendError::Protocol {
                        message: format!(
                            "classify_subjectivity response has {} labels for {} inputs",
                            labels.len(),
                            input_count
                        ),
                    })
                }
                None => {
                    return Err(BackendError::Protocol {
                        message: "classify_subjectivity response carries no labels".into(),
                    })
                }
            },
            Task::ScorePair => {
                if self.score.is_none() {
                    return Err(BackendError::Protocol {
                        message: "score_pair response carries no score".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Backend failure modes.
#[derive(Debug, Error)]
pub enum BackendError {
    /// The backend could not be reached (connect/timeout/IO). Retryable.
    #[error("transport failure: {message}")]
    Transport { message: String },
    /// The exchange violated the protocol: unparseable body, missing or
    /// malformed fields, out-of-range score. Not retryable.
    #[error("protocol violation: {message}")]
    Protocol { message: String },
    /// The backend answered with a structured error object. Not retryable.
    #[error("backend failure {code}: {message}")]
    RemoteFailure { code: String, message: String },
}

/// Anything that can execute a [`BackendRequest`].
///
/// Implementations only transport the request; invariant checking lives in
/// [`call`] so stubs and HTTP backends are held to identical rules.
pub trait Backend: Send + Sync {
    /// Stable identifier recorded in run provenance (e.g. `stub:verbalize`).
    fn name(&self) -> &str;

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError>;
}

/// Shared, cloneable handle to a backend.
pub type BackendHandle = Arc<dyn Backend>;

/// Validates the request, executes it, and validates the response against
/// the task's invariants. Every response returned by this function is safe
/// to consume without further shape checks.
pub fn call(backend: &dyn Backend, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
    request.validate()?;
    let response = backend.execute(request)?;
    response.validate_for(request.task, request.inputs.len())?;
    Ok(response)
}

/// Flattens a triple to the marker format consumed by verbalizers:
/// `<S> subject <P> predicate <O> object`.
///
/// Injective as long as no field contains a marker substring (`<S> `,
/// ` <P> `, ` <O> `), which table-extracted triples never do in practice.
pub fn linearize_triple(triple: &Triple) -> String {
    format!(
        "<S> {} <P> {} <O> {}",
        triple.subject, triple.predicate, triple.object
    )
}

/// Inverts [`linearize_triple`]. Returns `None` when the markers are missing
/// or out of order.
pub fn delinearize_triple(text: &str) -> Option<Triple> {
    let rest = text.strip_prefix("<S> ")?;
    let (subject, rest) = rest.split_once(" <P> ")?;
    let (predicate, object) = rest.split_once(" <O> ")?;
    Some(Triple {
        subject: subject.to_string(),
        predicate: predicate.to_string(),
        object: object.to_string(),
    })
}
