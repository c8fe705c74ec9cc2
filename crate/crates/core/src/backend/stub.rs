//! Deterministic in-process backends.
//!
//! These stubs make the full pipeline and evaluation loop runnable with zero
//! network access: a template verbalizer, a space-join aggregator, identity
//! and appending subjectifiers, a lexicon-based subjectivity classifier, and
//! a token-overlap pair scorer. Outputs are pure functions of the inputs, so
//! runs are reproducible byte for byte.

use super::{
    delinearize_triple, Backend, BackendError, BackendRequest, BackendResponse, Label, Task,
};

/// Adjectives that mark a sentence as subjective for the stub classifier.
/// Matching is case-insensitive on whole words.
pub const SUBJECTIVITY_LEXICON: [&str; 10] = [
    "impressive",
    "dramatic",
    "remarkable",
    "strong",
    "weak",
    "healthy",
    "underwhelming",
    "steady",
    "fluctuating",
    "significant",
];

/// The sentence [`AppendingSubjectifier`] tacks onto its input. Contains
/// exactly one lexicon adjective, so the rewrite is detectably subjective.
pub const APPENDED_OPINION: &str = "Overall the numbers look impressive.";

fn expect_task(request: &BackendRequest, task: Task, name: &str) -> Result<(), BackendError> {
    if request.task != task {
        return Err(BackendError::RemoteFailure {
            code: "unsupported_task".into(),
            message: format!("{name} only handles {task}, got {}", request.task),
        });
    }
    Ok(())
}

/// Verbalizes each linearized triple as `"SUBJECT's PREDICATE is OBJECT."`.
pub struct TemplateVerbalizer;

impl Backend for TemplateVerbalizer {
    fn name(&self) -> &str {
        "stub:verbalize"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::Verbalize, self.name())?;
        let mut outputs = Vec::with_capacity(request.inputs.len());
        for input in &request.inputs {
            let triple = delinearize_triple(input).ok_or_else(|| BackendError::RemoteFailure {
                code: "bad_input".into(),
                message: format!("input is not a linearized triple: {input:?}"),
            })?;
            outputs.push(format!(
                "{}'s {} is {}.",
                triple.subject, triple.predicate, triple.object
            ));
        }
        Ok(BackendResponse::outputs(outputs))
    }
}

/// Fuses sentences by joining them with single spaces.
pub struct JoinAggregator;

impl Backend for JoinAggregator {
    fn name(&self) -> &str {
        "stub:aggregate"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::Aggregate, self.name())?;
        Ok(BackendResponse::outputs(vec![request.inputs.join(" ")]))
    }
}

/// Returns its inputs unchanged — the "no style transfer" baseline.
pub struct IdentitySubjectifier;

impl Backend for IdentitySubjectifier {
    fn name(&self) -> &str {
        "stub:subjectify-identity"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::Subjectify, self.name())?;
        Ok(BackendResponse::outputs(request.inputs.clone()))
    }
}

/// Appends [`APPENDED_OPINION`] to each input, guaranteeing at least one
/// subjective sentence per rewritten passage.
pub struct AppendingSubjectifier;

impl Backend for AppendingSubjectifier {
    fn name(&self) -> &str {
        "stub:subjectify-append"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::Subjectify, self.name())?;
        let outputs = request
            .inputs
            .iter()
            .map(|input| {
                if input.is_empty() {
                    APPENDED_OPINION.to_string()
                } else {
                    format!("{input} {APPENDED_OPINION}")
                }
            })
            .collect();
        Ok(BackendResponse::outputs(outputs))
    }
}

fn contains_lexicon_word(text: &str) -> bool {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !c.is_alphanumeric())
        .any(|word| SUBJECTIVITY_LEXICON.contains(&word))
}

/// Labels each input subjective iff it contains a lexicon adjective as a
/// whole word (case-insensitive).
pub struct LexiconClassifier;

impl Backend for LexiconClassifier {
    fn name(&self) -> &str {
        "stub:classify"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::ClassifySubjectivity, self.name())?;
        let labels = request
            .inputs
            .iter()
            .map(|input| {
                if contains_lexicon_word(input) {
                    Label::Subjective
                } else {
                    Label::Objective
                }
            })
            .collect();
        Ok(BackendResponse {
            outputs: vec![],
            labels: Some(labels),
            score: None,
        })
    }
}

/// Scores `[candidate, reference]` with token-level F1 over lowercase
/// whitespace tokens (multiset overlap). Identical strings score 1.0.
pub struct OverlapScorer;

impl Backend for OverlapScorer {
    fn name(&self) -> &str {
        "stub:score"
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        expect_task(request, Task::ScorePair, self.name())?;
        request.validate()?;
        let tokens = |s: &str| -> Vec<String> {
            s.to_lowercase()
                .split_whitespace()
                .map(|t| t.to_string())
                .collect()
        };
        let cand = tokens(&request.inputs[0]);
        let reff = tokens(&request.inputs[1]);
        let score = if cand.is_empty() && reff.is_empty() {
            1.0
        } else if cand.is_empty() || reff.is_empty() {
            0.0
        } else {
            let mut counts = std::collections::HashMap::new();
            for t in &reff {
                *counts.entry(t.as_str()).or_insert(0usize) += 1;
            }
            let mut overlap = 0usize;
            for t in &cand {
                if let Some(n) = counts.get_mut(t.as_str()) {
                    if *n > 0 {
                        *n -= 1;
                        overlap += 1;
                    }
                }
            }
            if overlap == 0 {
                0.0
            } else {
                let p = overlap as f64 / cand.len() as f64;
                let r = overlap as f64 / reff.len() as f64;
                2.0 * p * r / (p + r)
            }
        };
        Ok(BackendResponse {
            outputs: vec![],
            labels: None,
            score: Some(score),
        })
    }
}

/// The stub wired for a task in hermetic (`--stub`) mode. The subjectifier
/// is the appending variant, so stubbed full runs are measurably more
/// subjective than runs that skip the subjectivity stage.
pub fn stub_for_task(task: Task) -> super::BackendHandle {
    use std::sync::Arc;
    match task {
        Task::Verbalize => Arc::new(TemplateVerbalizer),
        Task::Aggregate => Arc::new(JoinAggregator),
        Task::Subjectify => Arc::new(AppendingSubjectifier),
        Task::ClassifySubjectivity => Arc::new(LexiconClassifier),
        Task::ScorePair => Arc::new(OverlapScorer),
    }
}
