//! `tagt evaluate`: score generated text against references and write a
//! metrics report (machine-readable JSON plus an aligned text table).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use tagt_core::backend::Backend;
use tagt_core::metrics::{
    bertscore_pair, bleu4, corpus_subjectivity, meteor_corpus, rouge_l_corpus, tokenize,
    EvalReport, MetricsError, TokenSeq,
};
use tagt_core::pipeline::PipelineRun;

use crate::args::EvaluateArgs;
use crate::config::resolve;
use crate::error::CliError;
use crate::jsonl::{read_jsonl, write_json_file};
use crate::render::{render_table, score_cell};

/// One reference text, aligned to a run record by table id.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceRecord {
    pub table_id: String,
    pub reference: String,
}

/// Maps metric errors to exit codes: backend failures are partial pipeline
/// failures, everything else is an input problem.
pub(crate) fn metric_err(e: MetricsError) -> CliError {
    match e {
        MetricsError::Backend(b) => {
            CliError::partial(format!("backend failure during evaluation: {b}"))
        }
        other => CliError::input(other.to_string()),
    }
}

/// BLEU-4 / METEOR / ROUGE-L over aligned candidate/reference pairs, plus
/// the mean pair score when a scorer backend is available.
pub(crate) fn reference_metrics(
    candidates: &[String],
    references: &[String],
    scorer: Option<&dyn Backend>,
) -> Result<(f64, f64, f64, Option<f64>), CliError> {
    let cand_tokens: Vec<TokenSeq> = candidates.iter().map(|t| tokenize(t)).collect();
    let ref_tokens: Vec<TokenSeq> = references.iter().map(|t| tokenize(t)).collect();
    let bleu = bleu4(&cand_tokens, &ref_tokens).map_err(metric_err)?;
    let meteor = meteor_corpus(&cand_tokens, &ref_tokens).map_err(metric_err)?;
    let rouge = rouge_l_corpus(&cand_tokens, &ref_tokens).map_err(metric_err)?;
    let bertscore = match scorer {
        Some(scorer) => {
            let mut sum = 0.0;
            for (candidate, reference) in candidates.iter().zip(references) {
                sum += bertscore_pair(candidate, reference, scorer).map_err(metric_err)?;
            }
            Some(sum / candidates.len() as f64)
        }
        None => None,
    };
    Ok((bleu, meteor, rouge, bertscore))
}

/// Builds the full report for aligned candidates/references.
pub(crate) fn compute_report(
    candidates: &[String],
    references: &[String],
    classifier: &dyn Backend,
    scorer: Option<&dyn Backend>,
) -> Result<EvalReport, CliError> {
    let (bleu, meteor, rouge, bertscore) = reference_metrics(candidates, references, scorer)?;
    let subjectivity = corpus_subjectivity(candidates, classifier).map_err(metric_err)?;
    Ok(EvalReport {
        n_samples: candidates.len(),
        bleu4: bleu,
        meteor,
        rouge_l: rouge,
        bertscore,
        subjectivity_pct: subjectivity,
    })
}

/// Renders the one-row metrics table (columns in report order).
pub(crate) fn render_report(report: &EvalReport) -> String {
    render_table(
        &[
            "samples",
            "BLEU-4",
            "METEOR",
            "ROUGE-L",
            "BERTScore",
            "Subjectivity %",
        ],
        &[vec![
            report.n_samples.to_string(),
            format!("{:.2}", report.bleu4),
            format!("{:.2}", report.meteor),
            format!("{:.2}", report.rouge_l),
            score_cell(report.bertscore),
            format!("{:.2}", report.subjectivity_pct),
        ]],
    )
}

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.backend)?;
    let classifier = resolved.backends.classify.clone().ok_or_else(|| {
        CliError::input(
            "no subjectivity classifier available: pass --stub or configure endpoints.classify",
        )
    })?;
    let runs: Vec<PipelineRun> = read_jsonl(&args.runs)?;
    if runs.is_empty() {
        return Err(CliError::input(format!(
            "{}: no run records to evaluate",
            args.runs.display()
        )));
    }
    let refs: Vec<ReferenceRecord> = read_jsonl(&args.refs)?;
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    for record in &refs {
        if by_id
            .insert(record.table_id.as_str(), record.reference.as_str())
            .is_some()
        {
            return Err(CliError::input(format!(
                "duplicate reference for table {:?}",
                record.table_id
            )));
        }
    }
    let mut candidates = Vec::with_capacity(runs.len());
    let mut references = Vec::with_capacity(runs.len());
    for run in &runs {
        let reference = by_id.get(run.table_id.as_str()).ok_or_else(|| {
            CliError::input(format!("no reference for table {:?}", run.table_id))
        })?;
        candidates.push(run.stage3_text.clone());
        references.push((*reference).to_string());
    }

    let report = compute_report(
        &candidates,
        &references,
        classifier.as_ref(),
        resolved.backends.score.as_deref(),
    )?;
    report
        .validate()
        .map_err(|e| CliError::verification(format!("report failed validation: {e}")))?;

    let report_path = args.out.join("report.json");
    write_json_file(&report_path, &report)?;
    print!("{}", render_report(&report));
    println!("report: {}", report_path.display());
    Ok(())
}
