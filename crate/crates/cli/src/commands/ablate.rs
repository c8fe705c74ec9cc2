//! `tagt ablate`: run the full pipeline plus both ablations (no aggregation,
//! no subjectivity) over one corpus with identical backends, then compare.

use std::collections::HashMap;

use serde::Serialize;
use tagt_core::metrics::corpus_subjectivity;
use tagt_core::pipeline::PipelineRun;

use crate::args::AblateArgs;
use crate::commands::corpus;
use crate::commands::evaluate::{metric_err, reference_metrics, ReferenceRecord};
use crate::config::resolve;
use crate::error::CliError;
use crate::inputs::{discover, load_all};
use crate::jsonl::{read_jsonl, write_json_file};
use crate::render::{render_table, score_cell};

/// Evaluation summary of one pipeline configuration. Reference metrics are
/// present only when `--refs` was given.
#[derive(Debug, Serialize)]
pub struct ConfigReport {
    pub name: String,
    pub n_samples: usize,
    pub subjectivity_pct: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bleu4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meteor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rouge_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bertscore: Option<f64>,
}

/// Full vs. no-subjectivity share of subjective sentences for one domain.
#[derive(Debug, Serialize)]
pub struct DomainRow {
    pub domain: String,
    pub full_pct: f64,
    pub ws_pct: f64,
}

#[derive(Debug, Serialize)]
pub struct AblateReport {
    /// Exactly three entries: full, wa (no aggregation), ws (no subjectivity).
    pub configurations: Vec<ConfigReport>,
    pub domain_subjectivity: Vec<DomainRow>,
}

/// The domain of a table id: its first path component, or "all" for flat ids.
fn domain_of(table_id: &str) -> &str {
    match table_id.split_once('/') {
        Some((domain, _)) => domain,
        None => "all",
    }
}

fn texts_by_domain(runs: &[PipelineRun]) -> Vec<(&str, Vec<String>)> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_domain: HashMap<&str, Vec<String>> = HashMap::new();
    for run in runs {
        let domain = domain_of(&run.table_id);
        if !by_domain.contains_key(domain) {
            order.push(domain);
        }
        by_domain
            .entry(domain)
            .or_default()
            .push(run.stage3_text.clone());
    }
    order
        .into_iter()
        .map(|d| (d, by_domain.remove(d).expect("collected above")))
        .collect()
}

pub fn run(args: AblateArgs) -> Result<(), CliError> {
    let mut resolved = resolve(&args.backend)?;
    resolved.apply_overrides(false, false, args.skip_empty_cells, args.group_size);
    if resolved.skip_aggregation || resolved.skip_subjectivity {
        return Err(CliError::input(
            "ablate sets the skip flags itself; remove skip_aggregation/skip_subjectivity from the config",
        ));
    }
    let classifier = resolved.backends.classify.clone().ok_or_else(|| {
        CliError::input(
            "no subjectivity classifier available: pass --stub or configure endpoints.classify",
        )
    })?;
    let inputs = discover(&args.inputs, args.format)?;
    let tables = load_all(&inputs)?;

    let references: Option<HashMap<String, String>> = match &args.refs {
        Some(path) => {
            let records: Vec<ReferenceRecord> = read_jsonl(path)?;
            let mut map = HashMap::new();
            for record in records {
                if map.insert(record.table_id.clone(), record.reference).is_some() {
                    return Err(CliError::input(format!(
                        "duplicate reference for table {:?}",
                        record.table_id
                    )));
                }
            }
            Some(map)
        }
        None => None,
    };

    // Same corpus, same backends; only the skip flags differ.
    let variants: [(&str, bool, bool); 3] =
        [("full", false, false), ("wa", true, false), ("ws", false, true)];
    let mut results: Vec<(&str, Vec<PipelineRun>)> = Vec::new();
    let mut failures = 0usize;
    for (name, skip_aggregation, skip_subjectivity) in variants {
        let mut config = resolved.pipeline_config()?;
        config.skip_aggregation = skip_aggregation;
        config.skip_subjectivity = skip_subjectivity;
        let outcome = corpus::execute(
            &tables,
            &config,
            resolved.workers,
            &args.out.join(format!("runs-{name}.jsonl")),
            &args.out.join(format!("failures-{name}.jsonl")),
            Some(name),
        )?;
        failures += outcome.failures;
        results.push((name, outcome.runs));
    }
    if failures > 0 {
        return Err(CliError::partial(format!(
            "{failures} pipeline failure(s) across configurations; see failures-*.jsonl in {}",
            args.out.display()
        )));
    }

    let mut configurations = Vec::new();
    for (name, runs) in &results {
        let candidates: Vec<String> = runs.iter().map(|r| r.stage3_text.clone()).collect();
        let subjectivity_pct =
            corpus_subjectivity(&candidates, classifier.as_ref()).map_err(metric_err)?;
        let (bleu4, meteor, rouge_l, bertscore) = match &references {
            Some(map) => {
                let mut refs = Vec::with_capacity(runs.len());
                for run in runs.iter() {
                    let text = map.get(&run.table_id).ok_or_else(|| {
                        CliError::input(format!("no reference for table {:?}", run.table_id))
                    })?;
                    refs.push(text.clone());
                }
                let (b, m, r, s) = reference_metrics(
                    &candidates,
                    &refs,
                    resolved.backends.score.as_deref(),
                )?;
                (Some(b), Some(m), Some(r), s)
            }
            None => (None, None, None, None),
        };
        configurations.push(ConfigReport {
            name: name.to_string(),
            n_samples: runs.len(),
            subjectivity_pct,
            bleu4,
            meteor,
            rouge_l,
            bertscore,
        });
    }

    let full_runs = &results[0].1;
    let ws_runs = &results[2].1;
    let full_domains = texts_by_domain(full_runs);
    let ws_domains: HashMap<&str, Vec<String>> = texts_by_domain(ws_runs).into_iter().collect();
    let mut domain_subjectivity = Vec::new();
    for (domain, full_texts) in &full_domains {
        let ws_texts = ws_domains
            .get(domain)
            .expect("same corpus yields same domains");
        domain_subjectivity.push(DomainRow {
            domain: domain.to_string(),
            full_pct: corpus_subjectivity(full_texts, classifier.as_ref()).map_err(metric_err)?,
            ws_pct: corpus_subjectivity(ws_texts, classifier.as_ref()).map_err(metric_err)?,
        });
    }

    let report = AblateReport {
        configurations,
        domain_subjectivity,
    };
    let report_path = args.out.join("ablate-report.json");
    write_json_file(&report_path, &report)?;

    println!("Subjectivity by domain (full vs. no-subjectivity):");
    print!(
        "{}",
        render_table(
            &["domain", "Full %", "WS %"],
            &report
                .domain_subjectivity
                .iter()
                .map(|row| vec![
                    row.domain.clone(),
                    format!("{:.2}", row.full_pct),
                    format!("{:.2}", row.ws_pct),
                ])
                .collect::<Vec<_>>(),
        )
    );
    println!();
    println!("Per-configuration metrics:");
    print!(
        "{}",
        render_table(
            &[
                "config",
                "samples",
                "BLEU-4",
                "METEOR",
                "ROUGE-L",
                "BERTScore",
                "Subjectivity %",
            ],
            &report
                .configurations
                .iter()
                .map(|c| vec![
                    c.name.clone(),
                    c.n_samples.to_string(),
                    score_cell(c.bleu4),
                    score_cell(c.meteor),
                    score_cell(c.rouge_l),
                    score_cell(c.bertscore),
                    format!("{:.2}", c.subjectivity_pct),
                ])
                .collect::<Vec<_>>(),
        )
    );
    println!("report: {}", report_path.display());
    Ok(())
}
