//! `tagt agreement`: Fleiss' kappa per metric column from a ratings CSV.
//!
//! Input: header `item_id,rater_id,<metric>...`; one row per (item, rater)
//! pair; each metric cell holds a categorical rating. Every item must be
//! rated by the same number of raters.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use tagt_core::metrics::{fleiss_kappa, MetricsError, RatingMatrix};

use crate::args::AgreementArgs;
use crate::error::CliError;
use crate::jsonl::write_json_file;
use crate::render::render_table;

#[derive(Debug, Serialize)]
pub struct MetricKappa {
    pub metric: String,
    pub kappa: f64,
}

#[derive(Debug, Serialize)]
pub struct AgreementReport {
    pub items: usize,
    pub raters_per_item: u32,
    pub kappa: Vec<MetricKappa>,
}

/// Ratings grouped by item in first-appearance order: for each item, one
/// inner Vec per rater holding that rater's value for each metric column.
struct Ratings {
    metrics: Vec<String>,
    items: Vec<(String, Vec<Vec<String>>)>,
}

fn parse_ratings(args: &AgreementArgs) -> Result<Ratings, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&args.ratings)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.ratings.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", args.ratings.display())))?
        .clone();
    if headers.len() < 3 || headers.get(0) != Some("item_id") || headers.get(1) != Some("rater_id")
    {
        return Err(CliError::input(format!(
            "{}: header must be item_id,rater_id,<metric>... (found {:?})",
            args.ratings.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let metrics: Vec<String> = headers.iter().skip(2).map(|h| h.trim().to_string()).collect();
    if metrics.iter().any(|m| m.is_empty()) {
        return Err(CliError::input(format!(
            "{}: empty metric column name",
            args.ratings.display()
        )));
    }

    let mut items: Vec<(String, Vec<Vec<String>>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut seen_pairs: HashSet<(String, String)> = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header row
        let record = record
            .map_err(|e| CliError::input(format!("{}:{line}: {e}", args.ratings.display())))?;
        if record.len() != headers.len() {
            return Err(CliError::input(format!(
                "{}:{line}: expected {} fields, found {}",
                args.ratings.display(),
                headers.len(),
                record.len()
            )));
        }
        let item = record.get(0).unwrap_or("").trim().to_string();
        let rater = record.get(1).unwrap_or("").trim().to_string();
        if item.is_empty() || rater.is_empty() {
            return Err(CliError::input(format!(
                "{}:{line}: empty item_id or rater_id",
                args.ratings.display()
            )));
        }
        if !seen_pairs.insert((item.clone(), rater.clone())) {
            return Err(CliError::input(format!(
                "{}:{line}: rater {rater:?} rated item {item:?} twice",
                args.ratings.display()
            )));
        }
        let values: Vec<String> = (2..headers.len())
            .map(|c| record.get(c).unwrap_or("").trim().to_string())
            .collect();
        if let Some(col) = values.iter().position(String::is_empty) {
            return Err(CliError::input(format!(
                "{}:{line}: empty rating in column {:?}",
                args.ratings.display(),
                metrics[col]
            )));
        }
        let slot = *index.entry(item.clone()).or_insert_with(|| {
            items.push((item, Vec::new()));
            items.len() - 1
        });
        items[slot].1.push(values);
    }
    if items.is_empty() {
        return Err(CliError::input(format!(
            "{}: no rating rows",
            args.ratings.display()
        )));
    }
    Ok(Ratings { metrics, items })
}

pub fn run(args: AgreementArgs) -> Result<(), CliError> {
    let ratings = parse_ratings(&args)?;

    let mut kappas = Vec::new();
    for (k, metric) in ratings.metrics.iter().enumerate() {
        let categories: BTreeSet<&str> = ratings
            .items
            .iter()
            .flat_map(|(_, raters)| raters.iter().map(|values| values[k].as_str()))
            .collect();
        let category_index: HashMap<&str, usize> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect();
        // Fleiss' kappa needs at least two categories; a column where every
        // rating is identical is perfect agreement by definition.
        let counts: Vec<Vec<u32>> = ratings
            .items
            .iter()
            .map(|(_, raters)| {
                let mut row = vec![0u32; categories.len().max(2)];
                for values in raters {
                    row[category_index[values[k].as_str()]] += 1;
                }
                row
            })
            .collect();
        let matrix = RatingMatrix::new(counts).map_err(|e| {
            CliError::input(format!("metric {metric:?}: {e}"))
        })?;
        let kappa = match fleiss_kappa(&matrix) {
            Ok(v) => v,
            Err(MetricsError::DegenerateAgreement) => {
                return Err(CliError::verification(format!(
                    "metric {metric:?}: agreement is degenerate (no observable variance)"
                )))
            }
            Err(e) => return Err(CliError::input(format!("metric {metric:?}: {e}"))),
        };
        kappas.push(MetricKappa {
            metric: metric.clone(),
            kappa,
        });
    }

    let raters_per_item = ratings.items[0].1.len() as u32;
    let report = AgreementReport {
        items: ratings.items.len(),
        raters_per_item,
        kappa: kappas,
    };
    println!(
        "items: {}, raters per item: {}",
        report.items, report.raters_per_item
    );
    print!(
        "{}",
        render_table(
            &["metric", "kappa"],
            &report
                .kappa
                .iter()
                .map(|k| vec![k.metric.clone(), format!("{:.4}", k.kappa)])
                .collect::<Vec<_>>(),
        )
    );
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
        let path = out.join("agreement.json");
        write_json_file(&path, &report)?;
        println!("report: {}", path.display());
    }
    Ok(())
}
