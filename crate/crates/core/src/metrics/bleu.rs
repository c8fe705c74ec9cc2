//! Corpus-level BLEU-4.

use std::collections::HashMap;

use super::{MetricsError, TokenSeq};

/// Corpus BLEU-4 on a 0–100 scale, one reference per candidate.
///
/// Clipped n-gram matches and totals are accumulated over the whole corpus
/// before the precisions are formed (uniform 1/4 weights, n = 1..=4). The
/// brevity penalty is `exp(1 - R/C)` when the total candidate length `C`
/// falls short of the total reference length `R`, else 1. An order with zero
/// matches falls back to the smoothed precision `1/(2·T_n)`; if an order has
/// no n-grams at all (every candidate shorter than `n`), the score is 0.
pub fn bleu4(candidates: &[TokenSeq], references: &[TokenSeq]) -> Result<f64, MetricsError> {
    super::check_pairs(candidates, references)?;
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let mut cand_len = 0u64;
    let mut ref_len = 0u64;
    for (cand, reference) in candidates.iter().zip(references) {
        cand_len += cand.len() as u64;
        ref_len += reference.len() as u64;
        for n in 1..=4usize {
            let cand_grams = ngram_counts(cand.tokens(), n);
            if cand_grams.is_empty() {
                continue;
            }
            let ref_grams = ngram_counts(reference.tokens(), n);
            for (gram, count) in &cand_grams {
                totals[n - 1] += count;
                let clipped = ref_grams.get(gram).copied().unwrap_or(0).min(*count);
                matches[n - 1] += clipped;
            }
        }
    }
    let mut log_sum = 0.0;
    for n in 0..4 {
        if totals[n] == 0 {
            return Ok(0.0);
        }
        let p = if matches[n] == 0 {
            1.0 / (2.0 * totals[n] as f64)
        } else {
            matches[n] as f64 / totals[n] as f64
        };
        log_sum += p.ln();
    }
    let brevity = if cand_len < ref_len {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    } else {
        1.0
    };
    Ok(100.0 * brevity * (log_sum / 4.0).exp())
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}
