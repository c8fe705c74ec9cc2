//! ROUGE-L: longest-common-subsequence F1.

use super::{MetricsError, TokenSeq};

/// ROUGE-L F1 for one candidate/reference pair, on a 0–100 scale.
///
/// With `L` the LCS length: precision `L/|candidate|`, recall
/// `L/|reference|`, F1 their harmonic combination (0 when there is no
/// overlap at all).
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> Result<f64, MetricsError> {
    if candidate.is_empty() {
        return Err(MetricsError::EmptyCandidate { index: 0 });
    }
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference { index: 0 });
    }
    let lcs = lcs_len(candidate.tokens(), reference.tokens()) as f64;
    if lcs == 0.0 {
        return Ok(0.0);
    }
    let precision = lcs / candidate.len() as f64;
    let recall = lcs / reference.len() as f64;
    Ok(100.0 * 2.0 * precision * recall / (precision + recall))
}

/// Mean per-pair ROUGE-L over a corpus, on a 0–100 scale.
pub fn rouge_l_corpus(
    candidates: &[TokenSeq],
    references: &[TokenSeq],
) -> Result<f64, MetricsError> {
    super::check_pairs(candidates, references)?;
    let mut sum = 0.0;
    for (i, (cand, reference)) in candidates.iter().zip(references).enumerate() {
        sum += rouge_l(cand, reference).map_err(|e| e.at_index(i))?;
    }
    Ok(sum / candidates.len() as f64)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            curr[j + 1] = if ai == bj {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
