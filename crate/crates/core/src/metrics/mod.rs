//! Evaluation metrics for generated text.
//!
//! All scores live on a 0–100 scale: corpus [`bleu4`], per-pair and corpus
//! [`rouge_l`]/[`meteor`], classifier-based subjectivity percentages, plus
//! [`harmonic_mean`] for combining rater scores, [`fleiss_kappa`] for
//! inter-rater agreement, and a backend-delegated [`bertscore_pair`].
//! Everything runs on [`TokenSeq`]s produced by [`tokenize`], so every
//! metric sees the exact same token stream.

mod bleu;
mod meteor;
mod rouge;
pub mod stem;

pub use bleu::bleu4;
pub use meteor::{meteor, meteor_corpus};
pub use rouge::{rouge_l, rouge_l_corpus};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{call, Backend, BackendError, BackendRequest, Label, Task};

/// Errors raised by metric computation.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("corpus has {candidates} candidates but {references} references")]
    LengthMismatch {
        candidates: usize,
        references: usize,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("candidate {index} has no tokens")]
    EmptyCandidate { index: usize },
    #[error("reference {index} has no tokens")]
    EmptyReference { index: usize },
    #[error("text contains no sentences")]
    NoSentences,
    #[error("harmonic mean of an empty list")]
    EmptyList,
    #[error("harmonic mean requires positive values, got {value}")]
    NonPositiveValue { value: f64 },
    #[error("invalid rating matrix: {reason}")]
    InvalidMatrix { reason: String },
    #[error("agreement is undefined: chance agreement is 1 with imperfect observed agreement")]
    DegenerateAgreement,
    #[error(transparent)]
    Backend(#[from] BackendError),
}

impl MetricsError {
    /// Re-anchors a per-pair empty-input error at its corpus index.
    fn at_index(self, index: usize) -> MetricsError {
        match self {
            MetricsError::EmptyCandidate { .. } => MetricsError::EmptyCandidate { index },
            MetricsError::EmptyReference { .. } => MetricsError::EmptyReference { index },
            other => other,
        }
    }
}

/// A tokenized text. Only [`tokenize`] constructs these, so every consumer
/// sees the same tokenization rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    tokens: Vec<String>,
}

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Lowercases, splits on Unicode whitespace, and separates punctuation runs
/// into their own tokens. A `.` flanked by ASCII digits stays inside its
/// number, so `580.60` survives as one token:
///
/// * `"Revenue was 580.60, up 2.3%."` → `[revenue, was, 580.60, ",", up, 2.3, "%."]`
/// * `"(8.4)"` → `["(", "8.4", ")"]`
pub fn tokenize(text: &str) -> TokenSeq {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lower.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut run = String::new();
        let mut run_is_punct = false;
        for (i, &c) in chars.iter().enumerate() {
            let is_punct = !c.is_alphanumeric()
                && !(c == '.'
                    && i > 0
                    && i + 1 < chars.len()
                    && chars[i - 1].is_ascii_digit()
                    && chars[i + 1].is_ascii_digit());
            if !run.is_empty() && is_punct != run_is_punct {
                tokens.push(std::mem::take(&mut run));
            }
            run.push(c);
            run_is_punct = is_punct;
        }
        if !run.is_empty() {
            tokens.push(run);
        }
    }
    TokenSeq { tokens }
}

fn check_pairs(candidates: &[TokenSeq], references: &[TokenSeq]) -> Result<(), MetricsError> {
    if candidates.len() != references.len() {
        return Err(MetricsError::LengthMismatch {
            candidates: candidates.len(),
            references: references.len(),
        });
    }
    if candidates.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    for (index, c) in candidates.iter().enumerate() {
        if c.is_empty() {
            return Err(MetricsError::EmptyCandidate { index });
        }
    }
    for (index, r) in references.iter().enumerate() {
        if r.is_empty() {
            return Err(MetricsError::EmptyReference { index });
        }
    }
    Ok(())
}

/// Splits text into sentences at `.`, `!`, or `?` followed by whitespace or
/// end of input. A trailing fragment without a terminator still counts.
/// Pieces are trimmed; empty pieces are dropped.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = match chars.peek() {
                Some(&(_, next)) => next.is_whitespace(),
                None => true,
            };
            if at_boundary {
                let end = i + c.len_utf8();
                let piece = text[start..end].trim();
                if !piece.is_empty() {
                    sentences.push(piece);
                }
                start = end;
            }
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        sentences.push(rest);
    }
    sentences
}

/// Percentage of sentences in `text` the classifier labels subjective.
/// Errors if the text has no sentences or the backend misbehaves.
pub fn subjectivity_pct(text: &str, classifier: &dyn Backend) -> Result<f64, MetricsError> {
    let sentences = split_sentences(text);
    if sentences.is_empty() {
        return Err(MetricsError::NoSentences);
    }
    let request = BackendRequest::new(
        Task::ClassifySubjectivity,
        sentences.iter().map(|s| s.to_string()).collect(),
    );
    let response = call(classifier, &request)?;
    let labels = response.labels.expect("validated classify response");
    let subjective = labels.iter().filter(|l| **l == Label::Subjective).count();
    Ok(100.0 * subjective as f64 / labels.len() as f64)
}

/// Corpus subjectivity: subjective sentences over all sentences of all
/// texts, as a percentage. Texts without sentences contribute nothing; a
/// corpus with no sentences at all is an error.
pub fn corpus_subjectivity(texts: &[String], classifier: &dyn Backend) -> Result<f64, MetricsError> {
    let mut subjective = 0usize;
    let mut total = 0usize;
    for text in texts {
        let sentences = split_sentences(text);
        if sentences.is_empty() {
            continue;
        }
        let request = BackendRequest::new(
            Task::ClassifySubjectivity,
            sentences.iter().map(|s| s.to_string()).collect(),
        );
        let response = call(classifier, &request)?;
        let labels = response.labels.expect("validated classify response");
        subjective += labels.iter().filter(|l| **l == Label::Subjective).count();
        total += labels.len();
    }
    if total == 0 {
        return Err(MetricsError::NoSentences);
    }
    Ok(100.0 * subjective as f64 / total as f64)
}

/// Harmonic mean `n / Σ(1/xᵢ)`. All values must be positive.
pub fn harmonic_mean(values: &[f64]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyList);
    }
    let mut reciprocal_sum = 0.0;
    for &v in values {
        if v.is_nan() || v <= 0.0 {
            return Err(MetricsError::NonPositiveValue { value: v });
        }
        reciprocal_sum += 1.0 / v;
    }
    Ok(values.len() as f64 / reciprocal_sum)
}

/// Ratings of N items by a fixed number of raters into k categories:
/// `counts[item][category]` raters chose that category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingMatrix {
    counts: Vec<Vec<u32>>,
    raters: u32,
}

impl RatingMatrix {
    /// Validates that the matrix is rectangular with at least one item, at
    /// least two categories, and every item rated by the same `n >= 2`
    /// raters.
    pub fn new(counts: Vec<Vec<u32>>) -> Result<Self, MetricsError> {
        let invalid = |reason: String| MetricsError::InvalidMatrix { reason };
        if counts.is_empty() {
            return Err(invalid("no items".into()));
        }
        let categories = counts[0].len();
        if categories < 2 {
            return Err(invalid(format!(
                "need at least 2 categories, found {categories}"
            )));
        }
        let raters: u32 = counts[0].iter().sum();
        if raters < 2 {
            return Err(invalid(format!("need at least 2 raters, found {raters}")));
        }
        for (i, row) in counts.iter().enumerate() {
            if row.len() != categories {
                return Err(invalid(format!(
                    "item {i} has {} categories, expected {categories}",
                    row.len()
                )));
            }
            let sum: u32 = row.iter().sum();
            if sum != raters {
                return Err(invalid(format!(
                    "item {i} was rated by {sum} raters, expected {raters}"
                )));
            }
        }
        Ok(RatingMatrix { counts, raters })
    }

    pub fn items(&self) -> usize {
        self.counts.len()
    }

    pub fn categories(&self) -> usize {
        self.counts[0].len()
    }

    pub fn raters(&self) -> u32 {
        self.raters
    }
}

/// Fleiss' kappa for a rating matrix.
///
/// `κ = (P̄ − P̄ₑ) / (1 − P̄ₑ)` with observed agreement P̄ averaged over
/// items and chance agreement P̄ₑ from squared category proportions. When
/// every rating lands in one category, observed and chance agreement are
/// both 1 and κ is defined as 1.0; any other case with P̄ₑ = 1 is an error.
pub fn fleiss_kappa(matrix: &RatingMatrix) -> Result<f64, MetricsError> {
    let n = matrix.raters as f64;
    let items = matrix.items() as f64;
    let categories = matrix.categories();
    let mut p_j = vec![0.0f64; categories];
    for row in &matrix.counts {
        for (j, &count) in row.iter().enumerate() {
            p_j[j] += count as f64;
        }
    }
    for p in &mut p_j {
        *p /= items * n;
    }
    let p_bar: f64 = matrix
        .counts
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
            (sq - n) / (n * (n - 1.0))
        })
        .sum::<f64>()
        / items;
    let p_e: f64 = p_j.iter().map(|p| p * p).sum();
    if (1.0 - p_e).abs() < 1e-12 {
        if (1.0 - p_bar).abs() < 1e-12 {
            return Ok(1.0);
        }
        return Err(MetricsError::DegenerateAgreement);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// BERTScore-style similarity for one candidate/reference pair, delegated to
/// a `score_pair` backend and rescaled to 0–100.
pub fn bertscore_pair(
    candidate: &str,
    reference: &str,
    scorer: &dyn Backend,
) -> Result<f64, MetricsError> {
    let request = BackendRequest::new(
        Task::ScorePair,
        vec![candidate.to_string(), reference.to_string()],
    );
    let response = call(scorer, &request)?;
    Ok(100.0 * response.score.expect("validated score response"))
}

/// One evaluation run over a generation corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Number of candidate/reference pairs evaluated.
    pub n_samples: usize,
    pub bleu4: f64,
    pub meteor: f64,
    pub rouge_l: f64,
    /// Present only when a pair scorer backend was configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bertscore: Option<f64>,
    pub subjectivity_pct: f64,
}

impl EvalReport {
    /// Checks every score sits on the 0–100 scale.
    pub fn validate(&self) -> Result<(), MetricsError> {
        let mut fields = vec![
            ("bleu4", self.bleu4),
            ("meteor", self.meteor),
            ("rouge_l", self.rouge_l),
            ("subjectivity_pct", self.subjectivity_pct),
        ];
        if let Some(b) = self.bertscore {
            fields.push(("bertscore", b));
        }
        for (name, value) in fields {
            if !(0.0..=100.0).contains(&value) || value.is_nan() {
                return Err(MetricsError::InvalidMatrix {
                    reason: format!("{name} = {value} is outside the 0-100 scale"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::stub::LexiconClassifier;

    #[test]
    fn tokenize_number_with_inner_dot() {
        let toks = tokenize("Revenue was 580.60, up 2.3%.");
        assert_eq!(
            toks.tokens(),
            ["revenue", "was", "580.60", ",", "up", "2.3", "%."]
        );
    }

    #[test]
    fn tokenize_punctuation_runs() {
        assert_eq!(tokenize("Hello, world!").tokens(), ["hello", ",", "world", "!"]);
        assert_eq!(tokenize("(8.4)").tokens(), ["(", "8.4", ")"]);
        assert_eq!(tokenize("U.S.").tokens(), ["u", ".", "s", "."]);
    }

    #[test]
    fn tokenize_unicode_and_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \t\n").is_empty());
        assert_eq!(tokenize("Ärzte über 7,5%").tokens(), ["ärzte", "über", "7", ",", "5", "%"]);
    }

    #[test]
    fn tokenize_dot_needs_digits_both_sides() {
        assert_eq!(tokenize("v1. 2").tokens(), ["v1", ".", "2"]);
        assert_eq!(tokenize("a.b").tokens(), ["a", ".", "b"]);
        assert_eq!(tokenize("1.2.3").tokens(), ["1.2.3"]);
    }

    #[test]
    fn sentence_splitting() {
        assert_eq!(
            split_sentences("Hello. How are you? Fine"),
            vec!["Hello.", "How are you?", "Fine"]
        );
        assert_eq!(split_sentences("Wow!! Right."), vec!["Wow!!", "Right."]);
        assert_eq!(split_sentences("One sentence."), vec!["One sentence."]);
        assert_eq!(split_sentences("No terminator"), vec!["No terminator"]);
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ").is_empty());
        // Dots not followed by whitespace do not split.
        assert_eq!(split_sentences("Version 2.5 shipped."), vec!["Version 2.5 shipped."]);
    }

    #[test]
    fn subjectivity_quarter() {
        // 1 subjective sentence out of 4 → 25.0 exactly.
        let text = "Revenue was 580.60. Costs were 10. Assets grew. The outlook is impressive.";
        let pct = subjectivity_pct(text, &LexiconClassifier).unwrap();
        assert_eq!(pct, 25.0);
    }

    #[test]
    fn subjectivity_empty_text_errors() {
        assert!(matches!(
            subjectivity_pct("", &LexiconClassifier),
            Err(MetricsError::NoSentences)
        ));
    }

    #[test]
    fn corpus_subjectivity_pools_sentences() {
        let texts = vec![
            "Numbers were flat. A remarkable quarter.".to_string(),
            "Revenue was 1.".to_string(),
            String::new(),
        ];
        // 1 subjective of 3 sentences.
        let pct = corpus_subjectivity(&texts, &LexiconClassifier).unwrap();
        assert!((pct - 100.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_mean_examples() {
        let hm = harmonic_mean(&[8.7, 8.4, 8.9]).unwrap();
        assert!((hm - 8.66).abs() < 0.005, "{hm}");
        let hm = harmonic_mean(&[8.3, 8.1, 8.4]).unwrap();
        assert!((hm - 8.26).abs() < 0.005, "{hm}");
        assert_eq!(harmonic_mean(&[4.0]).unwrap(), 4.0);
        assert!((harmonic_mean(&[1.0, 2.0]).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_rejects_bad_input() {
        assert!(matches!(harmonic_mean(&[]), Err(MetricsError::EmptyList)));
        assert!(matches!(
            harmonic_mean(&[3.0, 0.0]),
            Err(MetricsError::NonPositiveValue { .. })
        ));
        assert!(matches!(
            harmonic_mean(&[3.0, -1.0]),
            Err(MetricsError::NonPositiveValue { .. })
        ));
    }

    #[test]
    fn fleiss_kappa_two_item_example() {
        // Items rated (A,A,A) and (A,A,B) by 3 raters → κ = −0.2.
        let matrix = RatingMatrix::new(vec![vec![3, 0], vec![2, 1]]).unwrap();
        let kappa = fleiss_kappa(&matrix).unwrap();
        assert!((kappa - (-0.2)).abs() < 1e-9, "{kappa}");
    }

    #[test]
    fn fleiss_kappa_perfect_agreement() {
        // Unanimous but split across categories: κ = 1 from the formula.
        let matrix = RatingMatrix::new(vec![vec![3, 0], vec![0, 3]]).unwrap();
        assert_eq!(fleiss_kappa(&matrix).unwrap(), 1.0);
        // Unanimous in a single category: chance agreement is 1, defined as 1.
        let matrix = RatingMatrix::new(vec![vec![3, 0], vec![3, 0]]).unwrap();
        assert_eq!(fleiss_kappa(&matrix).unwrap(), 1.0);
    }

    #[test]
    fn fleiss_kappa_fourteen_rater_case() {
        // A classic worked example: 10 items, 14 raters, 5 categories.
        let matrix = RatingMatrix::new(vec![
            vec![0, 0, 0, 0, 14],
            vec![0, 2, 6, 4, 2],
            vec![0, 0, 3, 5, 6],
            vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1],
            vec![7, 7, 0, 0, 0],
            vec![3, 2, 6, 3, 0],
            vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0],
            vec![0, 2, 2, 3, 7],
        ])
        .unwrap();
        let kappa = fleiss_kappa(&matrix).unwrap();
        assert!((kappa - 0.209930704422).abs() < 1e-9, "{kappa}");
    }

    #[test]
    fn rating_matrix_validation() {
        assert!(RatingMatrix::new(vec![]).is_err());
        assert!(RatingMatrix::new(vec![vec![3]]).is_err());
        assert!(RatingMatrix::new(vec![vec![1, 0]]).is_err());
        assert!(RatingMatrix::new(vec![vec![2, 1], vec![2, 2]]).is_err());
        assert!(RatingMatrix::new(vec![vec![2, 1], vec![1, 2, 0]]).is_err());
        let ok = RatingMatrix::new(vec![vec![2, 1], vec![0, 3]]).unwrap();
        assert_eq!((ok.items(), ok.categories(), ok.raters()), (2, 2, 3));
    }

    #[test]
    fn bertscore_identity_via_stub() {
        use crate::backend::stub::OverlapScorer;
        let s = bertscore_pair("same text", "same text", &OverlapScorer).unwrap();
        assert_eq!(s, 100.0);
        let s = bertscore_pair("a b", "a c", &OverlapScorer).unwrap();
        assert!((s - 50.0).abs() < 1e-9);
    }

    #[test]
    fn eval_report_validation_and_serde() {
        let report = EvalReport {
            n_samples: 3,
            bleu4: 25.46,
            meteor: 18.57,
            rouge_l: 82.50,
            bertscore: None,
            subjectivity_pct: 40.0,
        };
        report.validate().unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("bertscore"));
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let bad = EvalReport {
            bleu4: 101.0,
            ..report.clone()
        };
        assert!(bad.validate().is_err());
        let nan = EvalReport {
            meteor: f64::NAN,
            ..report
        };
        assert!(nan.validate().is_err());
    }
}
