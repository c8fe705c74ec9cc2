//! Deterministic table-to-graph extraction and a lossless N-Triples subset.
//!
//! Each table row becomes one *star graph*: the row subject sits at the
//! center and every non-subject column contributes a `(subject, header,
//! cell)` triple. The N-Triples subset uses `urn:row:` / `urn:col:` IRIs with
//! percent-encoding, so serialization round-trips byte-for-byte and the
//! original grid can be reconstructed exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{Table, TableError};

/// One `(subject, predicate, object)` fact lifted from a table cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

/// All triples sharing one subject (one table row). Predicates are unique
/// within a star and keep the table's column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarGraph {
    pub subject: String,
    pub triples: Vec<Triple>,
}

impl StarGraph {
    /// Looks up the object stored under `predicate`, if any.
    pub fn object(&self, predicate: &str) -> Option<&str> {
        self.triples
            .iter()
            .find(|t| t.predicate == predicate)
            .map(|t| t.object.as_str())
    }
}

/// Extracts one star graph per table row, in row order.
///
/// The subject is the row's first cell, predicates are the non-subject
/// header labels (column order preserved), and objects are the raw cell
/// strings. With `skip_empty` set, cells that are empty after trimming
/// produce no triple (the star keeps its subject even if every cell is
/// skipped); otherwise empty cells yield triples with an empty object.
pub fn extract(table: &Table, skip_empty: bool) -> Vec<StarGraph> {
    table
        .rows
        .iter()
        .map(|row| {
            let subject = row.subject().to_string();
            let triples = table
                .headers
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(col, _)| !(skip_empty && row.cells[*col].is_blank()))
                .map(|(col, header)| Triple {
                    subject: subject.clone(),
                    predicate: header.clone(),
                    object: row.cells[col].raw.clone(),
                })
                .collect();
            StarGraph { subject, triples }
        })
        .collect()
}

const URN_UNRESERVED: &percent_encoding::AsciiSet = &percent_encoding::NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

fn encode_iri_part(s: &str) -> String {
    percent_encoding::utf8_percent_encode(s, URN_UNRESERVED).to_string()
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

/// Serializes star graphs to the N-Triples subset, one triple per line:
///
/// ```text
/// <urn:row:SUBJECT> <urn:col:PREDICATE> "OBJECT" .
/// ```
///
/// IRI parts are percent-encoded (only unreserved characters stay bare);
/// literals escape `\`, `"`, newline, carriage return, and tab. Graph and
/// triple order is preserved, so equal inputs serialize byte-identically.
pub fn to_ntriples(graphs: &[StarGraph]) -> Vec<u8> {
    let mut out = Vec::new();
    for graph in graphs {
        for triple in &graph.triples {
            out.extend_from_slice(b"<urn:row:");
            out.extend_from_slice(encode_iri_part(&triple.subject).as_bytes());
            out.extend_from_slice(b"> <urn:col:");
            out.extend_from_slice(encode_iri_part(&triple.predicate).as_bytes());
            out.extend_from_slice(b"> \"");
            out.extend_from_slice(escape_literal(&triple.object).as_bytes());
            out.extend_from_slice(b"\" .\n");
        }
    }
    out
}

/// Errors raised while parsing the N-Triples subset.
#[derive(Debug, Error)]
#[error("line {line}: {kind}")]
pub struct NtriplesError {
    /// 1-based line number.
    pub line: usize,
    pub kind: NtriplesErrorKind,
}

#[derive(Debug, Error)]
pub enum NtriplesErrorKind {
    #[error("expected {expected} but found {found:?}")]
    UnexpectedToken {
        expected: &'static str,
        found: String,
    },
    #[error("subject IRI must start with urn:row:, found {found:?}")]
    BadSubjectScheme { found: String },
    #[error("predicate IRI must start with urn:col:, found {found:?}")]
    BadPredicateScheme { found: String },
    #[error("invalid percent-encoding: {0}")]
    BadPercentEncoding(String),
    #[error("unterminated literal")]
    UnterminatedLiteral,
    #[error("unknown escape sequence \\{0}")]
    UnknownEscape(char),
    #[error("invalid UTF-8 in input")]
    InvalidUtf8,
    #[error("predicate {predicate:?} appears twice for subject {subject:?}")]
    DuplicatePredicate { subject: String, predicate: String },
}

fn percent_decode_strict(s: &str, line: usize) -> Result<String, NtriplesError> {
    let err = |msg: String| NtriplesError {
        line,
        kind: NtriplesErrorKind::BadPercentEncoding(msg),
    };
    let bytes = s.as_bytes();
    let mut decoded = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'%' => {
                let hi = bytes.get(i + 1).copied();
                let lo = bytes.get(i + 2).copied();
                let (hi, lo) = match (hi, lo) {
                    (Some(h), Some(l)) => (h, l),
                    _ => return Err(err("truncated % sequence".into())),
                };
                let hex = |c: u8| -> Option<u8> {
                    match c {
                        b'0'..=b'9' => Some(c - b'0'),
                        b'A'..=b'F' => Some(c - b'A' + 10),
                        b'a'..=b'f' => Some(c - b'a' + 10),
                        _ => None,
                    }
                };
                let (h, l) = match (hex(hi), hex(lo)) {
                    (Some(h), Some(l)) => (h, l),
                    _ => {
                        return Err(err(format!(
                            "invalid hex digits %{}{}",
                            hi as char, lo as char
                        )))
                    }
                };
                decoded.push(h * 16 + l);
                i += 3;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => {
                decoded.push(b);
                i += 1;
            }
            other => {
                return Err(err(format!(
                    "character {:?} must be percent-encoded",
                    other as char
                )))
            }
        }
    }
    String::from_utf8(decoded).map_err(|_| NtriplesError {
        line,
        kind: NtriplesErrorKind::InvalidUtf8,
    })
}

struct LineParser<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn fail(&self, expected: &'static str) -> NtriplesError {
        let found: String = self.rest.chars().take(12).collect();
        NtriplesError {
            line: self.line,
            kind: NtriplesErrorKind::UnexpectedToken { expected, found },
        }
    }

    fn expect(&mut self, token: &'static str) -> Result<(), NtriplesError> {
        match self.rest.strip_prefix(token) {
            Some(rest) => {
                self.rest = rest;
                Ok(())
            }
            None => Err(self.fail(token)),
        }
    }

    fn iri(&mut self, scheme: &'static str) -> Result<String, NtriplesError> {
        self.expect("<")?;
        let end = self.rest.find('>').ok_or_else(|| self.fail(">"))?;
        let iri = &self.rest[..end];
        self.rest = &self.rest[end + 1..];
        let encoded = iri.strip_prefix(scheme).ok_or_else(|| NtriplesError {
            line: self.line,
            kind: if scheme == "urn:row:" {
                NtriplesErrorKind::BadSubjectScheme { found: iri.into() }
            } else {
                NtriplesErrorKind::BadPredicateScheme { found: iri.into() }
            },
        })?;
        percent_decode_strict(encoded, self.line)
    }

    fn literal(&mut self) -> Result<String, NtriplesError> {
        self.expect("\"")?;
        let mut out = String::new();
        let mut chars = self.rest.char_indices();
        loop {
            let (idx, ch) = match chars.next() {
                Some(pair) => pair,
                None => {
                    return Err(NtriplesError {
                        line: self.line,
                        kind: NtriplesErrorKind::UnterminatedLiteral,
                    })
                }
            };
            match ch {
                '"' => {
                    self.rest = &self.rest[idx + 1..];
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 'r')) => out.push('\r'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, '"')) => out.push('"'),
                    Some((_, '\\')) => out.push('\\'),
                    Some((_, other)) => {
                        return Err(NtriplesError {
                            line: self.line,
                            kind: NtriplesErrorKind::UnknownEscape(other),
                        })
                    }
                    None => {
                        return Err(NtriplesError {
                            line: self.line,
                            kind: NtriplesErrorKind::UnterminatedLiteral,
                        })
                    }
                },
                other => out.push(other),
            }
        }
    }
}

/// Parses bytes produced by [`to_ntriples`] (or any conforming writer) back
/// into star graphs.
///
/// The grammar is strict: one triple per line, single spaces between terms, a
/// trailing ` .`, `urn:row:`/`urn:col:` schemes, and only the five literal
/// escapes the writer emits. Blank lines are skipped; a trailing carriage
/// return (CRLF input) is tolerated. Consecutive triples with the same
/// subject fold into one star; a predicate repeated within a star is an
/// error. Errors carry 1-based line numbers.
pub fn from_ntriples(bytes: &[u8]) -> Result<Vec<StarGraph>, NtriplesError> {
    let text = std::str::from_utf8(bytes).map_err(|_| NtriplesError {
        line: 0,
        kind: NtriplesErrorKind::InvalidUtf8,
    })?;
    let mut graphs: Vec<StarGraph> = Vec::new();
    for (i, raw_line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            continue;
        }
        let mut p = LineParser {
            rest: line,
            line: line_no,
        };
        let subject = p.iri("urn:row:")?;
        p.expect(" ")?;
        let predicate = p.iri("urn:col:")?;
        p.expect(" ")?;
        let object = p.literal()?;
        p.expect(" .")?;
        if !p.rest.is_empty() {
            return Err(p.fail("end of line"));
        }
        let triple = Triple {
            subject,
            predicate,
            object,
        };
        match graphs.last_mut() {
            Some(star) if star.subject == triple.subject => {
                if star.triples.iter().any(|t| t.predicate == triple.predicate) {
                    return Err(NtriplesError {
                        line: line_no,
                        kind: NtriplesErrorKind::DuplicatePredicate {
                            subject: triple.subject,
                            predicate: triple.predicate,
                        },
                    });
                }
                star.triples.push(triple);
            }
            _ => graphs.push(StarGraph {
                subject: triple.subject.clone(),
                triples: vec![triple],
            }),
        }
    }
    Ok(graphs)
}

/// Errors raised when rebuilding a table from star graphs.
#[derive(Debug, Error)]
pub enum ReconstructError {
    /// A star has no triple for a requested header.
    #[error("subject {subject:?} has no value for column {predicate:?}")]
    MissingPredicate { subject: String, predicate: String },
    /// A star carries a triple whose predicate is not in the header list.
    #[error("subject {subject:?} has unexpected column {predicate:?}")]
    UnknownPredicate { subject: String, predicate: String },
    /// The rebuilt grid fails table validation.
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Inverts [`extract`]: rebuilds the table grid from star graphs and the
/// original header list (first header names the subject column).
///
/// Every star must carry exactly the non-subject headers as predicates.
/// Captions are not part of the graph representation, so the result has
/// none. Feeding graphs extracted with `skip_empty = false` reproduces the
/// source grid exactly.
pub fn reconstruct(graphs: &[StarGraph], headers: &[String]) -> Result<Table, ReconstructError> {
    let value_headers = headers.get(1..).unwrap_or(&[]);
    let mut rows = Vec::with_capacity(graphs.len());
    for graph in graphs {
        for triple in &graph.triples {
            if !value_headers.contains(&triple.predicate) {
                return Err(ReconstructError::UnknownPredicate {
                    subject: graph.subject.clone(),
                    predicate: triple.predicate.clone(),
                });
            }
        }
        let mut row = Vec::with_capacity(headers.len());
        row.push(graph.subject.clone());
        for header in value_headers {
            match graph.object(header) {
                Some(object) => row.push(object.to_string()),
                None => {
                    return Err(ReconstructError::MissingPredicate {
                        subject: graph.subject.clone(),
                        predicate: header.clone(),
                    })
                }
            }
        }
        rows.push(row);
    }
    Ok(Table::new(None, headers.to_vec(), rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{parse_csv, synth_fixture, Genre};

    fn demo_table() -> Table {
        parse_csv(b"Metric,2019,2020\nRevenue,580.60,823.50\nNet Income,98.20,\n").unwrap()
    }

    #[test]
    fn extract_one_star_per_row() {
        let graphs = extract(&demo_table(), false);
        assert_eq!(graphs.len(), 2);
        assert_eq!(graphs[0].subject, "Revenue");
        assert_eq!(
            graphs[0].triples,
            vec![
                Triple {
                    subject: "Revenue".into(),
                    predicate: "2019".into(),
                    object: "580.60".into(),
                },
                Triple {
                    subject: "Revenue".into(),
                    predicate: "2020".into(),
                    object: "823.50".into(),
                },
            ]
        );
        assert_eq!(graphs[1].triples.len(), 2);
        assert_eq!(graphs[1].object("2020"), Some(""));
    }

    #[test]
    fn extract_skip_empty_drops_blank_cells() {
        let graphs = extract(&demo_table(), true);
        assert_eq!(graphs[1].triples.len(), 1);
        assert_eq!(graphs[1].object("2020"), None);
        assert_eq!(graphs[1].subject, "Net Income");
    }

    #[test]
    fn extract_triple_count_formula() {
        for genre in Genre::ALL {
            let t = synth_fixture(genre, 3);
            let graphs = extract(&t, false);
            let total: usize = graphs.iter().map(|g| g.triples.len()).sum();
            assert_eq!(total, t.row_count() * (t.column_count() - 1));
        }
    }

    #[test]
    fn ntriples_exact_line_shape() {
        let graphs = vec![StarGraph {
            subject: "Barack Obama".into(),
            triples: vec![Triple {
                subject: "Barack Obama".into(),
                predicate: "born in".into(),
                object: "Honolulu".into(),
            }],
        }];
        let bytes = to_ntriples(&graphs);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "<urn:row:Barack%20Obama> <urn:col:born%20in> \"Honolulu\" .\n"
        );
    }

    #[test]
    fn ntriples_escapes_literals_and_iris() {
        let graphs = vec![StarGraph {
            subject: "A/B".into(),
            triples: vec![Triple {
                subject: "A/B".into(),
                predicate: "no\u{e9}l".into(),
                object: "say \"hi\"\\\n\tdone\r".into(),
            }],
        }];
        let bytes = to_ntriples(&graphs);
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "<urn:row:A%2FB> <urn:col:no%C3%A9l> \"say \\\"hi\\\"\\\\\\n\\tdone\\r\" .\n"
        );
        let parsed = from_ntriples(text.as_bytes()).unwrap();
        assert_eq!(parsed, graphs);
    }

    #[test]
    fn ntriples_round_trip_bytes() {
        let graphs = extract(&demo_table(), false);
        let bytes = to_ntriples(&graphs);
        let parsed = from_ntriples(&bytes).unwrap();
        assert_eq!(parsed, graphs);
        assert_eq!(to_ntriples(&parsed), bytes);
    }

    #[test]
    fn from_ntriples_accepts_blank_lines_and_crlf() {
        let text = "<urn:row:A> <urn:col:B> \"x\" .\r\n\r\n<urn:row:A> <urn:col:C> \"y\" .\r\n";
        let graphs = from_ntriples(text.as_bytes()).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].triples.len(), 2);
    }

    #[test]
    fn from_ntriples_rejects_double_space() {
        let err = from_ntriples(b"<urn:row:A>  <urn:col:B> \"x\" .\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.kind, NtriplesErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn from_ntriples_rejects_missing_dot_with_line_number() {
        let text = "<urn:row:A> <urn:col:B> \"x\" .\n<urn:row:A> <urn:col:C> \"y\"\n";
        let err = from_ntriples(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn from_ntriples_rejects_bad_scheme() {
        let err = from_ntriples(b"<urn:cell:A> <urn:col:B> \"x\" .\n").unwrap_err();
        assert!(matches!(
            err.kind,
            NtriplesErrorKind::BadSubjectScheme { .. }
        ));
        let err = from_ntriples(b"<urn:row:A> <http://x> \"x\" .\n").unwrap_err();
        assert!(matches!(
            err.kind,
            NtriplesErrorKind::BadPredicateScheme { .. }
        ));
    }

    #[test]
    fn from_ntriples_rejects_unknown_escape_and_raw_chars() {
        let err = from_ntriples(b"<urn:row:A> <urn:col:B> \"x\\q\" .\n").unwrap_err();
        assert!(matches!(err.kind, NtriplesErrorKind::UnknownEscape('q')));
        let err = from_ntriples(b"<urn:row:A B> <urn:col:C> \"x\" .\n").unwrap_err();
        assert!(matches!(
            err.kind,
            NtriplesErrorKind::BadPercentEncoding(_)
        ));
        let err = from_ntriples(b"<urn:row:A%GG> <urn:col:C> \"x\" .\n").unwrap_err();
        assert!(matches!(
            err.kind,
            NtriplesErrorKind::BadPercentEncoding(_)
        ));
    }

    #[test]
    fn from_ntriples_rejects_duplicate_predicate_within_star() {
        let text = "<urn:row:A> <urn:col:B> \"x\" .\n<urn:row:A> <urn:col:B> \"y\" .\n";
        let err = from_ntriples(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(
            err.kind,
            NtriplesErrorKind::DuplicatePredicate { .. }
        ));
    }

    #[test]
    fn same_subject_on_nonadjacent_lines_forms_two_stars() {
        let text = "<urn:row:A> <urn:col:B> \"x\" .\n<urn:row:Z> <urn:col:B> \"y\" .\n<urn:row:A> <urn:col:C> \"z\" .\n";
        let graphs = from_ntriples(text.as_bytes()).unwrap();
        assert_eq!(graphs.len(), 3);
    }

    #[test]
    fn reconstruct_inverts_extract() {
        let table = demo_table();
        let graphs = extract(&table, false);
        let rebuilt = reconstruct(&graphs, &table.headers).unwrap();
        assert!(table.grid_eq(&rebuilt));
    }

    #[test]
    fn reconstruct_missing_predicate() {
        let table = demo_table();
        let graphs = extract(&table, true); // drops the empty 2020 cell
        let err = reconstruct(&graphs, &table.headers).unwrap_err();
        assert!(matches!(
            err,
            ReconstructError::MissingPredicate { ref subject, ref predicate }
                if subject == "Net Income" && predicate == "2020"
        ));
    }

    #[test]
    fn reconstruct_unknown_predicate() {
        let table = demo_table();
        let graphs = extract(&table, false);
        let headers = vec!["Metric".to_string(), "2019".to_string()];
        let err = reconstruct(&graphs, &headers).unwrap_err();
        assert!(matches!(err, ReconstructError::UnknownPredicate { .. }));
    }

    #[test]
    fn fixture_ntriples_full_cycle() {
        for genre in Genre::ALL {
            let table = synth_fixture(genre, 11);
            let graphs = extract(&table, false);
            let bytes = to_ntriples(&graphs);
            let parsed = from_ntriples(&bytes).unwrap();
            assert_eq!(parsed, graphs);
            assert_eq!(to_ntriples(&parsed), bytes);
            let rebuilt = reconstruct(&parsed, &table.headers).unwrap();
            assert!(table.grid_eq(&rebuilt));
        }
    }
}
