//! Tabular input model: validated tables with a subject column, CSV/JSON
//! parsing and serialization, and seeded synthetic fixtures.
//!
//! A [`Table`] is a rectangular grid of at least two columns and one data
//! row. The first column holds the row subject (an entity name, never
//! empty); the remaining columns hold attribute values. Header labels and
//! subject cells are whitespace-normalized at construction; all other cells
//! are kept verbatim.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_ws;

/// Errors raised while parsing or validating tabular input.
#[derive(Debug, Error)]
pub enum TableError {
    /// The byte stream is not well-formed CSV (bad quoting, invalid UTF-8, …).
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    /// The byte stream is not well-formed JSON.
    #[error("malformed json: {0}")]
    MalformedJson(String),
    /// The JSON is well-formed but does not match the table schema.
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    /// A data row has a different number of cells than there are headers.
    #[error("data row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        /// 1-based data row index (the header row is not counted).
        row: usize,
        expected: usize,
        found: usize,
    },
    /// A header label is empty after whitespace normalization.
    #[error("header {index} is empty after whitespace normalization")]
    EmptyHeader {
        /// 0-based column index.
        index: usize,
    },
    /// Two headers normalize to the same label.
    #[error("duplicate header label {label:?}")]
    DuplicateHeader { label: String },
    /// Fewer than two columns (a subject column plus at least one attribute).
    #[error("table needs at least 2 columns, found {found}")]
    InsufficientColumns { found: usize },
    /// No data rows.
    #[error("table has no data rows")]
    NoRows,
    /// A subject cell (first column) is empty after whitespace normalization.
    #[error("data row {row} has an empty subject cell")]
    EmptySubject {
        /// 1-based data row index.
        row: usize,
    },
}

/// A decimal value kept exactly as written: sign plus digit strings.
///
/// No binary floating-point conversion happens at parse time, so values such
/// as `580.60` keep their trailing zero and never pick up representation
/// error. Equality is structural (`"42"` and `"42.0"` are different values).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactDecimal {
    /// True when the literal carries a leading `-`.
    pub negative: bool,
    /// Digits before the decimal point (at least one).
    pub int_part: String,
    /// Digits after the decimal point (empty when there is no point).
    pub frac_part: String,
}

impl ExactDecimal {
    /// Parses `[+-]?digits(.digits)?` from an already-trimmed string.
    /// Returns `None` for anything else (exponents, thousands separators,
    /// lone dots, empty fraction, …).
    pub fn parse(s: &str) -> Option<Self> {
        let bytes = s.as_bytes();
        let mut i = 0;
        let negative = match bytes.first() {
            Some(b'-') => {
                i += 1;
                true
            }
            Some(b'+') => {
                i += 1;
                false
            }
            _ => false,
        };
        let int_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == int_start {
            return None;
        }
        let int_part = s[int_start..i].to_string();
        let mut frac_part = String::new();
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            let frac_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i == frac_start {
                return None;
            }
            frac_part = s[frac_start..i].to_string();
        }
        if i != bytes.len() {
            return None;
        }
        Some(ExactDecimal {
            negative,
            int_part,
            frac_part,
        })
    }

    /// Approximate numeric value, for ordering or arithmetic where exactness
    /// is not required.
    pub fn as_f64(&self) -> f64 {
        let mut lit = String::new();
        if self.negative {
            lit.push('-');
        }
        lit.push_str(&self.int_part);
        if !self.frac_part.is_empty() {
            lit.push('.');
            lit.push_str(&self.frac_part);
        }
        lit.parse().unwrap_or(f64::NAN)
    }
}

impl std::fmt::Display for ExactDecimal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&self.int_part)?;
        if !self.frac_part.is_empty() {
            f.write_str(".")?;
            f.write_str(&self.frac_part)?;
        }
        Ok(())
    }
}

/// How a cell's content classifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellKind {
    /// The trimmed content matches `[+-]?digits(.digits)?`.
    Numeric(ExactDecimal),
    /// Anything else, including the empty string.
    Text,
}

/// One table cell: the raw text exactly as provided plus its classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub raw: String,
    pub kind: CellKind,
}

impl Cell {
    /// Classifies `raw` (numeric detection runs on the trimmed content; the
    /// raw text is stored untouched).
    pub fn new(raw: String) -> Self {
        let kind = match ExactDecimal::parse(raw.trim()) {
            Some(d) => CellKind::Numeric(d),
            None => CellKind::Text,
        };
        Cell { raw, kind }
    }

    /// True when the cell is empty after trimming.
    pub fn is_blank(&self) -> bool {
        self.raw.trim().is_empty()
    }
}

/// One data row. The first cell is the row subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cells: Vec<Cell>,
}

impl Row {
    /// The normalized subject text (first cell).
    pub fn subject(&self) -> &str {
        &self.cells[0].raw
    }
}

/// A validated table: `c >= 2` distinct non-empty headers, `r >= 1` rows of
/// exactly `c` cells each, and a non-empty subject cell in every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub caption: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    /// Validates and builds a table from raw strings. Headers and subject
    /// cells are whitespace-normalized; other cells are stored verbatim.
    pub fn new(
        caption: Option<String>,
        headers: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<Self, TableError> {
        if headers.len() < 2 {
            return Err(TableError::InsufficientColumns {
                found: headers.len(),
            });
        }
        let headers: Vec<String> = headers.iter().map(|h| normalize_ws(h)).collect();
        for (index, h) in headers.iter().enumerate() {
            if h.is_empty() {
                return Err(TableError::EmptyHeader { index });
            }
        }
        for (i, h) in headers.iter().enumerate() {
            if headers[..i].contains(h) {
                return Err(TableError::DuplicateHeader { label: h.clone() });
            }
        }
        if rows.is_empty() {
            return Err(TableError::NoRows);
        }
        let expected = headers.len();
        let mut built = Vec::with_capacity(rows.len());
        for (i, raw_row) in rows.into_iter().enumerate() {
            if raw_row.len() != expected {
                return Err(TableError::RaggedRow {
                    row: i + 1,
                    expected,
                    found: raw_row.len(),
                });
            }
            let mut cells = Vec::with_capacity(expected);
            for (col, raw) in raw_row.into_iter().enumerate() {
                if col == 0 {
                    let subject = normalize_ws(&raw);
                    if subject.is_empty() {
                        return Err(TableError::EmptySubject { row: i + 1 });
                    }
                    cells.push(Cell::new(subject));
                } else {
                    cells.push(Cell::new(raw));
                }
            }
            built.push(Row { cells });
        }
        Ok(Table {
            caption,
            headers,
            rows: built,
        })
    }

    /// Number of columns, including the subject column.
    pub fn column_count(&self) -> usize {
        self.headers.len()
    }

    /// Number of data rows.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// True when both tables carry the same headers and cell grid (captions
    /// are ignored; CSV has no place to store one).
    pub fn grid_eq(&self, other: &Table) -> bool {
        self.headers == other.headers && self.rows == other.rows
    }
}

/// Parses CSV bytes (RFC 4180 quoting) into a table. The first record is the
/// header row.
pub fn parse_csv(bytes: &[u8]) -> Result<Table, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut records = Vec::new();
    for result in reader.byte_records() {
        let record = result.map_err(|e| TableError::MalformedCsv(e.to_string()))?;
        let mut fields = Vec::with_capacity(record.len());
        for field in record.iter() {
            let text = std::str::from_utf8(field).map_err(|_| {
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                TableError::MalformedCsv(format!("invalid UTF-8 on line {line}"))
            })?;
            fields.push(text.to_string());
        }
        records.push(fields);
    }
    let mut iter = records.into_iter();
    let headers = iter
        .next()
        .ok_or_else(|| TableError::MalformedCsv("missing header row".into()))?;
    let rows: Vec<Vec<String>> = iter.collect();
    if rows.is_empty() {
        return Err(TableError::NoRows);
    }
    Table::new(None, headers, rows)
}

/// JSON document shape accepted by [`parse_json`] and produced by
/// [`write_json`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    caption: Option<String>,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Parses a JSON table document: an object with optional `caption`, a
/// `headers` array of strings, and a non-empty `rows` array of string arrays.
/// Unknown fields and non-string cells are rejected.
pub fn parse_json(bytes: &[u8]) -> Result<Table, TableError> {
    let doc: TableDoc = serde_json::from_slice(bytes).map_err(|e| {
        if e.is_data() {
            TableError::SchemaViolation(e.to_string())
        } else {
            TableError::MalformedJson(e.to_string())
        }
    })?;
    if doc.rows.is_empty() {
        return Err(TableError::SchemaViolation(
            "rows must contain at least one row".into(),
        ));
    }
    Table::new(doc.caption, doc.headers, doc.rows)
}

/// Serializes a table to CSV (header row first, quoting only where needed).
/// The caption, if any, is not representable in CSV and is dropped.
pub fn write_csv(table: &Table) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.headers)
        .expect("writing to a Vec cannot fail");
    for row in &table.rows {
        writer
            .write_record(row.cells.iter().map(|c| c.raw.as_str()))
            .expect("writing to a Vec cannot fail");
    }
    writer.into_inner().expect("writing to a Vec cannot fail")
}

/// Serializes a table to the JSON document shape accepted by [`parse_json`].
pub fn write_json(table: &Table) -> Vec<u8> {
    let doc = TableDoc {
        caption: table.caption.clone(),
        headers: table.headers.clone(),
        rows: table
            .rows
            .iter()
            .map(|r| r.cells.iter().map(|c| c.raw.clone()).collect())
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("table serializes infallibly");
    bytes.push(b'\n');
    bytes
}

/// Domain of a synthetic fixture table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    Finance,
    Weather,
    Sports,
}

impl Genre {
    pub fn as_str(self) -> &'static str {
        match self {
            Genre::Finance => "finance",
            Genre::Weather => "weather",
            Genre::Sports => "sports",
        }
    }

    /// All genres, in a fixed order.
    pub const ALL: [Genre; 3] = [Genre::Finance, Genre::Weather, Genre::Sports];
}

impl std::fmt::Display for Genre {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finance" => Ok(Genre::Finance),
            "weather" => Ok(Genre::Weather),
            "sports" => Ok(Genre::Sports),
            other => Err(format!(
                "unknown genre {other:?} (expected finance, weather, or sports)"
            )),
        }
    }
}

const FINANCE_METRICS: [&str; 14] = [
    "Revenue",
    "Operating Expenses",
    "Net Income",
    "Gross Profit",
    "EBITDA",
    "Total Assets",
    "Total Liabilities",
    "Cash Reserves",
    "Accounts Receivable",
    "Inventory",
    "Capital Expenditure",
    "Interest Paid",
    "Tax Provision",
    "Dividends Paid",
];

const FINANCE_COMPANIES: [&str; 8] = [
    "Aldertech",
    "Brightline Goods",
    "Cobalt Systems",
    "Dunmore Holdings",
    "Ferrow Industries",
    "Halcyon Foods",
    "Ironvale Group",
    "Juniper Logistics",
];

const WEATHER_DISTRICTS: [&str; 12] = [
    "Northvale",
    "Eastbrook",
    "Lakemount",
    "Redcliff",
    "Stonehaven",
    "Willowford",
    "Greyharbor",
    "Mistvale",
    "Sandmere",
    "Thornfield",
    "Clearwater",
    "Foxglen",
];

const WEATHER_HEADERS: [&str; 10] = [
    "District",
    "Max Temp",
    "Min Temp",
    "Humidity",
    "Wind Speed",
    "Rainfall",
    "Pressure",
    "Cloud Cover",
    "Visibility",
    "UV Index",
];

const SPORTS_TEAMS: [&str; 12] = [
    "Rovers",
    "Strikers",
    "Falcons",
    "Titans",
    "Chargers",
    "Mariners",
    "Wolves",
    "Comets",
    "Raiders",
    "Panthers",
    "Spartans",
    "Hornets",
];

const SPORTS_HEADERS: [&str; 7] = [
    "Team",
    "Matches",
    "Won",
    "Lost",
    "Drawn",
    "Points",
    "Net Run Rate",
];

fn pick_distinct<'a, R: Rng>(rng: &mut R, pool: &[&'a str], k: usize) -> Vec<&'a str> {
    let mut items: Vec<&str> = pool.to_vec();
    items.shuffle(rng);
    items.truncate(k);
    items
}

/// Generates a deterministic synthetic table for the given genre and seed.
///
/// Dimensions (rows x columns): finance 11x5, weather 5x10, sports 9x7.
/// Row subjects are distinct, every non-subject cell is numeric, and the
/// vocabulary deliberately avoids the subjectivity lexicon so that fixture
/// content never counts as subjective on its own.
pub fn synth_fixture(genre: Genre, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(match genre {
        Genre::Finance => 1,
        Genre::Weather => 2,
        Genre::Sports => 3,
    });
    let (caption, headers, rows) = match genre {
        Genre::Finance => {
            let company = FINANCE_COMPANIES[rng.random_range(0..FINANCE_COMPANIES.len())];
            let base_year: u32 = 2016 + rng.random_range(0..6);
            let headers: Vec<String> = std::iter::once("Metric".to_string())
                .chain((0..4).map(|i| (base_year + i).to_string()))
                .collect();
            let metrics = pick_distinct(&mut rng, &FINANCE_METRICS, 11);
            let rows = metrics
                .iter()
                .map(|metric| {
                    let mut row = vec![metric.to_string()];
                    for _ in 0..4 {
                        row.push(format!(
                            "{}.{:02}",
                            rng.random_range(120..98000),
                            rng.random_range(0..100)
                        ));
                    }
                    row
                })
                .collect();
            let caption = format!("Annual financial results reported by {company}");
            (caption, headers, rows)
        }
        Genre::Weather => {
            let headers: Vec<String> = WEATHER_HEADERS.iter().map(|h| h.to_string()).collect();
            let districts = pick_distinct(&mut rng, &WEATHER_DISTRICTS, 5);
            let rows = districts
                .iter()
                .map(|district| {
                    let max_t: i32 = rng.random_range(24..42);
                    let min_t: i32 = rng.random_range(9..max_t.min(24));
                    vec![
                        district.to_string(),
                        max_t.to_string(),
                        min_t.to_string(),
                        rng.random_range(30..96).to_string(),
                        format!("{}.{}", rng.random_range(2..40), rng.random_range(0..10)),
                        format!("{}.{}", rng.random_range(0..25), rng.random_range(0..10)),
                        rng.random_range(988..1026).to_string(),
                        rng.random_range(0..101).to_string(),
                        format!("{}.{}", rng.random_range(2..10), rng.random_range(0..10)),
                        rng.random_range(1..12).to_string(),
                    ]
                })
                .collect();
            let caption = "Daily weather readings across five districts".to_string();
            (caption, headers, rows)
        }
        Genre::Sports => {
            let headers: Vec<String> = SPORTS_HEADERS.iter().map(|h| h.to_string()).collect();
            let teams = pick_distinct(&mut rng, &SPORTS_TEAMS, 9);
            let rows = teams
                .iter()
                .map(|team| {
                    let matches: u32 = 14;
                    let won = rng.random_range(0..=matches);
                    let lost = rng.random_range(0..=(matches - won));
                    let drawn = matches - won - lost;
                    let points = 2 * won + drawn;
                    let sign = if rng.random_bool(0.5) { "-" } else { "" };
                    let nrr = format!(
                        "{sign}{}.{:03}",
                        rng.random_range(0..3),
                        rng.random_range(0..1000)
                    );
                    vec![
                        team.to_string(),
                        matches.to_string(),
                        won.to_string(),
                        lost.to_string(),
                        drawn.to_string(),
                        points.to_string(),
                        nrr,
                    ]
                })
                .collect();
            let caption = "League standings after the regular season".to_string();
            (caption, headers, rows)
        }
    };
    Table::new(Some(caption), headers, rows).expect("synthetic fixtures are always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_csv_basic_numeric_cell() {
        let table = parse_csv(b"Metric,2019\nRevenue,580.60\n").unwrap();
        assert_eq!(table.headers, vec!["Metric", "2019"]);
        assert_eq!(table.row_count(), 1);
        assert_eq!(table.rows[0].subject(), "Revenue");
        match &table.rows[0].cells[1].kind {
            CellKind::Numeric(d) => {
                assert_eq!(d.int_part, "580");
                assert_eq!(d.frac_part, "60");
                assert!(!d.negative);
                assert_eq!(d.to_string(), "580.60");
            }
            CellKind::Text => panic!("580.60 must classify as numeric"),
        }
    }

    #[test]
    fn parse_csv_ragged_row() {
        let err = parse_csv(b"A,B\nx\n").unwrap_err();
        match err {
            TableError::RaggedRow {
                row,
                expected,
                found,
            } => {
                assert_eq!((row, expected, found), (1, 2, 1));
            }
            other => panic!("expected RaggedRow, got {other:?}"),
        }
    }

    #[test]
    fn parse_csv_duplicate_headers() {
        let err = parse_csv(b"A,A\nx,y\n").unwrap_err();
        assert!(matches!(err, TableError::DuplicateHeader { label } if label == "A"));
    }

    #[test]
    fn parse_csv_headers_normalized_for_duplicate_check() {
        let err = parse_csv(b" Net  Income ,Net Income\nx,y\n").unwrap_err();
        assert!(matches!(err, TableError::DuplicateHeader { label } if label == "Net Income"));
    }

    #[test]
    fn parse_csv_quoted_fields_kept_verbatim() {
        let table = parse_csv(b"Item,Note\nWidget,\"a, b\nc\"\n").unwrap();
        assert_eq!(table.rows[0].cells[1].raw, "a, b\nc");
        assert_eq!(table.rows[0].cells[1].kind, CellKind::Text);
    }

    #[test]
    fn parse_csv_rejects_empty_input_and_header_only() {
        assert!(matches!(
            parse_csv(b""),
            Err(TableError::MalformedCsv(_)) | Err(TableError::NoRows)
        ));
        assert!(matches!(parse_csv(b"A,B\n"), Err(TableError::NoRows)));
    }

    #[test]
    fn parse_csv_single_column_rejected() {
        let err = parse_csv(b"A\nx\n").unwrap_err();
        assert!(matches!(err, TableError::InsufficientColumns { found: 1 }));
    }

    #[test]
    fn parse_csv_empty_subject_rejected() {
        let err = parse_csv(b"A,B\n  ,y\n").unwrap_err();
        assert!(matches!(err, TableError::EmptySubject { row: 1 }));
    }

    #[test]
    fn parse_csv_invalid_utf8() {
        let err = parse_csv(b"A,B\n\xff\xfe,y\n").unwrap_err();
        assert!(matches!(err, TableError::MalformedCsv(_)));
    }

    #[test]
    fn parse_json_with_caption() {
        let bytes = br#"{"caption":"Quarterly results","headers":["Metric","Q1"],"rows":[["Revenue","12.5"]]}"#;
        let table = parse_json(bytes).unwrap();
        assert_eq!(table.caption.as_deref(), Some("Quarterly results"));
        assert_eq!(table.headers, vec!["Metric", "Q1"]);
        assert_eq!(table.rows[0].cells[1].raw, "12.5");
    }

    #[test]
    fn parse_json_empty_rows_is_schema_violation() {
        let err = parse_json(br#"{"headers":["A","B"],"rows":[]}"#).unwrap_err();
        assert!(matches!(err, TableError::SchemaViolation(_)));
    }

    #[test]
    fn parse_json_non_string_cell_is_schema_violation() {
        let err = parse_json(br#"{"headers":["A","B"],"rows":[["x",12.5]]}"#).unwrap_err();
        assert!(matches!(err, TableError::SchemaViolation(_)));
    }

    #[test]
    fn parse_json_unknown_field_is_schema_violation() {
        let err =
            parse_json(br#"{"headers":["A","B"],"rows":[["x","y"]],"notes":"hi"}"#).unwrap_err();
        assert!(matches!(err, TableError::SchemaViolation(_)));
    }

    #[test]
    fn parse_json_syntax_error_is_malformed() {
        let err = parse_json(b"{\"headers\": [").unwrap_err();
        assert!(matches!(err, TableError::MalformedJson(_)));
    }

    #[test]
    fn parse_json_duplicate_headers_share_table_validation() {
        let err = parse_json(br#"{"headers":["A","A"],"rows":[["x","y"]]}"#).unwrap_err();
        assert!(matches!(err, TableError::DuplicateHeader { .. }));
    }

    #[test]
    fn header_and_subject_normalization() {
        let table = parse_csv(b" Metric ,  Fiscal  Year \n  Net   Income ,42\n").unwrap();
        assert_eq!(table.headers, vec!["Metric", "Fiscal Year"]);
        assert_eq!(table.rows[0].subject(), "Net Income");
    }

    #[test]
    fn non_subject_cells_verbatim() {
        let table = parse_csv(b"A,B\nx, 42 \n").unwrap();
        assert_eq!(table.rows[0].cells[1].raw, " 42 ");
        assert!(matches!(
            table.rows[0].cells[1].kind,
            CellKind::Numeric(_)
        ));
    }

    #[test]
    fn numeric_classification_edges() {
        for numeric in ["0", "42", "+3.5", "-7", "580.60", "007", " 12 "] {
            assert!(
                ExactDecimal::parse(numeric.trim()).is_some(),
                "{numeric:?} must be numeric"
            );
        }
        for text in ["", "3.", ".5", "1e5", "12,000", "4 2", "--3", "+-1", "NaN"] {
            assert!(
                ExactDecimal::parse(text.trim()).is_none(),
                "{text:?} must be text"
            );
        }
    }

    #[test]
    fn exact_decimal_display_and_value() {
        let d = ExactDecimal::parse("-07.50").unwrap();
        assert_eq!(d.to_string(), "-07.50");
        assert!((d.as_f64() + 7.5).abs() < 1e-12);
        let plus = ExactDecimal::parse("+3.5").unwrap();
        assert_eq!(plus.to_string(), "3.5");
    }

    #[test]
    fn csv_round_trip_preserves_grid() {
        let table = parse_csv(b"Metric,2019,Note\nRevenue,580.60,\"a, b\"\nCosts,123.45,plain\n")
            .unwrap();
        let reparsed = parse_csv(&write_csv(&table)).unwrap();
        assert!(table.grid_eq(&reparsed));
    }

    #[test]
    fn json_round_trip_preserves_caption_and_grid() {
        let bytes = br#"{"caption":"Q","headers":["Metric","Q1"],"rows":[["Revenue","12.5"]]}"#;
        let table = parse_json(bytes).unwrap();
        let reparsed = parse_json(&write_json(&table)).unwrap();
        assert_eq!(table, reparsed);
    }

    #[test]
    fn fixture_dimensions() {
        let cases = [
            (Genre::Finance, 11, 5),
            (Genre::Weather, 5, 10),
            (Genre::Sports, 9, 7),
        ];
        for (genre, rows, cols) in cases {
            let t = synth_fixture(genre, 7);
            assert_eq!((t.row_count(), t.column_count()), (rows, cols), "{genre}");
        }
    }

    #[test]
    fn fixture_deterministic_per_seed() {
        for genre in Genre::ALL {
            assert_eq!(synth_fixture(genre, 42), synth_fixture(genre, 42));
            assert_ne!(
                synth_fixture(genre, 42),
                synth_fixture(genre, 43),
                "different seeds should vary {genre} content"
            );
        }
    }

    #[test]
    fn fixture_subjects_distinct_and_cells_numeric() {
        for genre in Genre::ALL {
            for seed in [0, 1, 99] {
                let t = synth_fixture(genre, seed);
                let mut subjects: Vec<&str> = t.rows.iter().map(|r| r.subject()).collect();
                subjects.sort_unstable();
                subjects.dedup();
                assert_eq!(subjects.len(), t.row_count(), "{genre} seed {seed}");
                for row in &t.rows {
                    for cell in &row.cells[1..] {
                        assert!(
                            matches!(cell.kind, CellKind::Numeric(_)),
                            "{genre} seed {seed}: non-numeric value cell {:?}",
                            cell.raw
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fixture_vocabulary_avoids_subjectivity_lexicon() {
        for genre in Genre::ALL {
            for seed in 0..20 {
                let t = synth_fixture(genre, seed);
                let mut all_text = t.caption.clone().unwrap_or_default();
                all_text.push(' ');
                all_text.push_str(&t.headers.join(" "));
                for row in &t.rows {
                    for cell in &row.cells {
                        all_text.push(' ');
                        all_text.push_str(&cell.raw);
                    }
                }
                let lower = all_text.to_lowercase();
                for term in crate::backend::stub::SUBJECTIVITY_LEXICON {
                    assert!(
                        !lower.contains(term),
                        "{genre} seed {seed} leaks lexicon term {term:?}"
                    );
                }
            }
        }
    }
}
