//! Small text helpers shared across modules.

/// Trims leading/trailing whitespace and collapses every internal run of
/// whitespace to a single ASCII space.
pub(crate) fn normalize_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for (i, word) in s.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
