//! METEOR: unigram alignment with exact and stem matches, an F-mean biased
//! toward recall, and a fragmentation penalty.

use rustc_hash::FxHashMap;

use super::stem::stem;
use super::{MetricsError, TokenSeq};

const BEAM_WIDTH: usize = 128;

/// References up to this many tokens track used positions in a fixed-size
/// inline bitset; longer ones fall back to a heap-allocated one.
const INLINE_BITS: usize = 256;

/// METEOR for one candidate/reference pair, on a 0–100 scale.
///
/// Tokens are aligned one-to-one, preferring (in order) the most exact
/// matches, the most total matches (exact + Porter-stem), and the most
/// contiguous alignment. With `m` matches, `P = m/|candidate|`,
/// `R = m/|reference|`:
///
/// ```text
/// Fmean   = 10·P·R / (R + 9·P)
/// penalty = 0.5 · (chunks / m)³
/// score   = 100 · Fmean · (1 − penalty)
/// ```
///
/// where `chunks` is the number of maximal match runs that are contiguous in
/// both sequences. No matches at all scores 0.
pub fn meteor(candidate: &TokenSeq, reference: &TokenSeq) -> Result<f64, MetricsError> {
    if candidate.is_empty() {
        return Err(MetricsError::EmptyCandidate { index: 0 });
    }
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference { index: 0 });
    }
    let (m, chunks) = align(candidate.tokens(), reference.tokens());
    if m == 0 {
        return Ok(0.0);
    }
    let m = m as f64;
    let precision = m / candidate.len() as f64;
    let recall = m / reference.len() as f64;
    let fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks as f64 / m).powi(3);
    Ok(100.0 * fmean * (1.0 - penalty))
}

/// Mean per-pair METEOR over a corpus, on a 0–100 scale.
pub fn meteor_corpus(
    candidates: &[TokenSeq],
    references: &[TokenSeq],
) -> Result<f64, MetricsError> {
    super::check_pairs(candidates, references)?;
    let mut sum = 0.0;
    for (i, (cand, reference)) in candidates.iter().zip(references).enumerate() {
        sum += meteor(cand, reference).map_err(|e| e.at_index(i))?;
    }
    Ok(sum / candidates.len() as f64)
}

/// Bitset over reference positions. `Ord` must order sets the way the
/// equivalent `Vec<u64>` would, because it takes part in tie-breaking.
trait UsedSet: Clone + Eq + std::hash::Hash + Ord {
    fn empty(words: usize) -> Self;
    fn contains(&self, bit: usize) -> bool;
    fn insert(&mut self, bit: usize);
}

/// Fixed-size bitset: cloning is a memcpy, so the beam search allocates
/// nothing per successor state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct InlineSet([u64; INLINE_BITS / 64]);

impl UsedSet for InlineSet {
    fn empty(_words: usize) -> Self {
        InlineSet([0; INLINE_BITS / 64])
    }
    fn contains(&self, bit: usize) -> bool {
        self.0[bit / 64] >> (bit % 64) & 1 == 1
    }
    fn insert(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct HeapSet(Vec<u64>);

impl UsedSet for HeapSet {
    fn empty(words: usize) -> Self {
        HeapSet(vec![0; words])
    }
    fn contains(&self, bit: usize) -> bool {
        self.0[bit / 64] >> (bit % 64) & 1 == 1
    }
    fn insert(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }
}

struct State<S> {
    /// Bitset over reference positions already matched.
    used: S,
    /// Candidate/reference position of the most recent match.
    last: Option<(u32, u32)>,
    /// (exact, total, adjacent) counts — the lexicographic objective.
    counts: Counts,
}

/// (exact, total, adjacent) match counts, compared lexicographically.
type Counts = (u32, u32, u32);
/// Beam dedup key: (used-reference bitset, last match position).
type BeamKey<S> = (S, Option<(u32, u32)>);

/// Aligns candidate tokens to reference tokens one-to-one and returns
/// `(matches, chunks)`.
fn align(candidate: &[String], reference: &[String]) -> (u32, u32) {
    if reference.len() <= INLINE_BITS {
        align_beam::<InlineSet>(candidate, reference)
    } else {
        align_beam::<HeapSet>(candidate, reference)
    }
}

/// Beam search over candidate positions in order; each step either skips the
/// position or matches it to an unused reference position (exact matches
/// and stem matches are both explored). States are ranked by the
/// lexicographic objective and deduplicated on (used set, last match), so
/// small inputs are solved exactly and ties resolve deterministically.
fn align_beam<S: UsedSet>(candidate: &[String], reference: &[String]) -> (u32, u32) {
    let ref_stems: Vec<String> = reference.iter().map(|t| stem(t)).collect();
    let words = reference.len().div_ceil(64);
    // Reference positions matching each distinct candidate token, computed
    // once per token rather than once per occurrence.
    let mut match_lists: FxHashMap<&String, Vec<(u32, bool)>> = FxHashMap::default();
    let mut beam = vec![State {
        used: S::empty(words),
        last: None,
        counts: (0, 0, 0),
    }];
    // Successor states per position, reused to keep its table allocated.
    let mut next: FxHashMap<BeamKey<S>, Counts> = FxHashMap::default();
    for (i, token) in candidate.iter().enumerate() {
        let matches = match_lists.entry(token).or_insert_with(|| {
            let cand_stem = stem(token);
            let mut found = Vec::new();
            for (j, ref_token) in reference.iter().enumerate() {
                if ref_token == token {
                    found.push((j as u32, true));
                } else if ref_stems[j] == cand_stem {
                    found.push((j as u32, false));
                }
            }
            found
        });
        if matches.is_empty() {
            // Skipping is the only successor of every state: beam unchanged.
            continue;
        }
        next.reserve(beam.len() * (matches.len() + 1));
        let mut offer = |used: S, last: Option<(u32, u32)>, counts: Counts| match next
            .entry((used, last))
        {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                if counts > *e.get() {
                    e.insert(counts);
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(counts);
            }
        };
        for st in &beam {
            offer(st.used.clone(), st.last, st.counts);
            for &(j, is_exact) in matches.iter() {
                if st.used.contains(j as usize) {
                    continue;
                }
                let mut used = st.used.clone();
                used.insert(j as usize);
                let adjacent = matches!(st.last, Some((pi, pj))
                    if pi + 1 == i as u32 && pj + 1 == j);
                let counts = (
                    st.counts.0 + u32::from(is_exact),
                    st.counts.1 + 1,
                    st.counts.2 + u32::from(adjacent),
                );
                offer(used, Some((i as u32, j)), counts);
            }
        }
        let mut states: Vec<State<S>> = next
            .drain()
            .map(|((used, last), counts)| State { used, last, counts })
            .collect();
        let rank = |a: &State<S>, b: &State<S>| {
            b.counts
                .cmp(&a.counts)
                .then_with(|| a.used.cmp(&b.used))
                .then_with(|| a.last.cmp(&b.last))
        };
        // Only membership in the beam matters downstream, not its order, so
        // a partial selection retains exactly the states a full sort would.
        if states.len() > BEAM_WIDTH {
            states.select_nth_unstable_by(BEAM_WIDTH - 1, rank);
            states.truncate(BEAM_WIDTH);
        }
        beam = states;
    }
    let best = beam
        .iter()
        .map(|st| st.counts)
        .max()
        .unwrap_or((0, 0, 0));
    let (_, total, adjacent) = best;
    (total, total - adjacent)
}
