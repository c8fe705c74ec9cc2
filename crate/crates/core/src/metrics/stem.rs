//! Porter stemmer (the classic 1980 suffix-stripping algorithm).
//!
//! Implements the original five-step definition: measure-based conditions
//! over the [C](VC)^m[V] word form, longest-suffix matching within each
//! step, and the cvc/double-consonant special cases. Words shorter than
//! three letters and tokens containing anything but ASCII letters are
//! returned unchanged.

/// Stems one word. Input is lowercased first; the result is lowercase.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    if lower.len() < 3 || !lower.bytes().all(|b| b.is_ascii_lowercase()) {
        return lower;
    }
    let mut s = Stemmer {
        b: lower.into_bytes(),
    };
    s.step1a();
    s.step1b();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    String::from_utf8(s.b).expect("stemmer only manipulates ASCII")
}

struct Stemmer {
    b: Vec<u8>,
}

impl Stemmer {
    fn len(&self) -> usize {
        self.b.len()
    }

    /// Is the letter at `i` a consonant? `y` counts as a consonant at the
    /// start of the word or after a vowel.
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// The measure m of the prefix `b[..n]`: the number of VC sequences in
    /// its [C](VC)^m[V] decomposition.
    fn measure(&self, n: usize) -> usize {
        let mut i = 0;
        while i < n && self.cons(i) {
            i += 1;
        }
        let mut m = 0;
        loop {
            while i < n && !self.cons(i) {
                i += 1;
            }
            if i == n {
                return m;
            }
            while i < n && self.cons(i) {
                i += 1;
            }
            m += 1;
            if i == n {
                return m;
            }
        }
    }

    /// Does the prefix `b[..n]` contain a vowel?
    fn has_vowel(&self, n: usize) -> bool {
        (0..n).any(|i| !self.cons(i))
    }

    /// Does the prefix `b[..n]` end in a double consonant?
    fn double_cons(&self, n: usize) -> bool {
        n >= 2 && self.b[n - 1] == self.b[n - 2] && self.cons(n - 1)
    }

    /// Does the prefix `b[..n]` end consonant-vowel-consonant, where the
    /// final consonant is not `w`, `x`, or `y`?
    fn cvc(&self, n: usize) -> bool {
        if n < 3 || !self.cons(n - 1) || self.cons(n - 2) || !self.cons(n - 3) {
            return false;
        }
        !matches!(self.b[n - 1], b'w' | b'x' | b'y')
    }

    fn ends(&self, suffix: &str) -> bool {
        self.b.ends_with(suffix.as_bytes())
    }

    /// Replaces the final `suffix_len` bytes with `replacement`.
    fn set_suffix(&mut self, suffix_len: usize, replacement: &str) {
        let keep = self.len() - suffix_len;
        self.b.truncate(keep);
        self.b.extend_from_slice(replacement.as_bytes());
    }

    /// Applies the first matching rule whose stem measure exceeds
    /// `min_measure`; a matching suffix whose condition fails ends the step.
    fn rules(&mut self, rules: &[(&str, &str)], min_measure: usize) {
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                let stem_len = self.len() - suffix.len();
                if self.measure(stem_len) > min_measure {
                    self.set_suffix(suffix.len(), replacement);
                }
                return;
            }
        }
    }

    // caresses -> caress, ponies -> poni, caress -> caress, cats -> cat
    fn step1a(&mut self) {
        if self.ends("sses") {
            self.set_suffix(2, "");
        } else if self.ends("ies") {
            self.set_suffix(3, "i");
        } else if !self.ends("ss") && self.ends("s") {
            self.set_suffix(1, "");
        }
    }

    // agreed -> agree, plastered -> plaster, motoring -> motor, hopping -> hop
    fn step1b(&mut self) {
        if self.ends("eed") {
            if self.measure(self.len() - 3) > 0 {
                self.set_suffix(1, "");
            }
            return;
        }
        let stem_len = if self.ends("ed") && self.has_vowel(self.len() - 2) {
            self.len() - 2
        } else if self.ends("ing") && self.has_vowel(self.len() - 3) {
            self.len() - 3
        } else {
            return;
        };
        self.b.truncate(stem_len);
        if self.ends("at") || self.ends("bl") || self.ends("iz") {
            self.b.push(b'e');
        } else if self.double_cons(self.len()) && !matches!(self.b[self.len() - 1], b'l' | b's' | b'z')
        {
            self.b.pop();
        } else if self.measure(self.len()) == 1 && self.cvc(self.len()) {
            self.b.push(b'e');
        }
    }

    // happy -> happi, sky -> sky
    fn step1c(&mut self) {
        if self.ends("y") && self.has_vowel(self.len() - 1) {
            let last = self.len() - 1;
            self.b[last] = b'i';
        }
    }

    fn step2(&mut self) {
        self.rules(
            &[
                ("ational", "ate"),
                ("ization", "ize"),
                ("iveness", "ive"),
                ("fulness", "ful"),
                ("ousness", "ous"),
                ("tional", "tion"),
                ("biliti", "ble"),
                ("ation", "ate"),
                ("alism", "al"),
                ("aliti", "al"),
                ("iviti", "ive"),
                ("entli", "ent"),
                ("ousli", "ous"),
                ("enci", "ence"),
                ("anci", "ance"),
                ("izer", "ize"),
                ("abli", "able"),
                ("alli", "al"),
                ("ator", "ate"),
                ("eli", "e"),
            ],
            0,
        );
    }

    fn step3(&mut self) {
        self.rules(
            &[
                ("icate", "ic"),
                ("ative", ""),
                ("alize", "al"),
                ("iciti", "ic"),
                ("ical", "ic"),
                ("ful", ""),
                ("ness", ""),
            ],
            0,
        );
    }

    fn step4(&mut self) {
        // `ion` additionally requires the stem to end in `s` or `t`.
        for (suffix, needs_st) in [
            ("ement", false),
            ("ance", false),
            ("ence", false),
            ("able", false),
            ("ible", false),
            ("ment", false),
            ("ent", false),
            ("ant", false),
            ("ion", true),
            ("ism", false),
            ("ate", false),
            ("iti", false),
            ("ous", false),
            ("ive", false),
            ("ize", false),
            ("al", false),
            ("er", false),
            ("ic", false),
            ("ou", false),
        ] {
            if self.ends(suffix) {
                let stem_len = self.len() - suffix.len();
                let st_ok = !needs_st
                    || (stem_len > 0 && matches!(self.b[stem_len - 1], b's' | b't'));
                if st_ok && self.measure(stem_len) > 1 {
                    self.set_suffix(suffix.len(), "");
                }
                return;
            }
        }
    }

    // probate -> probat, rate -> rate, controll -> control
    fn step5(&mut self) {
        if self.ends("e") {
            let stem_len = self.len() - 1;
            let m = self.measure(stem_len);
            if m > 1 || (m == 1 && !self.cvc(stem_len)) {
                self.b.pop();
            }
        }
        if self.b.last() == Some(&b'l') && self.double_cons(self.len()) && self.measure(self.len()) > 1
        {
            self.b.pop();
        }
    }
}
