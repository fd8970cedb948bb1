//! Phonetic and visual similarity between two words.
//!
//! Both default backends are driven by plain-text resource files:
//!
//! * pronouncing lexicon: `word<TAB>phone phone ...`, one pronunciation per
//!   line, repeated lines for alternative pronunciations;
//! * shape table: `char<TAB>char<TAB>similarity`, symmetric, unlisted pairs
//!   take a configurable fallback.
//!
//! Any other backend (glyph rendering, romanization) can be plugged in
//! through [`SimilarityProvider`].

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::lcs::{lcs_len, lcs_ratio};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl ResourceError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ResourceError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn malformed(line: usize, message: impl Into<String>) -> Self {
        ResourceError::Malformed {
            line,
            message: message.into(),
        }
    }
}

/// A word-pair similarity in `[0, 1]`.
pub trait SimilarityProvider<S> {
    fn similarity(&self, a: &str, b: &str) -> S;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhoneticLexicon {
    entries: HashMap<String, Vec<Vec<String>>>,
}

impl PhoneticLexicon {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut entries: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, phones) = line
                .split_once('\t')
                .ok_or_else(|| ResourceError::malformed(i + 1, "expected word<TAB>phones"))?;
            let phones: Vec<String> = phones.split_whitespace().map(String::from).collect();
            if word.trim().is_empty() || phones.is_empty() {
                return Err(ResourceError::malformed(i + 1, "empty word or pronunciation"));
            }
            entries.entry(word.trim().to_lowercase()).or_default().push(phones);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ResourceError> {
        let text = std::fs::read_to_string(path).map_err(|e| ResourceError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn pronunciations(&self, word: &str) -> Option<&[Vec<String>]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Best phone-sequence overlap over all pronunciation pairs; falls back to
/// character overlap of the case-folded words when either is unknown.
pub fn sim_phonetic<S: Scalar>(a: &str, b: &str, lex: &PhoneticLexicon) -> S {
    match (lex.pronunciations(a), lex.pronunciations(b)) {
        (Some(pa), Some(pb)) => pa
            .iter()
            .flat_map(|x| pb.iter().map(move |y| lcs_ratio::<S, String>(x, y)))
            .fold(S::zero(), S::max_of),
        _ => {
            let a: Vec<char> = a.to_lowercase().chars().collect();
            let b: Vec<char> = b.to_lowercase().chars().collect();
            lcs_ratio(&a, &b)
        }
    }
}

impl<S: Scalar> SimilarityProvider<S> for PhoneticLexicon {
    fn similarity(&self, a: &str, b: &str) -> S {
        sim_phonetic(a, b, self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeTable {
    pairs: HashMap<(char, char), f64>,
    fallback: f64,
}

impl Default for ShapeTable {
    fn default() -> Self {
        Self::new(0.0)
    }
}

fn ordered(a: char, b: char) -> (char, char) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ShapeTable {
    pub fn new(fallback: f64) -> Self {
        Self {
            pairs: HashMap::new(),
            fallback,
        }
    }

    pub fn parse(text: &str, fallback: f64) -> Result<Self, ResourceError> {
        if !(0.0..=1.0).contains(&fallback) {
            return Err(ResourceError::malformed(0, "fallback similarity outside [0, 1]"));
        }
        let mut table = Self::new(fallback);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| ResourceError::malformed(i + 1, msg);
            let [a, b, v] = cols.as_slice() else {
                return Err(bad("expected char<TAB>char<TAB>value"));
            };
            let single = |s: &str| {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                }
            };
            let (a, b) = single(a)
                .zip(single(b))
                .ok_or_else(|| bad("pair columns must hold one character each"))?;
            let value: f64 = v.trim().parse().map_err(|_| bad("non-numeric similarity"))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(bad("similarity outside [0, 1]"));
            }
            if a == b && value != 1.0 {
                return Err(bad("identical characters must score 1"));
            }
            if let Some(prev) = table.pairs.insert(ordered(a, b), value) {
                if prev != value {
                    return Err(bad("conflicting values for a pair"));
                }
            }
        }
        Ok(table)
    }

    pub fn load(path: &Path, fallback: f64) -> Result<Self, ResourceError> {
        let text = std::fs::read_to_string(path).map_err(|e| ResourceError::io(path, e))?;
        Self::parse(&text, fallback)
    }

    pub fn insert(&mut self, a: char, b: char, value: f64) {
        self.pairs.insert(ordered(a, b), value);
    }

    pub fn get(&self, a: char, b: char) -> f64 {
        if a == b {
            return 1.0;
        }
        self.pairs.get(&ordered(a, b)).copied().unwrap_or(self.fallback)
    }
}

/// Mean per-position character similarity for equal-length words; for
/// unequal lengths, characters are aligned by LCS and unmatched positions of
/// the longer word score 0.
pub fn sim_shape<S: Scalar>(a: &str, b: &str, tbl: &ShapeTable) -> S {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return S::one();
    }
    if a.len() != b.len() {
        return S::ratio(lcs_len(&a, &b), a.len().max(b.len()));
    }
    if a == b {
        return S::one();
    }
    let sum = a
        .iter()
        .zip(&b)
        .fold(S::zero(), |acc, (&x, &y)| acc + S::from_real(tbl.get(x, y)));
    sum / S::from_count(a.len())
}

impl<S: Scalar> SimilarityProvider<S> for ShapeTable {
    fn similarity(&self, a: &str, b: &str) -> S {
        sim_shape(a, b, self)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("threshold {name} must lie in [0, 1]")]
pub struct ThresholdError {
    pub name: &'static str,
}

/// Phonetic (`alpha1`) and shape (`alpha2`) thresholds. A branch fires when
/// the similarity is strictly greater than its threshold, so values above 1
/// switch the spelling branches off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig<S> {
    pub alpha1: S,
    pub alpha2: S,
}

impl<S: Scalar> Default for ThresholdConfig<S> {
    fn default() -> Self {
        Self {
            alpha1: S::ratio(4, 5),
            alpha2: S::ratio(4, 5),
        }
    }
}

impl<S: Scalar> ThresholdConfig<S> {
    pub fn new(alpha1: S, alpha2: S) -> Self {
        Self { alpha1, alpha2 }
    }

    pub fn validate(&self) -> Result<(), ThresholdError> {
        let in_unit = |x: S| x >= S::zero() && x <= S::one();
        if !in_unit(self.alpha1) {
            return Err(ThresholdError { name: "alpha1" });
        }
        if !in_unit(self.alpha2) {
            return Err(ThresholdError { name: "alpha2" });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    const LEXICON: &str = "their\tDH EH R\nthere\tDH EH R\ncat\tK AE T\ndog\tD AO G\nread\tR IY D\nread\tR EH D\nred\tR EH D\n";

    #[test]
    fn homophones_score_one() {
        let lex = PhoneticLexicon::parse(LEXICON).unwrap();
        assert_eq!(sim_phonetic::<f64>("their", "there", &lex), 1.0);
        assert_eq!(sim_phonetic::<f64>("Their", "THERE", &lex), 1.0);
        assert_eq!(sim_phonetic::<f64>("cat", "dog", &lex), 0.0);
        assert_eq!(sim_phonetic::<f64>("red", "read", &lex), 1.0);
        assert_eq!(sim_phonetic::<f64>("word", "word", &lex), 1.0);
    }

    #[test]
    fn unknown_words_fall_back_to_characters() {
        let lex = PhoneticLexicon::default();
        let s: Rational64 = sim_phonetic("Cats", "cat", &lex);
        assert_eq!(s, Rational64::new(6, 7));
    }

    #[test]
    fn lexicon_errors() {
        assert!(matches!(
            PhoneticLexicon::parse("ok\tA\nbroken line\n"),
            Err(ResourceError::Malformed { line: 2, .. })
        ));
        assert!(PhoneticLexicon::parse("w\t  \n").is_err());
    }

    #[test]
    fn shape_examples() {
        let mut tbl = ShapeTable::new(0.0);
        assert_eq!(sim_shape::<f64>("clear", "clear", &tbl), 1.0);
        let s: f64 = sim_shape("rnain", "main", &tbl);
        assert!((0.0..1.0).contains(&s));
        assert_eq!(s, 0.6);
        tbl.insert('l', '1', 0.9);
        assert_eq!(sim_shape::<f64>("l", "1", &tbl), 0.9);
        assert_eq!(sim_shape::<f64>("1", "l", &tbl), 0.9);
        let r: Rational64 = sim_shape("c1ear", "clear", &ShapeTable::parse("l\t1\t0.5\n", 0.0).unwrap());
        assert_eq!(r, Rational64::new(9, 10));
    }

    #[test]
    fn shape_table_errors() {
        assert!(ShapeTable::parse("a\tb\n", 0.0).is_err());
        assert!(ShapeTable::parse("ab\tc\t0.5\n", 0.0).is_err());
        assert!(ShapeTable::parse("a\tb\t1.5\n", 0.0).is_err());
        assert!(ShapeTable::parse("a\ta\t0.5\n", 0.0).is_err());
        assert!(ShapeTable::parse("a\tb\t0.5\nb\ta\t0.4\n", 0.0).is_err());
        assert!(ShapeTable::parse("", 1.5).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(ThresholdConfig::<f64>::default(), ThresholdConfig::new(0.8, 0.8));
        assert!(ThresholdConfig::new(1.1, 0.5).validate().is_err());
        assert!(ThresholdConfig::new(0.5, -0.1).validate().is_err());
    }

    fn table() -> ShapeTable {
        ShapeTable::parse("l\t1\t0.9\nO\t0\t0.95\nm\tn\t0.4\n", 0.1).unwrap()
    }

    proptest! {
        #[test]
        fn similarities_symmetric_and_bounded(a in "[a-zA-Z01]{0,6}", b in "[a-zA-Z01]{0,6}") {
            let lex = PhoneticLexicon::parse(LEXICON).unwrap();
            let tbl = table();
            for (x, y) in [
                (sim_phonetic::<f64>(&a, &b, &lex), sim_phonetic::<f64>(&b, &a, &lex)),
                (sim_shape::<f64>(&a, &b, &tbl), sim_shape::<f64>(&b, &a, &tbl)),
            ] {
                prop_assert_eq!(x, y);
                prop_assert!((0.0..=1.0).contains(&x));
            }
            prop_assert_eq!(sim_phonetic::<f64>(&a, &a, &lex), 1.0);
            prop_assert_eq!(sim_shape::<f64>(&a, &a, &tbl), 1.0);
        }

        #[test]
        fn phonetic_ignores_case(a in "[a-zA-Z]{1,6}", b in "[a-zA-Z]{1,6}") {
            let lex = PhoneticLexicon::parse(LEXICON).unwrap();
            prop_assert_eq!(
                sim_phonetic::<f64>(&a, &b, &lex),
                sim_phonetic::<f64>(&a.to_uppercase(), &b.to_lowercase(), &lex)
            );
        }
    }
}
