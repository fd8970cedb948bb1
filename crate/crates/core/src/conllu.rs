//! CoNLL-U reader and writer.
//!
//! This is the only place linguistic annotation enters the toolkit; nothing
//! here runs a tagger. XPOS, DEPS and MISC are carried through untouched.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

/// The 17 universal part-of-speech tags.
pub const UNIVERSAL_UPOS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: malformed token id {id:?}")]
    BadId { line: usize, id: String },
    #[error("line {line}: empty nodes are not supported (id {id:?})")]
    EmptyNode { line: usize, id: String },
    #[error("line {line}: duplicate token id {id}")]
    DuplicateId { line: usize, id: usize },
    #[error("line {line}: token id {found} out of sequence, expected {expected}")]
    OutOfSequence { line: usize, found: usize, expected: usize },
    #[error("line {line}: form {form:?} is empty or contains whitespace")]
    BadForm { line: usize, form: String },
    #[error("line {line}: unknown UPOS tag {tag:?}")]
    UnknownUpos { line: usize, tag: String },
    #[error("line {line}: malformed FEATS column {feats:?}")]
    BadFeats { line: usize, feats: String },
    #[error("line {line}: head {head:?} does not point into the sentence")]
    BadHead { line: usize, head: String },
    #[error("line {line}: duplicate sent_id {id:?}")]
    DuplicateSentId { line: usize, id: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("sentence count mismatch {orig}\u{2260}{corr}")]
pub struct PairingError {
    pub orig: usize,
    pub corr: usize,
}

/// Closed UPOS inventory: the universal tags plus profile extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    tags: BTreeSet<String>,
}

impl Default for TagSet {
    fn default() -> Self {
        Self {
            tags: UNIVERSAL_UPOS.iter().map(|t| t.to_string()).collect(),
        }
    }
}

impl TagSet {
    pub fn with_extensions<I, T>(extensions: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut set = Self::default();
        set.tags.extend(extensions.into_iter().map(Into::into));
        set
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Root,
    /// 0-based index of the governing token.
    Index(usize),
}

/// Ordered `key=value` morphological features as written in the FEATS column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Features(Vec<(String, String)>);

impl Features {
    pub fn parse(column: &str) -> Option<Self> {
        if column == "_" {
            return Some(Self::default());
        }
        column
            .split('|')
            .map(|kv| {
                let (k, v) = kv.split_once('=')?;
                (!k.is_empty() && !v.is_empty()).then(|| (k.to_string(), v.to_string()))
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Self(pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Keys whose values differ between the two sets (absent counts as a value).
    pub fn differing_keys<'a>(&'a self, other: &'a Features) -> BTreeSet<&'a str> {
        self.iter()
            .chain(other.iter())
            .map(|(k, _)| k)
            .filter(|k| self.get(k) != other.get(k))
            .collect()
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Features,
    pub head: Head,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// A token with only the fields the classifier reads; the rest are `_`.
    pub fn new(form: &str, lemma: &str, upos: &str) -> Self {
        Self {
            form: form.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            xpos: "_".to_string(),
            feats: Features::default(),
            head: Head::Root,
            deprel: "_".to_string(),
            deps: "_".to_string(),
            misc: "_".to_string(),
        }
    }

    pub fn with_feats(mut self, feats: Features) -> Self {
        self.feats = feats;
        self
    }

    pub fn with_deprel(mut self, deprel: &str) -> Self {
        self.deprel = deprel.to_string();
        self
    }

    pub fn with_head(mut self, head: Head) -> Self {
        self.head = head;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    /// Comment lines without the leading `#`, in file order.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(sent_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        Self {
            sent_id: sent_id.into(),
            comments: Vec::new(),
            tokens,
        }
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Parses a CoNLL-U document using the universal tag inventory.
pub fn parse_conllu(text: &str) -> Result<Vec<Sentence>, ConlluError> {
    parse_conllu_with(text, &TagSet::default())
}

pub fn parse_conllu_with(text: &str, tags: &TagSet) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut block = Block::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            block.finish(&mut sentences, &mut seen_ids)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim_start();
            if let Some(id) = comment.strip_prefix("sent_id") {
                if let Some(id) = id.trim_start().strip_prefix('=') {
                    block.sent_id = Some((id.trim().to_string(), line_no));
                }
            }
            block.comments.push(comment.to_string());
            continue;
        }
        block.push_row(line, line_no, tags)?;
    }
    block.finish(&mut sentences, &mut seen_ids)?;
    Ok(sentences)
}

#[derive(Default)]
struct Block {
    sent_id: Option<(String, usize)>,
    comments: Vec<String>,
    tokens: Vec<Token>,
    // raw head column and line number, resolved once the sentence is complete
    heads: Vec<(String, usize)>,
    first_line: usize,
}

impl Block {
    fn push_row(&mut self, line: &str, line_no: usize, tags: &TagSet) -> Result<(), ConlluError> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if self.first_line == 0 {
            self.first_line = line_no;
        }
        let id = cols[0];
        if id.contains('-') {
            let ok = id
                .split_once('-')
                .map(|(a, b)| a.parse::<usize>().is_ok() && b.parse::<usize>().is_ok())
                .unwrap_or(false);
            if !ok {
                return Err(ConlluError::BadId {
                    line: line_no,
                    id: id.to_string(),
                });
            }
            return Ok(());
        }
        if id.contains('.') {
            return Err(ConlluError::EmptyNode {
                line: line_no,
                id: id.to_string(),
            });
        }
        let n: usize = id.parse().map_err(|_| ConlluError::BadId {
            line: line_no,
            id: id.to_string(),
        })?;
        let expected = self.tokens.len() + 1;
        if n != expected {
            if n >= 1 && n < expected {
                return Err(ConlluError::DuplicateId { line: line_no, id: n });
            }
            return Err(ConlluError::OutOfSequence {
                line: line_no,
                found: n,
                expected,
            });
        }

        let form = cols[1];
        if form.is_empty() || form.chars().any(char::is_whitespace) {
            return Err(ConlluError::BadForm {
                line: line_no,
                form: form.to_string(),
            });
        }
        if !tags.contains(cols[3]) {
            return Err(ConlluError::UnknownUpos {
                line: line_no,
                tag: cols[3].to_string(),
            });
        }
        let feats = Features::parse(cols[5]).ok_or_else(|| ConlluError::BadFeats {
            line: line_no,
            feats: cols[5].to_string(),
        })?;

        self.tokens.push(Token {
            form: form.to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats,
            head: Head::Root,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
        self.heads.push((cols[6].to_string(), line_no));
        Ok(())
    }

    fn finish(
        &mut self,
        out: &mut Vec<Sentence>,
        seen_ids: &mut HashSet<String>,
    ) -> Result<(), ConlluError> {
        let block = std::mem::take(self);
        if block.tokens.is_empty() {
            return Ok(());
        }
        let mut tokens = block.tokens;
        let len = tokens.len();
        for (token, (head, line)) in tokens.iter_mut().zip(block.heads) {
            token.head = match head.parse::<usize>() {
                Ok(0) => Head::Root,
                Ok(h) if h <= len => Head::Index(h - 1),
                _ => return Err(ConlluError::BadHead { line, head }),
            };
        }
        let (sent_id, id_line) = block
            .sent_id
            .unwrap_or_else(|| ((out.len() + 1).to_string(), block.first_line));
        if !seen_ids.insert(sent_id.clone()) {
            return Err(ConlluError::DuplicateSentId {
                line: id_line,
                id: sent_id,
            });
        }
        out.push(Sentence {
            sent_id,
            comments: block.comments,
            tokens,
        });
        Ok(())
    }
}

/// Serializes sentences back to CoNLL-U.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for comment in &sentence.comments {
            let _ = writeln!(out, "# {comment}");
        }
        for (i, t) in sentence.tokens.iter().enumerate() {
            let head = match t.head {
                Head::Root => 0,
                Head::Index(h) => h + 1,
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                t.form,
                t.lemma,
                t.upos,
                t.xpos,
                t.feats,
                head,
                t.deprel,
                t.deps,
                t.misc
            );
        }
        out.push('\n');
    }
    out
}

/// Pairs original and corrected sentences by position.
pub fn sentence_pairs<'a>(
    orig: &'a [Sentence],
    corr: &'a [Sentence],
) -> Result<Vec<(&'a Sentence, &'a Sentence)>, PairingError> {
    if orig.len() != corr.len() {
        return Err(PairingError {
            orig: orig.len(),
            corr: corr.len(),
        });
    }
    Ok(orig.iter().zip(corr).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_TOKENS: &str = "# sent_id = s1\n# text = This is\n\
        1\tThis\tthis\tPRON\tDT\tNumber=Sing|PronType=Dem\t0\troot\t_\t_\n\
        2\tis\tbe\tAUX\tVBZ\tMood=Ind|Number=Sing\t1\tcop\t_\tSpaceAfter=No\n\n";

    #[test]
    fn minimal_sentence() {
        let s = parse_conllu(TWO_TOKENS).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].sent_id, "s1");
        assert_eq!(s[0].forms(), vec!["This", "is"]);
        assert_eq!(s[0].tokens[1].head, Head::Index(0));
        assert_eq!(s[0].tokens[1].feats.get("Number"), Some("Sing"));
        assert_eq!(s[0].comments, vec!["sent_id = s1", "text = This is"]);
    }

    #[test]
    fn empty_input() {
        assert!(parse_conllu("").unwrap().is_empty());
        assert!(parse_conllu("\n\n").unwrap().is_empty());
    }

    #[test]
    fn nine_columns_rejected_at_line() {
        let mut lines: Vec<String> = TWO_TOKENS.lines().map(String::from).collect();
        let cols: Vec<&str> = lines[3].split('\t').collect();
        let shortened = [&cols[..4], &cols[5..]].concat().join("\t");
        lines[3] = shortened;
        let text = lines.join("\n");
        assert_eq!(
            parse_conllu(&text),
            Err(ConlluError::ColumnCount { line: 4, found: 9 })
        );
    }

    #[test]
    fn multiword_ranges_skipped() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
            1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n\
            2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n";
        let s = parse_conllu(text).unwrap();
        assert_eq!(s[0].forms(), vec!["do", "n't"]);
        assert_eq!(s[0].sent_id, "1");
    }

    #[test]
    fn row_errors() {
        let row = |id: &str, upos: &str, head: &str| format!("{id}\tx\tx\t{upos}\t_\t_\t{head}\tdep\t_\t_\n");
        let dup = format!("{}{}", row("1", "X", "0"), row("1", "X", "0"));
        assert_eq!(parse_conllu(&dup), Err(ConlluError::DuplicateId { line: 2, id: 1 }));
        assert!(matches!(parse_conllu(&row("a", "X", "0")), Err(ConlluError::BadId { line: 1, .. })));
        assert!(matches!(parse_conllu(&row("1.1", "X", "0")), Err(ConlluError::EmptyNode { .. })));
        assert!(matches!(parse_conllu(&row("2", "X", "0")), Err(ConlluError::OutOfSequence { .. })));
        assert!(matches!(parse_conllu(&row("1", "HON", "0")), Err(ConlluError::UnknownUpos { .. })));
        assert!(matches!(parse_conllu(&row("1", "X", "5")), Err(ConlluError::BadHead { .. })));
        assert!(matches!(parse_conllu(&row("1", "X", "_")), Err(ConlluError::BadHead { .. })));
        let bad_feats = "1\tx\tx\tX\t_\tNumber\t0\troot\t_\t_\n";
        assert!(matches!(parse_conllu(bad_feats), Err(ConlluError::BadFeats { .. })));
    }

    #[test]
    fn extension_tags_admitted() {
        let text = "1\t시\t시\tHON\t_\t_\t0\troot\t_\t_\n";
        assert!(parse_conllu(text).is_err());
        let tags = TagSet::with_extensions(["HON"]);
        assert_eq!(parse_conllu_with(text, &tags).unwrap()[0].tokens[0].upos, "HON");
    }

    #[test]
    fn duplicate_sent_id() {
        let text = "# sent_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\n\
            # sent_id = a\n1\ty\ty\tX\t_\t_\t0\troot\t_\t_\n";
        assert_eq!(
            parse_conllu(text),
            Err(ConlluError::DuplicateSentId { line: 4, id: "a".into() })
        );
    }

    #[test]
    fn round_trip() {
        let s = parse_conllu(TWO_TOKENS).unwrap();
        assert_eq!(write_conllu(&s), TWO_TOKENS);
    }

    #[test]
    fn pairing() {
        let s = |id: &str| Sentence::new(id, vec![Token::new("x", "x", "X")]);
        let three = vec![s("a"), s("b"), s("c")];
        assert_eq!(sentence_pairs(&three, &three).unwrap().len(), 3);
        let err = sentence_pairs(&three, &three[..2]).unwrap_err();
        assert_eq!(err.to_string(), "sentence count mismatch 3\u{2260}2");
        assert!(sentence_pairs(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn differing_keys() {
        let a = Features::parse("Mood=Ind|Tense=Pres").unwrap();
        let b = Features::parse("Mood=Ind|Number=Sing|Person=3|Tense=Pres").unwrap();
        let keys: Vec<_> = a.differing_keys(&b).into_iter().collect();
        assert_eq!(keys, vec!["Number", "Person"]);
    }
}
