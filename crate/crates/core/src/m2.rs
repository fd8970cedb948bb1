//! M2 annotation files: an `S` line with the tokenized source, then one `A`
//! line per edit.
//!
//! ```text
//! S This are a sentence .
//! A 1 2|||R:VERB:SVA|||is|||REQUIRED|||-NONE-|||0
//! A 3 3|||M:ADJ|||good|||REQUIRED|||-NONE-|||0
//! ```
//!
//! Output always uses the `REQUIRED|||-NONE-` flag fields; the older
//! `-REQUIRED-|||NONE` spelling is accepted on input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::edit::{Edit, Operation};
use crate::typology::{ErrorType, TRANSITION_ARROW};

pub const NOOP_TYPE: &str = "noop";
const FIELD_SEP: &str = "|||";
const NONE: &str = "-NONE-";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum M2Error {
    #[error("line {line}: annotation before any S line")]
    OrphanAnnotation { line: usize },
    #[error("line {line}: expected 6 '|||'-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: malformed span {text:?}")]
    BadSpan { line: usize, text: String },
    #[error("line {line}: span {start}..{end} exceeds sentence length {len}")]
    SpanOutOfRange { line: usize, start: usize, end: usize, len: usize },
    #[error("line {line}: malformed annotator id {text:?}")]
    BadAnnotator { line: usize, text: String },
    #[error("line {line}: unrecognised line")]
    BadLine { line: usize },
    #[error("edit {index} starts before the previous edit")]
    Unsorted { index: usize },
    #[error("edit {index} overlaps the previous edit")]
    Overlap { index: usize },
    #[error("edit {index} span {start}..{end} exceeds sentence length {len}")]
    EditOutOfRange { index: usize, start: usize, end: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    /// Token span in the source; `None` marks a noop.
    pub span: Option<(usize, usize)>,
    pub type_string: String,
    /// Space-joined correction; empty for deletions and noops.
    pub correction: String,
    pub required: bool,
    pub comment: Option<String>,
    pub annotator: u32,
}

impl Annotation {
    pub fn new(start: usize, end: usize, type_string: &str, correction: &str, annotator: u32) -> Self {
        Self {
            span: Some((start, end)),
            type_string: canonical_type(type_string),
            correction: correction.to_string(),
            required: true,
            comment: None,
            annotator,
        }
    }

    pub fn noop(annotator: u32) -> Self {
        Self {
            span: None,
            type_string: NOOP_TYPE.to_string(),
            correction: String::new(),
            required: true,
            comment: None,
            annotator,
        }
    }

    pub fn is_noop(&self) -> bool {
        self.span.is_none()
    }

    /// Operation code from the type prefix (`M`, `R`, `U`), if it has one.
    pub fn operation(&self) -> Option<Operation> {
        self.type_string.split(':').next().and_then(Operation::from_code)
    }

    /// Type with the operation prefix removed; foreign types pass through.
    pub fn category(&self) -> &str {
        match self.type_string.split_once(':') {
            Some((op, rest)) if Operation::from_code(op).is_some() => rest,
            _ => &self.type_string,
        }
    }

    fn render(&self, out: &mut String) {
        let (span, correction) = match self.span {
            Some((s, e)) => (format!("{s} {e}"), self.correction.as_str()),
            None => ("-1 -1".to_string(), NONE),
        };
        let required = if self.required { "REQUIRED" } else { "OPTIONAL" };
        let comment = self.comment.as_deref().unwrap_or(NONE);
        let _ = writeln!(
            out,
            "A {span}{FIELD_SEP}{}{FIELD_SEP}{correction}{FIELD_SEP}{required}{FIELD_SEP}{comment}{FIELD_SEP}{}",
            self.type_string, self.annotator
        );
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct M2Entry {
    pub source_tokens: Vec<String>,
    pub annotations: Vec<Annotation>,
}

impl M2Entry {
    pub fn new<T: AsRef<str>>(tokens: &[T]) -> Self {
        Self {
            source_tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            annotations: Vec::new(),
        }
    }

    pub fn source_line(&self) -> String {
        format!("S {}", self.source_tokens.join(" "))
    }

    /// Distinct annotator ids in ascending order.
    pub fn annotators(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.annotations.iter().map(|a| a.annotator).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Non-noop annotations of one annotator.
    pub fn edits_of(&self, annotator: u32) -> Vec<&Annotation> {
        self.annotations
            .iter()
            .filter(|a| a.annotator == annotator && !a.is_noop())
            .collect()
    }

    /// The block text, terminated by a newline (no trailing blank line).
    pub fn to_block(&self) -> String {
        let mut out = self.source_line();
        out.push('\n');
        for a in &self.annotations {
            a.render(&mut out);
        }
        out
    }
}

/// Collapses whitespace and spaces transition arrows uniformly.
pub fn canonical_type(raw: &str) -> String {
    let spaced = raw.replace("->", TRANSITION_ARROW);
    spaced.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Builds one annotator's block. Edits must be sorted by source start and
/// must not overlap; several insertions may share a position.
pub fn emit_m2<T: AsRef<str>>(
    tokens: &[T],
    edits: &[(Edit, ErrorType)],
    annotator: u32,
) -> Result<String, M2Error> {
    Ok(entry_from_edits(tokens, edits, annotator, false)?.to_block())
}

/// Like [`emit_m2`], returning the entry; with `noop`, an edit-free sentence
/// gets an explicit noop annotation.
pub fn entry_from_edits<T: AsRef<str>>(
    tokens: &[T],
    edits: &[(Edit, ErrorType)],
    annotator: u32,
    noop: bool,
) -> Result<M2Entry, M2Error> {
    let mut entry = M2Entry::new(tokens);
    let len = tokens.len();
    let mut prev: Option<&std::ops::Range<usize>> = None;
    for (index, (edit, ty)) in edits.iter().enumerate() {
        let r = &edit.src;
        if r.start > r.end || r.end > len {
            return Err(M2Error::EditOutOfRange { index, start: r.start, end: r.end, len });
        }
        if let Some(p) = prev {
            if r.start < p.start {
                return Err(M2Error::Unsorted { index });
            }
            if r.start < p.end {
                return Err(M2Error::Overlap { index });
            }
        }
        prev = Some(r);
        entry
            .annotations
            .push(Annotation::new(r.start, r.end, &ty.to_string(), &edit.correction, annotator));
    }
    if noop && entry.annotations.is_empty() {
        entry.annotations.push(Annotation::noop(annotator));
    }
    Ok(entry)
}

/// Serializes entries, each block followed by a blank line.
pub fn write_m2(entries: &[M2Entry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&e.to_block());
        out.push('\n');
    }
    out
}

/// Parses M2 text. Lines starting with `#` are ignored.
pub fn parse_m2(text: &str) -> Result<Vec<M2Entry>, M2Error> {
    let mut entries: Vec<M2Entry> = Vec::new();
    let mut open = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.strip_suffix('\r').unwrap_or(raw);
        if l.trim().is_empty() {
            open = false;
            continue;
        }
        if l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("S ").or((l == "S").then_some("")) {
            entries.push(M2Entry {
                source_tokens: rest.split_whitespace().map(String::from).collect(),
                annotations: Vec::new(),
            });
            open = true;
        } else if let Some(rest) = l.strip_prefix("A ") {
            if !open {
                return Err(M2Error::OrphanAnnotation { line });
            }
            let entry = entries.last_mut().expect("open entry");
            let ann = parse_annotation(rest, line, entry.source_tokens.len())?;
            entry.annotations.push(ann);
        } else {
            return Err(M2Error::BadLine { line });
        }
    }
    Ok(entries)
}

fn parse_annotation(rest: &str, line: usize, len: usize) -> Result<Annotation, M2Error> {
    let fields: Vec<&str> = rest.split(FIELD_SEP).collect();
    if fields.len() != 6 {
        return Err(M2Error::FieldCount { line, found: fields.len() });
    }
    let bad_span = || M2Error::BadSpan { line, text: fields[0].to_string() };
    let nums: Vec<&str> = fields[0].split_whitespace().collect();
    let span = match nums.as_slice() {
        ["-1", "-1"] => None,
        [s, e] => {
            let s: usize = s.parse().map_err(|_| bad_span())?;
            let e: usize = e.parse().map_err(|_| bad_span())?;
            if s > e {
                return Err(bad_span());
            }
            if e > len {
                return Err(M2Error::SpanOutOfRange { line, start: s, end: e, len });
            }
            Some((s, e))
        }
        _ => return Err(bad_span()),
    };
    let annotator = fields[5]
        .trim()
        .parse()
        .map_err(|_| M2Error::BadAnnotator { line, text: fields[5].to_string() })?;
    let correction = match fields[2] {
        NONE => "",
        c => c,
    };
    let required = matches!(fields[3], "REQUIRED" | "-REQUIRED-");
    let comment = match fields[4] {
        NONE | "NONE" => None,
        c => Some(c.to_string()),
    };
    Ok(Annotation {
        span,
        type_string: canonical_type(fields[1]),
        correction: if span.is_some() { correction.to_string() } else { String::new() },
        required,
        comment,
        annotator,
    })
}
