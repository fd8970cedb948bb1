//! Turning an alignment into edits.
//!
//! Non-matching alignment operations are grouped into edits by a fixed,
//! ordered set of merge rules. Each rule can be switched off through
//! [`MergeRules`].

use std::fmt;
use std::ops::Range;

use crate::align::{AlignmentOp, OpKind};
use crate::conllu::Token;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operation {
    Missing,
    Replacement,
    Unnecessary,
}

impl Operation {
    pub fn code(self) -> &'static str {
        match self {
            Operation::Missing => "M",
            Operation::Replacement => "R",
            Operation::Unnecessary => "U",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "M" => Some(Operation::Missing),
            "R" => Some(Operation::Replacement),
            "U" => Some(Operation::Unnecessary),
            _ => None,
        }
    }

    pub fn of_spans(src: &Range<usize>, tgt: &Range<usize>) -> Self {
        match (src.is_empty(), tgt.is_empty()) {
            (true, _) => Operation::Missing,
            (false, true) => Operation::Unnecessary,
            (false, false) => Operation::Replacement,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub src: Range<usize>,
    pub tgt: Range<usize>,
    pub operation: Operation,
    /// Space-joined target forms; empty for deletions.
    pub correction: String,
}

impl Edit {
    pub fn new(src: Range<usize>, tgt: Range<usize>, target: &[Token]) -> Self {
        let correction = target[tgt.clone()]
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Self {
            operation: Operation::of_spans(&src, &tgt),
            src,
            tgt,
            correction,
        }
    }
}

/// Switches for the merge rules, applied in field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeRules {
    /// A transposition is always one edit. When off, it is re-expanded into
    /// one-to-one operations that go through the remaining rules.
    pub transpose: bool,
    /// Operations whose source and target concatenate to the same string.
    pub word_boundary: bool,
    /// Operations whose tokens all carry one UPOS.
    pub same_pos: bool,
    /// Operations whose tokens are all AUX, VERB or PART.
    pub verb_phrase: bool,
    /// A punctuation substitution followed by a case-only substitution.
    pub punct_case: bool,
}

impl Default for MergeRules {
    fn default() -> Self {
        Self {
            transpose: true,
            word_boundary: true,
            same_pos: true,
            verb_phrase: true,
            punct_case: true,
        }
    }
}

const VERB_PHRASE_UPOS: [&str; 3] = ["AUX", "VERB", "PART"];

pub fn merge_edits<S: Scalar>(
    ops: &[AlignmentOp<S>],
    src: &[Token],
    tgt: &[Token],
    rules: &MergeRules,
) -> Vec<Edit> {
    let mut expanded: Vec<AlignmentOp<S>> = Vec::with_capacity(ops.len());
    for op in ops {
        if op.kind == OpKind::Transpose && !rules.transpose {
            for (i, j) in op.src.clone().zip(op.tgt.clone()) {
                let kind = if src[i].form == tgt[j].form {
                    OpKind::Match
                } else {
                    OpKind::Sub
                };
                expanded.push(AlignmentOp {
                    kind,
                    src: i..i + 1,
                    tgt: j..j + 1,
                    cost: S::zero(),
                });
            }
        } else {
            expanded.push(op.clone());
        }
    }

    let mut edits = Vec::new();
    let mut i = 0;
    while i < expanded.len() {
        match expanded[i].kind {
            OpKind::Match => i += 1,
            OpKind::Transpose => {
                edits.push(Edit::new(expanded[i].src.clone(), expanded[i].tgt.clone(), tgt));
                i += 1;
            }
            _ => {
                let end = expanded[i..]
                    .iter()
                    .position(|o| matches!(o.kind, OpKind::Match | OpKind::Transpose))
                    .map_or(expanded.len(), |p| i + p);
                merge_run(&expanded[i..end], src, tgt, rules, &mut edits);
                i = end;
            }
        }
    }
    edits
}

type MergePredicate<S> = fn(&[AlignmentOp<S>], &[Token], &[Token]) -> bool;

fn merge_run<S>(run: &[AlignmentOp<S>], src: &[Token], tgt: &[Token], rules: &MergeRules, out: &mut Vec<Edit>) {
    let predicates: [(bool, MergePredicate<S>); 4] = [
        (rules.word_boundary, same_characters),
        (rules.same_pos, one_upos),
        (rules.verb_phrase, verb_phrase),
        (rules.punct_case, punct_then_case),
    ];
    let mut start = 0;
    while start < run.len() {
        let mut end = start + 1;
        'rules: for (enabled, holds) in predicates.iter() {
            if !enabled {
                continue;
            }
            for e in (start + 2..=run.len()).rev() {
                if holds(&run[start..e], src, tgt) {
                    end = e;
                    break 'rules;
                }
            }
        }
        let first = &run[start];
        let last = &run[end - 1];
        out.push(Edit::new(first.src.start..last.src.end, first.tgt.start..last.tgt.end, tgt));
        start = end;
    }
}

fn span<S>(ops: &[AlignmentOp<S>]) -> (Range<usize>, Range<usize>) {
    let first = &ops[0];
    let last = &ops[ops.len() - 1];
    (first.src.start..last.src.end, first.tgt.start..last.tgt.end)
}

fn involved<'a, S>(ops: &[AlignmentOp<S>], src: &'a [Token], tgt: &'a [Token]) -> impl Iterator<Item = &'a Token> {
    let (s, t) = span(ops);
    src[s].iter().chain(tgt[t].iter())
}

fn same_characters<S>(ops: &[AlignmentOp<S>], src: &[Token], tgt: &[Token]) -> bool {
    let (s, t) = span(ops);
    let join = |toks: &[Token]| -> String {
        toks.iter()
            .flat_map(|t| t.form.chars())
            .filter(|c| !c.is_whitespace())
            .collect()
    };
    join(&src[s]) == join(&tgt[t])
}

fn one_upos<S>(ops: &[AlignmentOp<S>], src: &[Token], tgt: &[Token]) -> bool {
    let mut tags = involved(ops, src, tgt).map(|t| t.upos.as_str());
    match tags.next() {
        Some(first) => tags.all(|t| t == first),
        None => false,
    }
}

fn verb_phrase<S>(ops: &[AlignmentOp<S>], src: &[Token], tgt: &[Token]) -> bool {
    involved(ops, src, tgt).all(|t| VERB_PHRASE_UPOS.contains(&t.upos.as_str()))
}

fn punct_then_case<S>(ops: &[AlignmentOp<S>], src: &[Token], tgt: &[Token]) -> bool {
    let [a, b] = ops else { return false };
    if a.kind != OpKind::Sub || b.kind != OpKind::Sub {
        return false;
    }
    let (sa, ta) = (&src[a.src.start], &tgt[a.tgt.start]);
    let (sb, tb) = (&src[b.src.start], &tgt[b.tgt.start]);
    let punct = |t: &Token| t.upos == "PUNCT" || t.form.chars().all(|c| c.is_ascii_punctuation());
    punct(sa) && punct(ta) && sb.form != tb.form && sb.form.to_lowercase() == tb.form.to_lowercase()
}

/// Applies edits (sorted, non-overlapping on the source side) to `source`.
pub fn apply_edits<T: AsRef<str>>(source: &[T], edits: &[Edit]) -> Vec<String> {
    let mut out = Vec::with_capacity(source.len());
    let mut pos = 0;
    for edit in edits {
        out.extend(source[pos..edit.src.start].iter().map(|s| s.as_ref().to_string()));
        out.extend(edit.correction.split_whitespace().map(String::from));
        pos = edit.src.end;
    }
    out.extend(source[pos..].iter().map(|s| s.as_ref().to_string()));
    out
}
