//! Language-agnostic edit classification.
//!
//! Every edit gets an operation (M, R or U) and a category. Missing and
//! unnecessary edits are labelled with the UPOS of the tokens involved.
//! Replacements go through the spelling / word-order / word-boundary cascade
//! and otherwise get a `P1 -> P2` POS transition label.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::conllu::{Sentence, Token};
use crate::edit::{Edit, Operation};
use crate::similarity::{SimilarityProvider, ThresholdConfig};
use crate::Scalar;

pub const TRANSITION_ARROW: &str = " -> ";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    /// Hierarchical label rendered with `:` separators, e.g. `SPELL:PHONETIC`.
    /// A segment may itself be a space-joined UPOS sequence (`AUX VERB`).
    Labels(Vec<String>),
    /// `source -> target` UPOS sequences. Elements may carry a `:`-suffix
    /// such as `NOUN:ADP`.
    Transition { source: Vec<String>, target: Vec<String> },
}

impl Category {
    pub fn label(path: &[&str]) -> Self {
        Category::Labels(path.iter().map(|s| s.to_string()).collect())
    }

    /// Single-segment label from a UPOS sequence (`["AUX", "VERB"]` -> `AUX VERB`).
    pub fn pos_sequence<S: AsRef<str>>(tags: &[S]) -> Self {
        let joined = tags.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        Category::Labels(vec![joined])
    }

    /// First path segment, used for priority ranking and operation-free stats.
    pub fn head(&self) -> Option<&str> {
        match self {
            Category::Labels(path) => path.first().map(String::as_str),
            Category::Transition { .. } => None,
        }
    }

    fn is_well_formed(&self) -> bool {
        match self {
            Category::Labels(path) => {
                !path.is_empty()
                    && path.iter().all(|seg| {
                        !seg.is_empty()
                            && !seg.contains(':')
                            && !seg.contains("->")
                            && seg.split(' ').all(|p| !p.is_empty())
                    })
            }
            Category::Transition { source, target } => {
                let ok = |seq: &Vec<String>| {
                    !seq.is_empty()
                        && seq.iter().all(|e| {
                            !e.is_empty() && !e.contains(char::is_whitespace) && !e.contains("->")
                        })
                };
                ok(source) && ok(target)
            }
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Labels(path) => f.write_str(&path.join(":")),
            Category::Transition { source, target } => {
                write!(f, "{}{}{}", source.join(" "), TRANSITION_ARROW, target.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorType {
    pub operation: Operation,
    pub category: Category,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ErrorTypeError {
    #[error("malformed error type {0:?}")]
    Malformed(String),
    #[error("{0} is only valid for replacements")]
    ReplacementOnly(String),
}

impl ErrorType {
    pub fn new(operation: Operation, category: Category) -> Self {
        Self { operation, category }
    }

    pub fn validate(&self) -> Result<(), ErrorTypeError> {
        if !self.category.is_well_formed() {
            return Err(ErrorTypeError::Malformed(self.to_string()));
        }
        if let Some(head @ ("SPELL" | "WO" | "WB")) = self.category.head() {
            if self.operation != Operation::Replacement {
                return Err(ErrorTypeError::ReplacementOnly(head.to_string()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.operation, self.category)
    }
}

impl FromStr for ErrorType {
    type Err = ErrorTypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ErrorTypeError::Malformed(s.to_string());
        let (op, rest) = s.split_once(':').ok_or_else(malformed)?;
        let operation = Operation::from_code(op).ok_or_else(malformed)?;
        let category = match rest.split_once(TRANSITION_ARROW) {
            Some((src, tgt)) => Category::Transition {
                source: src.split(' ').map(String::from).collect(),
                target: tgt.split(' ').map(String::from).collect(),
            },
            None => Category::Labels(rest.split(':').map(String::from).collect()),
        };
        let ty = ErrorType { operation, category };
        ty.validate()?;
        Ok(ty)
    }
}

/// The tokens an edit covers on each side.
#[derive(Debug, Clone, Copy)]
pub struct EditContext<'a> {
    pub edit: &'a Edit,
    pub source: &'a [Token],
    pub target: &'a [Token],
}

impl<'a> EditContext<'a> {
    pub fn new(edit: &'a Edit, src: &'a Sentence, tgt: &'a Sentence) -> Self {
        Self {
            edit,
            source: &src.tokens[edit.src.clone()],
            target: &tgt.tokens[edit.tgt.clone()],
        }
    }

    pub fn source_words(&self) -> Vec<&'a str> {
        self.source.iter().map(|t| t.form.as_str()).collect()
    }

    pub fn target_words(&self) -> Vec<&'a str> {
        self.target.iter().map(|t| t.form.as_str()).collect()
    }

    pub fn source_upos(&self) -> Vec<&'a str> {
        self.source.iter().map(|t| t.upos.as_str()).collect()
    }

    pub fn target_upos(&self) -> Vec<&'a str> {
        self.target.iter().map(|t| t.upos.as_str()).collect()
    }
}

pub fn operation_of(edit: &Edit) -> Operation {
    Operation::of_spans(&edit.src, &edit.tgt)
}

/// Case-folded multiset of words.
pub fn bag_of_words<S: AsRef<str>>(words: &[S]) -> BTreeMap<String, usize> {
    let mut bag = BTreeMap::new();
    for w in words {
        *bag.entry(w.as_ref().to_lowercase()).or_insert(0) += 1;
    }
    bag
}

/// Word forms concatenated without separators, case preserved.
pub fn concat_chars<S: AsRef<str>>(words: &[S]) -> String {
    words.iter().map(AsRef::as_ref).collect()
}

/// The two similarity backends consulted for single-word replacements.
pub struct Providers<'a, S> {
    pub phonetic: &'a dyn SimilarityProvider<S>,
    pub shape: &'a dyn SimilarityProvider<S>,
}

impl<'a, S> Clone for Providers<'a, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<'a, S> Copy for Providers<'a, S> {}

/// Replacement cascade: spelling (phonographic, phonetic, shape), then word
/// order, then word boundary, then a POS transition.
///
/// Spelling branches only apply when both sides are single words, and word
/// order needs at least two words.
pub fn classify_r<S: Scalar>(
    ctx: &EditContext<'_>,
    thr: &ThresholdConfig<S>,
    providers: Providers<'_, S>,
    collapse: bool,
) -> Category {
    let src = ctx.source_words();
    let tgt = ctx.target_words();
    if let ([a], [b]) = (src.as_slice(), tgt.as_slice()) {
        let phonetic = providers.phonetic.similarity(a, b) > thr.alpha1;
        let shape = providers.shape.similarity(a, b) > thr.alpha2;
        match (phonetic, shape) {
            (true, true) => return Category::label(&["SPELL", "PHONOGRAPHIC"]),
            (true, false) => return Category::label(&["SPELL", "PHONETIC"]),
            (false, true) => return Category::label(&["SPELL", "SHAPE"]),
            (false, false) => {}
        }
    }
    if src.len() > 1 && bag_of_words(&src) == bag_of_words(&tgt) {
        return Category::label(&["WO"]);
    }
    if concat_chars(&src) == concat_chars(&tgt) {
        return Category::label(&["WB"]);
    }
    pos_transition_label(ctx, collapse)
}

/// `R:P1 -> P2` label; with `collapse`, identical sides render once.
pub fn pos_transition_label(ctx: &EditContext<'_>, collapse: bool) -> Category {
    let source = ctx.source_upos();
    let target = ctx.target_upos();
    if collapse && source == target {
        return Category::pos_sequence(&source);
    }
    Category::Transition {
        source: source.into_iter().map(String::from).collect(),
        target: target.into_iter().map(String::from).collect(),
    }
}

/// Language-specific layer consulted before the core rules.
pub trait ProfileRules {
    /// A profile-specific type, or `None` to defer to the core.
    fn hook<S: Scalar>(
        &self,
        ctx: &EditContext<'_>,
        thr: &ThresholdConfig<S>,
        providers: Providers<'_, S>,
    ) -> Option<ErrorType>;

    /// Whether replacements run the spelling / order / boundary cascade.
    fn refine_replacements(&self) -> bool {
        true
    }

    fn collapse_transitions(&self) -> bool {
        false
    }
}

/// Core classification without any profile hook.
pub fn classify_core<S: Scalar>(
    ctx: &EditContext<'_>,
    thr: &ThresholdConfig<S>,
    providers: Providers<'_, S>,
    refine: bool,
    collapse: bool,
) -> ErrorType {
    let operation = operation_of(ctx.edit);
    let all_punct = ctx
        .source
        .iter()
        .chain(ctx.target)
        .all(|t| t.upos == "PUNCT");
    let category = if all_punct {
        Category::label(&["PUNCT"])
    } else {
        match operation {
            Operation::Missing => Category::pos_sequence(&ctx.target_upos()),
            Operation::Unnecessary => Category::pos_sequence(&ctx.source_upos()),
            Operation::Replacement if refine => classify_r(ctx, thr, providers, collapse),
            Operation::Replacement => pos_transition_label(ctx, collapse),
        }
    };
    ErrorType::new(operation, category)
}

pub fn classify<S: Scalar, P: ProfileRules>(
    edit: &Edit,
    src: &Sentence,
    tgt: &Sentence,
    profile: &P,
    thr: &ThresholdConfig<S>,
    providers: Providers<'_, S>,
) -> ErrorType {
    let ctx = EditContext::new(edit, src, tgt);
    profile.hook(&ctx, thr, providers).unwrap_or_else(|| {
        classify_core(
            &ctx,
            thr,
            providers,
            profile.refine_replacements(),
            profile.collapse_transitions(),
        )
    })
}
