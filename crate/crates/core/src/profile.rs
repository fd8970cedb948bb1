//! Language profiles layered over the core typology.
//!
//! A profile is described by a small `key = value` file naming its rule set,
//! resource files and threshold overrides. Three rule sets ship with the
//! crate:
//!
//! * `generic`: no hook; MRU operations with UPOS labels.
//! * `english`: possessive suffix, verb agreement / form / tense and
//!   orthography refinements.
//! * `korean`: word-boundary subtypes and functional-morpheme suffix errors,
//!   with priority resolution between competing candidates.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::conllu::TagSet;
use crate::edit::Operation;
use crate::similarity::{PhoneticLexicon, ResourceError, ShapeTable, ThresholdConfig};
use crate::typology::{classify_r, concat_chars, Category, EditContext, ErrorType, ProfileRules, Providers};
use crate::Scalar;

/// Category precedence used when several candidate types apply.
pub const DEFAULT_PRIORITY: [&str; 5] = ["WB", "WO", "SPELL", "SHORTEN", "PUNCT"];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("profile line {line}: {message}")]
    Definition { line: usize, message: String },
    #[error("profile is missing required key {0:?}")]
    MissingKey(&'static str),
    #[error("resource {name}: {source}")]
    Resource {
        name: String,
        #[source]
        source: ResourceError,
    },
    #[error("no candidate types to resolve")]
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MorphClass {
    Adp,
    Part,
    Hon,
}

impl MorphClass {
    pub fn tag(self) -> &'static str {
        match self {
            MorphClass::Adp => "ADP",
            MorphClass::Part => "PART",
            MorphClass::Hon => "HON",
        }
    }
}

/// Postposition, verbal-ending and honorific suffix inventories.
#[derive(Debug, Clone, PartialEq)]
pub struct KoreanMorphTables {
    // checked in this order; suffixes longest first
    classes: Vec<(MorphClass, Vec<String>)>,
}

impl KoreanMorphTables {
    pub fn new(adp: &str, part: &str, hon: &str) -> Result<Self, ResourceError> {
        let read = |text: &str| -> Result<Vec<String>, ResourceError> {
            let mut items: Vec<String> = text
                .lines()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect();
            if items.is_empty() {
                return Err(ResourceError::Malformed {
                    line: 0,
                    message: "suffix table is empty".into(),
                });
            }
            items.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
            items.dedup();
            Ok(items)
        };
        Ok(Self {
            classes: vec![
                (MorphClass::Adp, read(adp)?),
                (MorphClass::Part, read(part)?),
                (MorphClass::Hon, read(hon)?),
            ],
        })
    }

    /// Splits a word pair into a shared non-empty stem and two suffixes of
    /// one class, each either empty or listed in that class's table.
    pub fn suffix_change<'w>(&self, src: &'w str, tgt: &'w str) -> Option<(MorphClass, &'w str, &'w str)> {
        if src == tgt {
            return None;
        }
        for (class, suffixes) in &self.classes {
            let candidates = suffixes
                .iter()
                .map(String::as_str)
                .filter(|s| src.ends_with(s))
                .chain(std::iter::once(""));
            for s_suf in candidates {
                let (stem, s_suf) = src.split_at(src.len() - s_suf.len());
                if stem.is_empty() {
                    continue;
                }
                let Some(t_suf) = tgt.strip_prefix(stem) else { continue };
                if s_suf == t_suf {
                    continue;
                }
                if t_suf.is_empty() || suffixes.iter().any(|s| s == t_suf) {
                    return Some((*class, s_suf, t_suf));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleSet {
    Generic,
    English,
    Korean(KoreanMorphTables),
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub name: String,
    pub rules: RuleSet,
    pub upos_extensions: Vec<String>,
    pub lexicon: PhoneticLexicon,
    pub shapes: ShapeTable,
    pub thresholds: ThresholdConfig<f64>,
    pub refine: bool,
    pub collapse: bool,
    pub priority: Vec<String>,
}

macro_rules! builtin_files {
    ($dir:literal, [$($file:literal),*]) => {
        &[$(($file, include_str!(concat!("../data/profiles/", $dir, "/", $file)))),*]
    };
}

type BuiltinFiles = &'static [(&'static str, &'static str)];

const GENERIC_FILES: BuiltinFiles = builtin_files!("generic", ["profile.txt"]);
const ENGLISH_FILES: BuiltinFiles = builtin_files!("english", ["profile.txt", "lexicon.tsv", "shapes.tsv"]);
const KOREAN_FILES: BuiltinFiles = builtin_files!(
    "korean",
    ["profile.txt", "lexicon.tsv", "shapes.tsv", "adp.txt", "part.txt", "hon.txt"]
);

pub const BUILTIN_PROFILES: [&str; 3] = ["generic", "english", "korean"];

impl Profile {
    pub fn builtin(name: &str) -> Result<Self, ProfileError> {
        let files = match name {
            "generic" => GENERIC_FILES,
            "english" => ENGLISH_FILES,
            "korean" => KOREAN_FILES,
            other => return Err(ProfileError::UnknownProfile(other.to_string())),
        };
        let lookup = |file: &str| {
            files
                .iter()
                .find(|(n, _)| *n == file)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| ResourceError::Malformed {
                    line: 0,
                    message: format!("no bundled resource {file}"),
                })
        };
        Self::from_definition(&lookup("profile.txt").expect("bundled profile"), &lookup)
    }

    pub fn generic() -> Self {
        Self::builtin("generic").expect("bundled generic profile")
    }

    pub fn english() -> Self {
        Self::builtin("english").expect("bundled english profile")
    }

    pub fn korean() -> Self {
        Self::builtin("korean").expect("bundled korean profile")
    }

    /// Loads a profile file; resource paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProfileError::Resource {
            name: path.display().to_string(),
            source: ResourceError::io(path, e),
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|e| ResourceError::io(&p, e))
        };
        Self::from_definition(&text, &read)
    }

    /// Name of a bundled profile, or a path to a profile file.
    pub fn resolve(name_or_path: &str) -> Result<Self, ProfileError> {
        if BUILTIN_PROFILES.contains(&name_or_path) {
            Self::builtin(name_or_path)
        } else {
            Self::load(Path::new(name_or_path))
        }
    }

    pub fn from_definition(
        text: &str,
        read: &dyn Fn(&str) -> Result<String, ResourceError>,
    ) -> Result<Self, ProfileError> {
        let mut kv: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let def_err = |message: String| ProfileError::Definition { line: i + 1, message };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| def_err("expected key = value".into()))?;
            let k = k.trim();
            const KEYS: [&str; 14] = [
                "name", "rules", "upos_extensions", "lexicon", "shapes", "shape_fallback", "alpha1",
                "alpha2", "refine", "collapse_transitions", "priority", "adp", "part", "hon",
            ];
            if !KEYS.contains(&k) {
                return Err(def_err(format!("unknown key {k:?}")));
            }
            if kv.insert(k, (i + 1, v.trim())).is_some() {
                return Err(def_err(format!("duplicate key {k:?}")));
            }
        }

        let resource = |key: &'static str| -> Result<Option<String>, ProfileError> {
            kv.get(key)
                .map(|(_, name)| {
                    read(name).map_err(|source| ProfileError::Resource {
                        name: name.to_string(),
                        source,
                    })
                })
                .transpose()
        };
        let wrap = |name: &str| {
            let name = name.to_string();
            move |source| ProfileError::Resource { name, source }
        };
        let number = |key: &'static str, default: f64| -> Result<f64, ProfileError> {
            match kv.get(key) {
                None => Ok(default),
                Some((line, v)) => v.parse().map_err(|_| ProfileError::Definition {
                    line: *line,
                    message: format!("{key} must be a number"),
                }),
            }
        };
        let flag = |key: &'static str, default: bool| -> Result<bool, ProfileError> {
            match kv.get(key) {
                None => Ok(default),
                Some((_, "true")) => Ok(true),
                Some((_, "false")) => Ok(false),
                Some((line, _)) => Err(ProfileError::Definition {
                    line: *line,
                    message: format!("{key} must be true or false"),
                }),
            }
        };
        let list = |key: &'static str| -> Vec<String> {
            kv.get(key)
                .map(|(_, v)| {
                    v.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect()
                })
                .unwrap_or_default()
        };

        let name = kv.get("name").ok_or(ProfileError::MissingKey("name"))?.1.to_string();
        let (rules_line, rules_name) = *kv.get("rules").ok_or(ProfileError::MissingKey("rules"))?;
        let rules = match rules_name {
            "generic" => RuleSet::Generic,
            "english" => RuleSet::English,
            "korean" => {
                let adp = resource("adp")?.ok_or(ProfileError::MissingKey("adp"))?;
                let part = resource("part")?.ok_or(ProfileError::MissingKey("part"))?;
                let hon = resource("hon")?.ok_or(ProfileError::MissingKey("hon"))?;
                RuleSet::Korean(KoreanMorphTables::new(&adp, &part, &hon).map_err(wrap("korean suffix tables"))?)
            }
            other => {
                return Err(ProfileError::Definition {
                    line: rules_line,
                    message: format!("unknown rule set {other:?}"),
                })
            }
        };
        let lexicon = match resource("lexicon")? {
            Some(text) => PhoneticLexicon::parse(&text).map_err(wrap("lexicon"))?,
            None => PhoneticLexicon::default(),
        };
        let fallback = number("shape_fallback", 0.0)?;
        let shapes = match resource("shapes")? {
            Some(text) => ShapeTable::parse(&text, fallback).map_err(wrap("shapes"))?,
            None => ShapeTable::parse("", fallback).map_err(wrap("shapes"))?,
        };
        let thresholds = ThresholdConfig::new(number("alpha1", 0.8)?, number("alpha2", 0.8)?);
        thresholds.validate().map_err(|e| ProfileError::Definition {
            line: 0,
            message: e.to_string(),
        })?;
        let mut priority = list("priority");
        if priority.is_empty() {
            priority = DEFAULT_PRIORITY.iter().map(|s| s.to_string()).collect();
        }

        Ok(Self {
            name,
            rules,
            upos_extensions: list("upos_extensions"),
            lexicon,
            shapes,
            thresholds,
            refine: flag("refine", true)?,
            collapse: flag("collapse_transitions", false)?,
            priority,
        })
    }

    pub fn tagset(&self) -> TagSet {
        TagSet::with_extensions(self.upos_extensions.iter().cloned())
    }

    pub fn providers<S: Scalar>(&self) -> Providers<'_, S> {
        Providers {
            phonetic: &self.lexicon,
            shape: &self.shapes,
        }
    }

    pub fn thresholds<S: Scalar>(&self) -> ThresholdConfig<S> {
        ThresholdConfig::new(S::from_real(self.thresholds.alpha1), S::from_real(self.thresholds.alpha2))
    }
}

impl ProfileRules for Profile {
    fn hook<S: Scalar>(
        &self,
        ctx: &EditContext<'_>,
        thr: &ThresholdConfig<S>,
        providers: Providers<'_, S>,
    ) -> Option<ErrorType> {
        match &self.rules {
            RuleSet::Generic => generic_hook(ctx),
            RuleSet::English => english_hook(ctx),
            RuleSet::Korean(tables) => {
                let core = (ctx.edit.operation == Operation::Replacement)
                    .then(|| ErrorType::new(Operation::Replacement, classify_r(ctx, thr, providers, self.collapse)));
                korean_hook(ctx, tables, core, &self.priority)
            }
        }
    }

    fn refine_replacements(&self) -> bool {
        self.refine
    }

    fn collapse_transitions(&self) -> bool {
        self.collapse
    }
}

pub fn generic_hook(_ctx: &EditContext<'_>) -> Option<ErrorType> {
    None
}

fn is_verbal(upos: &str) -> bool {
    upos == "VERB" || upos == "AUX"
}

pub fn english_hook(ctx: &EditContext<'_>) -> Option<ErrorType> {
    let op = ctx.edit.operation;
    let typed = |path: &[&str]| Some(ErrorType::new(op, Category::label(path)));

    let possessive = |toks: &[crate::conllu::Token]| {
        toks.first()
            .map(|t| t.upos == "PART" && t.deprel == "case:poss")
            .unwrap_or(false)
    };
    if possessive(ctx.source) || possessive(ctx.target) {
        return typed(&["NOUN", "POSS"]);
    }

    if let ([a], [b]) = (ctx.source, ctx.target) {
        if is_verbal(&a.upos) && is_verbal(&b.upos) && a.lemma == b.lemma {
            let diff = a.feats.differing_keys(&b.feats);
            if !diff.is_empty() && diff.iter().all(|k| *k == "Person" || *k == "Number") {
                return typed(&["VERB", "SVA"]);
            }
            if diff.contains("VerbForm") {
                return typed(&["VERB", "FORM"]);
            }
            if diff.contains("Tense") {
                return typed(&["VERB", "TENSE"]);
            }
        }
    }

    // case-only changes; boundary changes stay with the word-boundary rule
    let (src, tgt) = (ctx.source_words(), ctx.target_words());
    if op == Operation::Replacement
        && src.len() == tgt.len()
        && src.iter().zip(&tgt).all(|(a, b)| a.to_lowercase() == b.to_lowercase())
    {
        return typed(&["ORTH"]);
    }
    None
}

/// `core` is the core replacement type, entered as the last candidate so
/// that profile-specific types win ties.
pub fn korean_hook(
    ctx: &EditContext<'_>,
    tables: &KoreanMorphTables,
    core: Option<ErrorType>,
    priority: &[String],
) -> Option<ErrorType> {
    if ctx.edit.operation != Operation::Replacement {
        return None;
    }
    let mut candidates = Vec::new();

    let (src, tgt) = (ctx.source_words(), ctx.target_words());
    if src.len() != tgt.len() && concat_chars(&src) == concat_chars(&tgt) {
        // more units in the correction: the source was missing a space
        let sub = if tgt.len() > src.len() { "M" } else { "U" };
        candidates.push(ErrorType::new(Operation::Replacement, Category::label(&["WB", sub])));
    }

    if let ([a], [b]) = (ctx.source, ctx.target) {
        if let Some((class, s_suf, t_suf)) = tables.suffix_change(&a.form, &b.form) {
            let ty = match (s_suf.is_empty(), t_suf.is_empty()) {
                (true, _) => ErrorType::new(Operation::Missing, Category::label(&[class.tag()])),
                (false, true) => ErrorType::new(Operation::Unnecessary, Category::label(&[class.tag()])),
                (false, false) => ErrorType::new(
                    Operation::Replacement,
                    Category::Transition {
                        source: vec![a.upos.clone()],
                        target: vec![format!("{}:{}", b.upos, class.tag())],
                    },
                ),
            };
            candidates.push(ty);
        }
    }

    if candidates.is_empty() {
        return None;
    }
    candidates.extend(core);
    priority_resolve_with(&candidates, priority).ok()
}

fn operation_rank(op: Operation) -> usize {
    match op {
        Operation::Missing => 0,
        Operation::Unnecessary => 1,
        Operation::Replacement => 2,
    }
}

/// Picks one type: first by operation (M, then U, then the rest), then by
/// category precedence; the earliest candidate wins exact ties.
pub fn priority_resolve(candidates: &[ErrorType]) -> Result<ErrorType, ProfileError> {
    let order: Vec<String> = DEFAULT_PRIORITY.iter().map(|s| s.to_string()).collect();
    priority_resolve_with(candidates, &order)
}

pub fn priority_resolve_with(candidates: &[ErrorType], order: &[String]) -> Result<ErrorType, ProfileError> {
    let rank = |t: &ErrorType| {
        let cat = t
            .category
            .head()
            .and_then(|h| order.iter().position(|o| o == h))
            .unwrap_or(order.len());
        (operation_rank(t.operation), cat)
    };
    let mut best: Option<&ErrorType> = None;
    for c in candidates {
        match best {
            Some(b) if rank(c) >= rank(b) => {}
            _ => best = Some(c),
        }
    }
    best.cloned().ok_or(ProfileError::NoCandidates)
}
