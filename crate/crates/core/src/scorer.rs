//! Scoring hypothesis M2 against reference M2, and corpus statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::m2::{Annotation, M2Entry};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("hypothesis has {hyp} sentences but reference has {reference}")]
    EntryCount { hyp: usize, reference: usize },
    #[error("sentence {sentence}: source lines differ between hypothesis and reference")]
    SourceMismatch { sentence: usize },
    #[error("beta must be positive")]
    BadBeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<S> {
    pub precision: S,
    pub recall: S,
    pub f: S,
}

/// Precision, recall and F-beta. An empty denominator makes precision or
/// recall 1; F is 0 when both are 0.
pub fn f_beta<S: Scalar>(tp: usize, fp: usize, fn_: usize, beta: S) -> Prf<S> {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            S::one()
        } else {
            S::from_count(num) / S::from_count(den)
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    let f = if den == S::zero() {
        S::zero()
    } else {
        (S::one() + b2) * precision * recall / den
    };
    Prf { precision, recall, f }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn prf(&self, beta: f64) -> Prf<f64> {
        f_beta(self.tp, self.fp, self.fn_, beta)
    }
}

/// Which annotation fields must agree for two edits to match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    Span,
    SpanType,
    #[default]
    SpanCorrection,
    SpanCorrectionType,
}

impl MatchMode {
    pub const ALL: [MatchMode; 4] = [
        MatchMode::Span,
        MatchMode::SpanType,
        MatchMode::SpanCorrection,
        MatchMode::SpanCorrectionType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatchMode::Span => "span",
            MatchMode::SpanType => "span+type",
            MatchMode::SpanCorrection => "span+correction",
            MatchMode::SpanCorrectionType => "span+correction+type",
        }
    }

    /// The same mode with the type also compared.
    pub fn with_type(self) -> Self {
        match self {
            MatchMode::Span | MatchMode::SpanType => MatchMode::SpanType,
            MatchMode::SpanCorrection | MatchMode::SpanCorrectionType => MatchMode::SpanCorrectionType,
        }
    }

    fn key(self, a: &Annotation) -> (Option<(usize, usize)>, Option<&str>, Option<&str>) {
        let ty = matches!(self, MatchMode::SpanType | MatchMode::SpanCorrectionType).then_some(a.type_string.as_str());
        let corr = matches!(self, MatchMode::SpanCorrection | MatchMode::SpanCorrectionType)
            .then_some(a.correction.as_str());
        (a.span, ty, corr)
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown matching mode {s:?} (span, span+type, span+correction, span+correction+type)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub counts: Counts,
    /// (hypothesis index, reference index)
    pub pairs: Vec<(usize, usize)>,
}

/// Matches hypothesis edits to reference edits on the mode's key. Keys are
/// compared for equality, so pairing each hypothesis with the first unused
/// equal reference is a maximum matching. Noops are skipped.
pub fn match_edits(hyp: &[&Annotation], reference: &[&Annotation], mode: MatchMode) -> MatchResult {
    let mut pool: HashMap<_, Vec<usize>> = HashMap::new();
    let mut n_ref = 0;
    for (j, r) in reference.iter().enumerate().rev() {
        if !r.is_noop() {
            pool.entry(mode.key(r)).or_default().push(j);
            n_ref += 1;
        }
    }
    let mut pairs = Vec::new();
    let mut n_hyp = 0;
    for (i, h) in hyp.iter().enumerate() {
        if h.is_noop() {
            continue;
        }
        n_hyp += 1;
        if let Some(j) = pool.get_mut(&mode.key(h)).and_then(Vec::pop) {
            pairs.push((i, j));
        }
    }
    let tp = pairs.len();
    MatchResult {
        counts: Counts { tp, fp: n_hyp - tp, fn_: n_ref - tp },
        pairs,
    }
}

/// How one reference annotator is chosen per sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Jointly choose annotators to maximize corpus F-beta.
    #[default]
    Corpus,
    /// Maximize each sentence's own F-beta.
    Sentence,
}

impl Selection {
    pub fn name(self) -> &'static str {
        match self {
            Selection::Corpus => "corpus",
            Selection::Sentence => "sentence",
        }
    }
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corpus" => Ok(Selection::Corpus),
            "sentence" => Ok(Selection::Sentence),
            _ => Err(format!("unknown selection {s:?} (corpus, sentence)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeScore {
    pub counts: Counts,
    pub prf: Prf<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub counts: Counts,
    pub prf: Prf<f64>,
    pub beta: f64,
    pub mode: MatchMode,
    pub selection: Selection,
    pub per_type: BTreeMap<String, TypeScore>,
    pub per_operation: BTreeMap<String, TypeScore>,
    /// Chosen reference annotator for each sentence.
    pub chosen: Vec<u32>,
}

/// Hypothesis edits: those of the lowest annotator id present.
fn hypothesis_edits(entry: &M2Entry) -> Vec<&Annotation> {
    entry.annotators().first().map(|&id| entry.edits_of(id)).unwrap_or_default()
}

/// Reference annotator ids; an entry without annotations has one empty
/// annotator 0.
fn reference_annotators(entry: &M2Entry) -> Vec<u32> {
    let ids = entry.annotators();
    if ids.is_empty() {
        vec![0]
    } else {
        ids
    }
}

struct Candidate {
    annotator: u32,
    tp: usize,
    n_ref: usize,
}

pub fn evaluate_corpus(
    hyp: &[M2Entry],
    reference: &[M2Entry],
    beta: f64,
    mode: MatchMode,
    selection: Selection,
) -> Result<ScoreReport, ScoreError> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(ScoreError::BadBeta);
    }
    if hyp.len() != reference.len() {
        return Err(ScoreError::EntryCount { hyp: hyp.len(), reference: reference.len() });
    }
    let mut hyp_edits = Vec::with_capacity(hyp.len());
    let mut candidates = Vec::with_capacity(hyp.len());
    for (i, (h, r)) in hyp.iter().zip(reference).enumerate() {
        if h.source_tokens != r.source_tokens {
            return Err(ScoreError::SourceMismatch { sentence: i + 1 });
        }
        let edits = hypothesis_edits(h);
        let cands: Vec<Candidate> = reference_annotators(r)
            .into_iter()
            .map(|annotator| {
                let refs = r.edits_of(annotator);
                let m = match_edits(&edits, &refs, mode);
                Candidate { annotator, tp: m.counts.tp, n_ref: refs.len() }
            })
            .collect();
        hyp_edits.push(edits);
        candidates.push(cands);
    }

    let picks = match selection {
        Selection::Sentence => select_per_sentence(&hyp_edits, &candidates, beta),
        Selection::Corpus => select_for_corpus(&hyp_edits, &candidates, beta),
    };

    let type_mode = mode.with_type();
    let mut counts = Counts::default();
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    let mut per_operation: BTreeMap<String, Counts> = BTreeMap::new();
    let mut chosen = Vec::with_capacity(picks.len());
    for ((edits, cands), (entry, pick)) in hyp_edits.iter().zip(&candidates).zip(reference.iter().zip(picks)) {
        let c = &cands[pick];
        chosen.push(c.annotator);
        counts.add(Counts { tp: c.tp, fp: edits.len() - c.tp, fn_: c.n_ref - c.tp });

        let refs = entry.edits_of(c.annotator);
        let m = match_edits(edits, &refs, type_mode);
        let mut hyp_hit = vec![false; edits.len()];
        let mut ref_hit = vec![false; refs.len()];
        for &(i, j) in &m.pairs {
            hyp_hit[i] = true;
            ref_hit[j] = true;
        }
        let mut bump = |a: &Annotation, f: fn(&mut Counts)| {
            f(per_type.entry(a.type_string.clone()).or_default());
            let op = a.operation().map_or("other", |o| o.code());
            f(per_operation.entry(op.to_string()).or_default());
        };
        for (a, hit) in edits.iter().zip(&hyp_hit) {
            bump(a, if *hit { |c| c.tp += 1 } else { |c| c.fp += 1 });
        }
        for (a, hit) in refs.iter().zip(&ref_hit) {
            if !hit {
                bump(a, |c| c.fn_ += 1);
            }
        }
    }

    let score = |m: BTreeMap<String, Counts>| {
        m.into_iter()
            .map(|(k, counts)| (k, TypeScore { counts, prf: counts.prf(beta) }))
            .collect()
    };
    Ok(ScoreReport {
        prf: counts.prf(beta),
        counts,
        beta,
        mode,
        selection,
        per_type: score(per_type),
        per_operation: score(per_operation),
        chosen,
    })
}

fn select_per_sentence(hyp: &[Vec<&Annotation>], candidates: &[Vec<Candidate>], beta: f64) -> Vec<usize> {
    hyp.iter()
        .zip(candidates)
        .map(|(edits, cands)| {
            let mut best = 0;
            let mut best_f = f64::NEG_INFINITY;
            for (k, c) in cands.iter().enumerate() {
                let f = f_beta(c.tp, edits.len() - c.tp, c.n_ref - c.tp, beta).f;
                if f > best_f {
                    best = k;
                    best_f = f;
                }
            }
            best
        })
        .collect()
}

/// With the hypothesis total H fixed, corpus F-beta is
/// (1+β²)·T / (β²·R + H) over the chosen annotators' total matches T and
/// reference sizes R. The ratio is maximized by Dinkelbach iteration,
/// starting from the lowest-id annotator everywhere.
fn select_for_corpus(hyp: &[Vec<&Annotation>], candidates: &[Vec<Candidate>], beta: f64) -> Vec<usize> {
    let b2 = beta * beta;
    let h: usize = hyp.iter().map(Vec::len).sum();
    let argmax = |score: &dyn Fn(&Candidate) -> f64| -> Vec<usize> {
        candidates
            .iter()
            .map(|cands| {
                let mut best = 0;
                for k in 1..cands.len() {
                    if score(&cands[k]) > score(&cands[best]) {
                        best = k;
                    }
                }
                best
            })
            .collect()
    };
    if h == 0 {
        // no matches possible: F is 1 exactly when every chosen reference is empty
        return argmax(&|c| -(c.n_ref as f64));
    }
    let ratio = |picks: &[usize]| {
        let (t, r) = picks
            .iter()
            .zip(candidates)
            .fold((0, 0), |(t, r), (&k, cands)| (t + cands[k].tp, r + cands[k].n_ref));
        t as f64 / (b2 * r as f64 + h as f64)
    };
    let mut picks = vec![0; candidates.len()];
    let mut lambda = ratio(&picks);
    loop {
        let next = argmax(&|c| c.tp as f64 - lambda * b2 * c.n_ref as f64);
        let value = ratio(&next);
        if value > lambda {
            picks = next;
            lambda = value;
        } else {
            return picks;
        }
    }
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

/// Aligned plain-text report; `per_type` adds the type breakdown.
pub fn render_table(report: &ScoreReport, per_type: bool) -> String {
    let f_label = format!("F{}", report.beta);
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}  selection: {}", report.mode, report.selection.name());
    let _ = writeln!(out, "{:<8}{:<8}{:<8}{:<8}{:<8}{}", "TP", "FP", "FN", "Prec", "Rec", f_label);
    let c = report.counts;
    let _ = writeln!(
        out,
        "{:<8}{:<8}{:<8}{:<8}{:<8}{}",
        c.tp,
        c.fp,
        c.fn_,
        fmt4(report.prf.precision),
        fmt4(report.prf.recall),
        fmt4(report.prf.f)
    );
    let mut section = |title: &str, rows: &BTreeMap<String, TypeScore>| {
        let width = rows.keys().map(|k| k.chars().count()).max().unwrap_or(0).max(title.len()) + 2;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<width$}{:<8}{:<8}{:<8}{:<8}{:<8}{}",
            title, "TP", "FP", "FN", "Prec", "Rec", f_label
        );
        for (k, s) in rows {
            let _ = writeln!(
                out,
                "{:<width$}{:<8}{:<8}{:<8}{:<8}{:<8}{}",
                k,
                s.counts.tp,
                s.counts.fp,
                s.counts.fn_,
                fmt4(s.prf.precision),
                fmt4(s.prf.recall),
                fmt4(s.prf.f)
            );
        }
    };
    section("Operation", &report.per_operation);
    if per_type {
        section("Type", &report.per_type);
    }
    out
}

/// One `key=value` per line.
pub fn render_kv(report: &ScoreReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode={}", report.mode);
    let _ = writeln!(out, "selection={}", report.selection.name());
    let _ = writeln!(out, "beta={}", report.beta);
    let row = |out: &mut String, prefix: &str, c: &Counts, p: &Prf<f64>| {
        let _ = writeln!(out, "{prefix}tp={}", c.tp);
        let _ = writeln!(out, "{prefix}fp={}", c.fp);
        let _ = writeln!(out, "{prefix}fn={}", c.fn_);
        let _ = writeln!(out, "{prefix}precision={}", fmt4(p.precision));
        let _ = writeln!(out, "{prefix}recall={}", fmt4(p.recall));
        let _ = writeln!(out, "{prefix}f={}", fmt4(p.f));
    };
    row(&mut out, "", &report.counts, &report.prf);
    for (k, s) in &report.per_operation {
        row(&mut out, &format!("operation[{k}]."), &s.counts, &s.prf);
    }
    for (k, s) in &report.per_type {
        row(&mut out, &format!("type[{k}]."), &s.counts, &s.prf);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub missing: usize,
    pub replacement: usize,
    pub unnecessary: usize,
    /// Annotations whose type has no M/R/U prefix.
    pub other: usize,
    pub total: usize,
    /// Category frequencies, operation prefix removed; descending, ties
    /// alphabetical.
    pub top: Vec<(String, usize)>,
}

/// Counts the non-noop annotations of one annotator (0 by default).
pub fn corpus_stats(entries: &[M2Entry], top_n: usize, annotator: Option<u32>) -> CorpusStats {
    use crate::edit::Operation;
    let id = annotator.unwrap_or(0);
    let mut stats = CorpusStats::default();
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for a in entries.iter().flat_map(|e| e.edits_of(id)) {
        match a.operation() {
            Some(Operation::Missing) => stats.missing += 1,
            Some(Operation::Replacement) => stats.replacement += 1,
            Some(Operation::Unnecessary) => stats.unnecessary += 1,
            None => stats.other += 1,
        }
        stats.total += 1;
        *freq.entry(a.category()).or_default() += 1;
    }
    let mut top: Vec<(String, usize)> = freq.into_iter().map(|(k, n)| (k.to_string(), n)).collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    top.truncate(top_n);
    stats.top = top;
    stats
}

pub fn render_stats(stats: &CorpusStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8}{:<8}{:<8}{:<8}Total", "M", "R", "U", "Other");
    let _ = writeln!(
        out,
        "{:<8}{:<8}{:<8}{:<8}{}",
        stats.missing, stats.replacement, stats.unnecessary, stats.other, stats.total
    );
    if !stats.top.is_empty() {
        let width = stats.top.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0).max(4) + 2;
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<4}{:<width$}Count", "#", "Type");
        for (rank, (k, n)) in stats.top.iter().enumerate() {
            let _ = writeln!(out, "{:<4}{:<width$}{}", rank + 1, k, n);
        }
    }
    out
}
