//! Brute-force oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use gecanno::align::CostConfig;
use gecanno::conllu::{Features, Head, Sentence, Token};
use gecanno::m2::Annotation;
use gecanno::scorer::MatchMode;
use gecanno::Scalar;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

// ---- alignment oracle -------------------------------------------------------

/// Longest common subsequence by trying every subsequence of `a`.
fn lcs_exhaustive(a: &[char], b: &[char]) -> usize {
    fn is_subseq(needle: &[char], hay: &[char]) -> bool {
        let mut it = hay.iter();
        needle.iter().all(|c| it.any(|h| h == c))
    }
    let n = a.len();
    (0u32..1 << n)
        .filter_map(|mask| {
            let sub: Vec<char> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| a[i]).collect();
            is_subseq(&sub, b).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

const CONTENT: [&str; 5] = ["NOUN", "VERB", "ADJ", "ADV", "PROPN"];

/// Substitution cost written out from the cost rules.
pub fn oracle_sub<S: Scalar>(a: &Token, b: &Token, cfg: &CostConfig<S>) -> S {
    if a.form == b.form {
        return S::zero();
    }
    let ca: Vec<char> = a.form.chars().collect();
    let cb: Vec<char> = b.form.chars().collect();
    let char_sim = S::ratio(2 * lcs_exhaustive(&ca, &cb), ca.len() + cb.len());
    let lemma = if a.lemma == b.lemma { S::zero() } else { cfg.lemma_mismatch_cost };
    let pos = if a.upos == b.upos {
        cfg.pos_same_cost
    } else if CONTENT.contains(&a.upos.as_str()) && CONTENT.contains(&b.upos.as_str()) {
        cfg.pos_both_content_cost
    } else {
        cfg.pos_other_cost
    };
    lemma + pos + (S::one() - char_sim)
}

fn is_transposition(a: &[Token], b: &[Token]) -> bool {
    let la: Vec<String> = a.iter().map(|t| t.form.to_lowercase()).collect();
    let lb: Vec<String> = b.iter().map(|t| t.form.to_lowercase()).collect();
    if la == lb {
        return false;
    }
    // multiset equality by removing matches one at a time
    let mut rest = lb.clone();
    for w in &la {
        match rest.iter().position(|x| x == w) {
            Some(p) => {
                rest.remove(p);
            }
            None => return false,
        }
    }
    rest.is_empty()
}

/// Minimum alignment cost over every complete edit script, enumerated
/// without memoization.
pub fn exhaustive_min_cost<S: Scalar>(src: &[Token], tgt: &[Token], cfg: &CostConfig<S>) -> S {
    fn go<S: Scalar>(src: &[Token], tgt: &[Token], cfg: &CostConfig<S>) -> S {
        if src.is_empty() && tgt.is_empty() {
            return S::zero();
        }
        let mut options = Vec::new();
        if !src.is_empty() {
            options.push(cfg.del_cost + go(&src[1..], tgt, cfg));
        }
        if !tgt.is_empty() {
            options.push(cfg.ins_cost + go(src, &tgt[1..], cfg));
        }
        if !src.is_empty() && !tgt.is_empty() {
            options.push(oracle_sub(&src[0], &tgt[0], cfg) + go(&src[1..], &tgt[1..], cfg));
            for k in 2..=cfg.window.min(src.len()).min(tgt.len()) {
                if is_transposition(&src[..k], &tgt[..k]) {
                    let c = cfg.transpose_base * S::from_count(k - 1);
                    options.push(c + go(&src[k..], &tgt[k..], cfg));
                }
            }
        }
        options.into_iter().reduce(|a, b| a.min_of(b)).unwrap()
    }
    go(src, tgt, cfg)
}

// ---- matching oracle --------------------------------------------------------

fn same_key(h: &Annotation, r: &Annotation, mode: MatchMode) -> bool {
    let ty = matches!(mode, MatchMode::SpanType | MatchMode::SpanCorrectionType);
    let corr = matches!(mode, MatchMode::SpanCorrection | MatchMode::SpanCorrectionType);
    h.span == r.span && (!ty || h.type_string == r.type_string) && (!corr || h.correction == r.correction)
}

/// Maximum bipartite matching size by trying every assignment.
pub fn brute_force_tp(hyp: &[Annotation], reference: &[Annotation], mode: MatchMode) -> usize {
    fn go(i: usize, hyp: &[Annotation], reference: &[Annotation], used: &mut Vec<bool>, mode: MatchMode) -> usize {
        if i == hyp.len() {
            return 0;
        }
        let mut best = go(i + 1, hyp, reference, used, mode);
        for j in 0..reference.len() {
            if !used[j] && same_key(&hyp[i], &reference[j], mode) {
                used[j] = true;
                best = best.max(1 + go(i + 1, hyp, reference, used, mode));
                used[j] = false;
            }
        }
        best
    }
    go(0, hyp, reference, &mut vec![false; reference.len()], mode)
}

/// Edits drawn from a small space so that collisions are frequent.
pub fn random_annotations(rng: &mut StdRng, max: usize, annotator: u32) -> Vec<Annotation> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let s = rng.gen_range(0..3);
            let e = s + rng.gen_range(0..2);
            let ty = *["R:NOUN", "R:VERB", "M:DET"].choose(rng).unwrap();
            let corr = *["a", "b"].choose(rng).unwrap();
            Annotation::new(s, e, ty, corr, annotator)
        })
        .collect()
}

// ---- random sentences -------------------------------------------------------

const LEXICON: [(&str, &str, &str, &str); 16] = [
    ("the", "the", "DET", "Definite=Def|PronType=Art"),
    ("a", "a", "DET", "Definite=Ind|PronType=Art"),
    ("cat", "cat", "NOUN", "Number=Sing"),
    ("cats", "cat", "NOUN", "Number=Plur"),
    ("Cat", "cat", "NOUN", "Number=Sing"),
    ("sat", "sit", "VERB", "Tense=Past|VerbForm=Fin"),
    ("sits", "sit", "VERB", "Number=Sing|Person=3|Tense=Pres|VerbForm=Fin"),
    ("is", "be", "AUX", "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin"),
    ("are", "be", "AUX", "Mood=Ind|Tense=Pres|VerbForm=Fin"),
    ("on", "on", "ADP", "_"),
    ("mat", "mat", "NOUN", "Number=Sing"),
    ("ice", "ice", "NOUN", "Number=Sing"),
    ("cream", "cream", "NOUN", "Number=Sing"),
    ("icecream", "icecream", "NOUN", "Number=Sing"),
    (",", ",", "PUNCT", "_"),
    (".", ".", "PUNCT", "_"),
];

pub fn lexicon_token(i: usize) -> Token {
    let (form, lemma, upos, feats) = LEXICON[i];
    Token::new(form, lemma, upos).with_feats(Features::parse(feats).unwrap())
}

pub fn random_tokens(rng: &mut StdRng, max_len: usize) -> Vec<Token> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| lexicon_token(rng.gen_range(0..LEXICON.len()))).collect()
}

/// A corrupted copy of `tokens`: random deletions, insertions, swaps and
/// substitutions.
pub fn perturb(rng: &mut StdRng, tokens: &[Token]) -> Vec<Token> {
    let mut out = tokens.to_vec();
    for _ in 0..rng.gen_range(0..4) {
        match rng.gen_range(0..4) {
            0 if !out.is_empty() => {
                let i = rng.gen_range(0..out.len());
                out.remove(i);
            }
            1 => {
                let i = rng.gen_range(0..=out.len());
                out.insert(i, lexicon_token(rng.gen_range(0..LEXICON.len())));
            }
            2 if out.len() > 1 => {
                let i = rng.gen_range(0..out.len() - 1);
                out.swap(i, i + 1);
            }
            _ if !out.is_empty() => {
                let i = rng.gen_range(0..out.len());
                out[i] = lexicon_token(rng.gen_range(0..LEXICON.len()));
            }
            _ => {}
        }
    }
    out
}

/// A sentence with every CoNLL-U column populated.
pub fn random_full_sentence(rng: &mut StdRng, id: usize) -> Sentence {
    let mut tokens = random_tokens(rng, 8);
    if tokens.is_empty() {
        tokens.push(lexicon_token(2));
    }
    let n = tokens.len();
    let root = rng.gen_range(0..n);
    for (i, t) in tokens.iter_mut().enumerate() {
        t.xpos = ["NN", "VB", "_", "DT"].choose(rng).unwrap().to_string();
        if i == root {
            t.head = Head::Root;
            t.deprel = "root".into();
        } else {
            t.head = Head::Index(rng.gen_range(0..n));
            t.deprel = ["nsubj", "obj", "det", "case:poss", "punct"].choose(rng).unwrap().to_string();
        }
        t.deps = if rng.gen_bool(0.3) { format!("{}:dep", rng.gen_range(0..=n)) } else { "_".into() };
        t.misc = if rng.gen_bool(0.3) { "SpaceAfter=No".into() } else { "_".into() };
    }
    let mut s = Sentence::new(format!("s{id}"), tokens);
    s.comments = vec![format!("sent_id = s{id}"), format!("text = {}", s.forms().join(" "))];
    s
}
