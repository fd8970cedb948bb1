//! Token alignment with a linguistically weighted Damerau-Levenshtein cost.
//!
//! Substitution cost looks at lemma, UPOS and character overlap so that
//! related tokens (`meet`/`meeting`) align before unrelated ones. Reordered
//! spans whose lower-cased token multisets agree can be covered by a single
//! transposition.

use std::collections::HashMap;
use std::ops::Range;

use thiserror::Error;

use crate::conllu::Token;
use crate::lcs::lcs_ratio;
use crate::Scalar;

/// Open-class tags treated as "both content words" by the POS cost.
pub const CONTENT_UPOS: [&str; 4] = ["NOUN", "VERB", "ADJ", "ADV"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Match,
    Sub,
    Ins,
    Del,
    Transpose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentOp<S> {
    pub kind: OpKind,
    pub src: Range<usize>,
    pub tgt: Range<usize>,
    pub cost: S,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostConfigError {
    #[error("cost weight {name} must be non-negative")]
    Negative { name: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostConfig<S> {
    pub del_cost: S,
    pub ins_cost: S,
    pub lemma_mismatch_cost: S,
    pub pos_same_cost: S,
    pub pos_both_content_cost: S,
    pub pos_other_cost: S,
    pub transpose_base: S,
    /// Longest span considered for a transposition; below 2 disables them.
    pub window: usize,
}

impl<S: Scalar> Default for CostConfig<S> {
    fn default() -> Self {
        Self {
            del_cost: S::one(),
            ins_cost: S::one(),
            lemma_mismatch_cost: S::ratio(499, 1000),
            pos_same_cost: S::zero(),
            pos_both_content_cost: S::ratio(1, 4),
            pos_other_cost: S::ratio(1, 2),
            transpose_base: S::one(),
            window: 4,
        }
    }
}

impl<S: Scalar> CostConfig<S> {
    pub fn validate(&self) -> Result<(), CostConfigError> {
        let fields = [
            ("del_cost", self.del_cost),
            ("ins_cost", self.ins_cost),
            ("lemma_mismatch_cost", self.lemma_mismatch_cost),
            ("pos_same_cost", self.pos_same_cost),
            ("pos_both_content_cost", self.pos_both_content_cost),
            ("pos_other_cost", self.pos_other_cost),
            ("transpose_base", self.transpose_base),
        ];
        match fields.iter().find(|(_, v)| *v < S::zero()) {
            Some((name, _)) => Err(CostConfigError::Negative { name }),
            None => Ok(()),
        }
    }
}

/// Character overlap in `[0, 1]`: `2 * LCS / (|a| + |b|)` over chars.
pub fn char_similarity<S: Scalar>(a: &str, b: &str) -> S {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lcs_ratio(&a, &b)
}

fn is_content(upos: &str) -> bool {
    CONTENT_UPOS.contains(&upos)
}

pub fn sub_cost<S: Scalar>(a: &Token, b: &Token, cfg: &CostConfig<S>) -> S {
    if a.form == b.form {
        return S::zero();
    }
    let lemma = if a.lemma == b.lemma {
        S::zero()
    } else {
        cfg.lemma_mismatch_cost
    };
    let pos = if a.upos == b.upos {
        cfg.pos_same_cost
    } else if is_content(&a.upos) && is_content(&b.upos) {
        cfg.pos_both_content_cost
    } else {
        cfg.pos_other_cost
    };
    lemma + pos + (S::one() - char_similarity::<S>(&a.form, &b.form))
}

fn lowered(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.form.to_lowercase()).collect()
}

/// Every span pair of length `2..=window` whose lower-cased token multisets
/// agree while their order differs.
pub fn detect_transpositions<S: Scalar>(
    src: &[Token],
    tgt: &[Token],
    window: usize,
    transpose_base: S,
) -> Vec<AlignmentOp<S>> {
    let src_lc = lowered(src);
    let tgt_lc = lowered(tgt);
    let mut found = Vec::new();
    for k in 2..=window {
        if k > src.len() || k > tgt.len() {
            break;
        }
        for i in 0..=src.len() - k {
            let s = &src_lc[i..i + k];
            let mut s_sorted = s.to_vec();
            s_sorted.sort();
            for j in 0..=tgt.len() - k {
                let t = &tgt_lc[j..j + k];
                if s == t {
                    continue;
                }
                let mut t_sorted = t.to_vec();
                t_sorted.sort();
                if s_sorted == t_sorted {
                    found.push(AlignmentOp {
                        kind: OpKind::Transpose,
                        src: i..i + k,
                        tgt: j..j + k,
                        cost: transpose_base * S::from_count(k - 1),
                    });
                }
            }
        }
    }
    found
}

/// Minimum-cost alignment of `src` onto `tgt`.
///
/// At equal cost the traceback prefers MATCH, then SUB, TRANSPOSE, DEL and
/// INS; among transpositions the longer one (smaller source start) wins.
pub fn align<S: Scalar>(src: &[Token], tgt: &[Token], cfg: &CostConfig<S>) -> Vec<AlignmentOp<S>> {
    let (n, m) = (src.len(), tgt.len());
    let mut ending_at: HashMap<(usize, usize), Vec<AlignmentOp<S>>> = HashMap::new();
    for op in detect_transpositions(src, tgt, cfg.window, cfg.transpose_base) {
        ending_at.entry((op.src.end, op.tgt.end)).or_default().push(op);
    }
    for ops in ending_at.values_mut() {
        ops.sort_by_key(|op| op.src.start);
    }

    let mut cost = vec![vec![S::zero(); m + 1]; n + 1];
    for i in 1..=n {
        cost[i][0] = cost[i - 1][0] + cfg.del_cost;
    }
    for j in 1..=m {
        cost[0][j] = cost[0][j - 1] + cfg.ins_cost;
    }
    for i in 1..=n {
        for j in 1..=m {
            let mut best = cost[i - 1][j - 1] + sub_cost(&src[i - 1], &tgt[j - 1], cfg);
            if let Some(ops) = ending_at.get(&(i, j)) {
                for op in ops {
                    best = best.min_of(cost[op.src.start][op.tgt.start] + op.cost);
                }
            }
            best = best.min_of(cost[i - 1][j] + cfg.del_cost);
            best = best.min_of(cost[i][j - 1] + cfg.ins_cost);
            cost[i][j] = best;
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i][j];
        if i > 0 && j > 0 {
            let c = sub_cost(&src[i - 1], &tgt[j - 1], cfg);
            if cost[i - 1][j - 1] + c == here {
                let kind = if src[i - 1].form == tgt[j - 1].form {
                    OpKind::Match
                } else {
                    OpKind::Sub
                };
                ops.push(AlignmentOp {
                    kind,
                    src: i - 1..i,
                    tgt: j - 1..j,
                    cost: c,
                });
                i -= 1;
                j -= 1;
                continue;
            }
            let transposed = ending_at.get(&(i, j)).and_then(|cands| {
                cands
                    .iter()
                    .find(|op| cost[op.src.start][op.tgt.start] + op.cost == here)
            });
            if let Some(op) = transposed {
                ops.push(op.clone());
                i = op.src.start;
                j = op.tgt.start;
                continue;
            }
        }
        if i > 0 && cost[i - 1][j] + cfg.del_cost == here {
            ops.push(AlignmentOp {
                kind: OpKind::Del,
                src: i - 1..i,
                tgt: j..j,
                cost: cfg.del_cost,
            });
            i -= 1;
        } else {
            ops.push(AlignmentOp {
                kind: OpKind::Ins,
                src: i..i,
                tgt: j - 1..j,
                cost: cfg.ins_cost,
            });
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

pub fn alignment_cost<S: Scalar>(ops: &[AlignmentOp<S>]) -> S {
    ops.iter().fold(S::zero(), |acc, op| acc + op.cost)
}
