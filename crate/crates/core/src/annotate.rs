//! End-to-end annotation of sentence pairs: align, merge, classify.

use crate::align::{align, CostConfig};
use crate::conllu::{sentence_pairs, PairingError, Sentence};
use crate::edit::{merge_edits, Edit, MergeRules};
use crate::m2::{entry_from_edits, M2Entry};
use crate::profile::Profile;
use crate::similarity::ThresholdConfig;
use crate::typology::{classify, ErrorType};
use crate::Scalar;

#[derive(Debug, Clone)]
pub struct Settings<S> {
    pub costs: CostConfig<S>,
    pub merge: MergeRules,
    pub thresholds: ThresholdConfig<S>,
}

impl<S: Scalar> Settings<S> {
    /// Default costs and merge rules with the profile's thresholds.
    pub fn for_profile(profile: &Profile) -> Self {
        Self {
            costs: CostConfig::default(),
            merge: MergeRules::default(),
            thresholds: profile.thresholds(),
        }
    }
}

/// Typed edits turning `src` into `tgt`, in source order.
pub fn annotate_sentence<S: Scalar>(
    src: &Sentence,
    tgt: &Sentence,
    profile: &Profile,
    settings: &Settings<S>,
) -> Vec<(Edit, ErrorType)> {
    let ops = align(&src.tokens, &tgt.tokens, &settings.costs);
    merge_edits(&ops, &src.tokens, &tgt.tokens, &settings.merge)
        .into_iter()
        .map(|edit| {
            let ty = classify(&edit, src, tgt, profile, &settings.thresholds, profile.providers());
            (edit, ty)
        })
        .collect()
}

/// Pairs sentences by position and annotates each pair.
pub fn annotate_corpus<S: Scalar>(
    orig: &[Sentence],
    corr: &[Sentence],
    profile: &Profile,
    settings: &Settings<S>,
    annotator: u32,
    noop: bool,
) -> Result<Vec<M2Entry>, PairingError> {
    Ok(sentence_pairs(orig, corr)?
        .into_iter()
        .map(|(src, tgt)| {
            let edits = annotate_sentence(src, tgt, profile, settings);
            entry_from_edits(&src.forms(), &edits, annotator, noop)
                .expect("merged edits are sorted, disjoint and in range")
        })
        .collect())
}
