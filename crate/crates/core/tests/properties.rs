mod common;

use common::*;
use gecanno::annotate::{annotate_corpus, annotate_sentence, Settings};
use gecanno::conllu::Sentence;
use gecanno::edit::Operation;
use gecanno::m2::{Annotation, M2Entry};
use gecanno::profile::{Profile, BUILTIN_PROFILES};
use gecanno::scorer::{evaluate_corpus, f_beta, MatchMode, Selection};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn edits_are_well_formed() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in BUILTIN_PROFILES {
        let profile = Profile::builtin(name).unwrap();
        let settings = Settings::<f64>::for_profile(&profile);
        for case in 0..1000 {
            let src = Sentence::new("s", random_tokens(&mut rng, 8));
            let tgt = Sentence::new("t", perturb(&mut rng, &src.tokens));
            let edits = annotate_sentence(&src, &tgt, &profile, &settings);
            if src.forms() == tgt.forms() {
                assert!(edits.is_empty(), "{name} case {case}: edits on identical forms");
            }
            let mut last_src = 0;
            let mut last_tgt = 0;
            for (e, ty) in &edits {
                assert!(e.src.end <= src.len() && e.tgt.end <= tgt.len());
                assert!(!(e.src.is_empty() && e.tgt.is_empty()), "{name} case {case}: empty edit");
                assert!(e.src.start >= last_src && e.tgt.start >= last_tgt, "{name} case {case}: edits out of order");
                last_src = e.src.end;
                last_tgt = e.tgt.end;
                assert_eq!(e.operation, Operation::of_spans(&e.src, &e.tgt));
                assert_eq!(e.correction, tgt.forms()[e.tgt.clone()].join(" "));
                assert!(ty.validate().is_ok(), "{name} case {case}: malformed type {ty}");
            }
        }
    }
}

#[test]
fn annotation_is_deterministic() {
    let mut rng = StdRng::seed_from_u64(12);
    let orig: Vec<Sentence> = (0..200).map(|i| Sentence::new(format!("{i}"), random_tokens(&mut rng, 10))).collect();
    let corr: Vec<Sentence> = orig
        .iter()
        .map(|s| Sentence::new(s.sent_id.clone(), perturb(&mut rng, &s.tokens)))
        .collect();
    for name in BUILTIN_PROFILES {
        let profile = Profile::builtin(name).unwrap();
        let settings = Settings::<f64>::for_profile(&profile);
        let a = annotate_corpus(&orig, &corr, &profile, &settings, 0, true).unwrap();
        let b = annotate_corpus(&orig, &corr, &profile, &settings, 0, true).unwrap();
        assert_eq!(gecanno::m2::write_m2(&a), gecanno::m2::write_m2(&b));
    }
}

fn random_multi_reference(rng: &mut StdRng, sentences: usize) -> (Vec<M2Entry>, Vec<M2Entry>) {
    let tokens = ["a", "b", "c", "d"];
    let mut hyp = Vec::new();
    let mut reference = Vec::new();
    for _ in 0..sentences {
        let mut h = M2Entry::new(&tokens);
        h.annotations = random_annotations(rng, 4, 0);
        let mut r = M2Entry::new(&tokens);
        for id in 0..rng.gen_range(1..=3u32) {
            let anns = random_annotations(rng, 4, id);
            if anns.is_empty() {
                r.annotations.push(Annotation::noop(id));
            }
            r.annotations.extend(anns);
        }
        hyp.push(h);
        reference.push(r);
    }
    (hyp, reference)
}

/// Corpus F for a fixed annotator choice per sentence.
fn forced_f(hyp: &[M2Entry], reference: &[M2Entry], pick: &[u32], mode: MatchMode) -> f64 {
    let forced: Vec<M2Entry> = reference
        .iter()
        .zip(pick)
        .map(|(r, id)| {
            let mut e = r.clone();
            e.annotations.retain(|a| a.annotator == *id);
            e
        })
        .collect();
    evaluate_corpus(hyp, &forced, 0.5, mode, Selection::Corpus).unwrap().prf.f
}

#[test]
fn corpus_selection_is_optimal() {
    let mut rng = StdRng::seed_from_u64(13);
    for case in 0..300 {
        let n = rng.gen_range(1..=4);
        let (hyp, reference) = random_multi_reference(&mut rng, n);
        let mode = MatchMode::ALL[case % 4];
        let report = evaluate_corpus(&hyp, &reference, 0.5, mode, Selection::Corpus).unwrap();

        // every combination of annotators
        let choices: Vec<Vec<u32>> = reference.iter().map(|r| r.annotators()).collect();
        let mut best = f64::NEG_INFINITY;
        let mut idx = vec![0; choices.len()];
        loop {
            let pick: Vec<u32> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            best = best.max(forced_f(&hyp, &reference, &pick, mode));
            let mut d = 0;
            while d < idx.len() && idx[d] + 1 == choices[d].len() {
                idx[d] = 0;
                d += 1;
            }
            if d == idx.len() {
                break;
            }
            idx[d] += 1;
        }
        assert!((report.prf.f - best).abs() < 1e-12, "case {case}: {} vs best {best}", report.prf.f);

        let first: Vec<u32> = choices.iter().map(|c| c[0]).collect();
        assert!(report.prf.f >= forced_f(&hyp, &reference, &first, mode) - 1e-12);

        let h: usize = hyp.iter().map(|e| e.edits_of(0).len()).sum();
        let r: usize = reference.iter().zip(&report.chosen).map(|(e, id)| e.edits_of(*id).len()).sum();
        assert_eq!(report.counts.tp + report.counts.fp, h);
        assert_eq!(report.counts.tp + report.counts.fn_, r);
        assert!((report.prf.f - f_beta(report.counts.tp, report.counts.fp, report.counts.fn_, 0.5).f).abs() < 1e-12);
    }
}

#[test]
fn sentence_selection_maximizes_each_sentence() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..200 {
        let (hyp, reference) = random_multi_reference(&mut rng, 3);
        let report = evaluate_corpus(&hyp, &reference, 0.5, MatchMode::SpanCorrection, Selection::Sentence).unwrap();
        for ((h, r), chosen) in hyp.iter().zip(&reference).zip(&report.chosen) {
            let f_of = |id: u32| {
                let mut only = r.clone();
                only.annotations.retain(|a| a.annotator == id);
                evaluate_corpus(std::slice::from_ref(h), &[only], 0.5, MatchMode::SpanCorrection, Selection::Corpus)
                    .unwrap()
                    .prf
                    .f
            };
            let ids = r.annotators();
            let best = ids.iter().map(|&id| f_of(id)).fold(f64::NEG_INFINITY, f64::max);
            let first_best = *ids.iter().find(|&&id| f_of(id) == best).unwrap();
            assert_eq!(*chosen, first_best);
        }
    }
}
