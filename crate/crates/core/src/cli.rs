//! Command-line front end: `annotate`, `score` and `stats`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::annotate::{annotate_corpus, Settings};
use crate::conllu::parse_conllu_with;
use crate::m2::{parse_m2, write_m2, M2Entry};
use crate::profile::Profile;
use crate::scorer::{corpus_stats, evaluate_corpus, render_kv, render_stats, render_table, MatchMode, Selection};
use crate::similarity::ThresholdConfig;

#[derive(Debug, Parser)]
#[command(name = "gecanno", version, about = "Grammatical error annotation and M2 scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate parallel CoNLL-U files and write M2.
    Annotate(AnnotateArgs),
    /// Score hypothesis M2 against reference M2.
    Score(ScoreArgs),
    /// Operation counts and most frequent types of an M2 file.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MergeRule {
    Transpose,
    WordBoundary,
    SamePos,
    VerbPhrase,
    PunctCase,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Original sentences.
    pub orig: PathBuf,
    /// Corrected sentences, paired with the originals by position.
    pub corr: PathBuf,
    /// Bundled profile name (generic, english, korean) or a profile file.
    #[arg(long, default_value = "generic")]
    pub profile: String,
    /// Phonetic similarity threshold, in [0, 1].
    #[arg(long)]
    pub alpha1: Option<f64>,
    /// Shape similarity threshold, in [0, 1].
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub annotator: u32,
    /// Merge rule to switch off; repeatable.
    #[arg(long = "no-merge", value_enum)]
    pub no_merge: Vec<MergeRule>,
    /// Write a noop annotation for sentences without edits.
    #[arg(long)]
    pub noop: bool,
    /// Prefix the output with '#' comment lines recording the settings.
    #[arg(long)]
    pub provenance: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Kv,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub hyp: PathBuf,
    pub reference: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// span, span+type, span+correction or span+correction+type.
    #[arg(long, default_value = "span+correction")]
    pub mode: MatchMode,
    /// How a reference annotator is chosen: corpus or sentence.
    #[arg(long = "select", default_value = "corpus")]
    pub selection: Selection,
    /// Add the per-type table.
    #[arg(long)]
    pub per_type: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Annotator to count (default 0).
    #[arg(long)]
    pub annotator: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn input(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", context.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(path, e))
}

fn read_m2(path: &Path) -> Result<Vec<M2Entry>, CliError> {
    parse_m2(&read(path)?).map_err(|e| input(path, e))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("standard output: {e}"))),
    }
}

/// Runs a parsed command, writing results to `stdout` unless `--out` is set.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Annotate(args) => cmd_annotate(&args, stdout),
        Command::Score(args) => cmd_score(&args, stdout),
        Command::Stats(args) => cmd_stats(&args, stdout),
    }
}

pub fn cmd_annotate(args: &AnnotateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut profile = Profile::resolve(&args.profile).map_err(|e| CliError::Input(e.to_string()))?;
    let thresholds = ThresholdConfig::new(
        args.alpha1.unwrap_or(profile.thresholds.alpha1),
        args.alpha2.unwrap_or(profile.thresholds.alpha2),
    );
    thresholds.validate().map_err(|e| CliError::Input(e.to_string()))?;
    profile.thresholds = thresholds;

    let mut settings = Settings::<f64>::for_profile(&profile);
    for rule in &args.no_merge {
        let flag = match rule {
            MergeRule::Transpose => &mut settings.merge.transpose,
            MergeRule::WordBoundary => &mut settings.merge.word_boundary,
            MergeRule::SamePos => &mut settings.merge.same_pos,
            MergeRule::VerbPhrase => &mut settings.merge.verb_phrase,
            MergeRule::PunctCase => &mut settings.merge.punct_case,
        };
        *flag = false;
    }

    let tags = profile.tagset();
    let orig = parse_conllu_with(&read(&args.orig)?, &tags).map_err(|e| input(&args.orig, e))?;
    let corr = parse_conllu_with(&read(&args.corr)?, &tags).map_err(|e| input(&args.corr, e))?;
    let entries = annotate_corpus(&orig, &corr, &profile, &settings, args.annotator, args.noop)
        .map_err(|e| CliError::Input(e.to_string()))?;

    let mut text = String::new();
    if args.provenance {
        text.push_str(&provenance(&profile, &settings));
    }
    text.push_str(&write_m2(&entries));
    emit(&text, args.out.as_deref(), stdout)
}

fn provenance(profile: &Profile, s: &Settings<f64>) -> String {
    let c = &s.costs;
    let m = &s.merge;
    let mut out = String::new();
    let _ = writeln!(out, "# gecanno {} annotate", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "# profile={} alpha1={} alpha2={}",
        profile.name, s.thresholds.alpha1, s.thresholds.alpha2
    );
    let _ = writeln!(
        out,
        "# costs del={} ins={} lemma_mismatch={} pos_same={} pos_both_content={} pos_other={} transpose_base={} window={}",
        c.del_cost,
        c.ins_cost,
        c.lemma_mismatch_cost,
        c.pos_same_cost,
        c.pos_both_content_cost,
        c.pos_other_cost,
        c.transpose_base,
        c.window
    );
    let _ = writeln!(
        out,
        "# merge transpose={} word_boundary={} same_pos={} verb_phrase={} punct_case={}",
        m.transpose, m.word_boundary, m.same_pos, m.verb_phrase, m.punct_case
    );
    out
}

pub fn cmd_score(args: &ScoreArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let hyp = read_m2(&args.hyp)?;
    let reference = read_m2(&args.reference)?;
    let report = evaluate_corpus(&hyp, &reference, args.beta, args.mode, args.selection)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let text = match args.format {
        ReportFormat::Table => render_table(&report, args.per_type),
        ReportFormat::Kv => render_kv(&report),
    };
    emit(&text, args.out.as_deref(), stdout)
}

pub fn cmd_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let entries = read_m2(&args.file)?;
    let stats = corpus_stats(&entries, args.top, args.annotator);
    emit(&render_stats(&stats), args.out.as_deref(), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<(), CliError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("gecanno").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["gecanno", "score", "h", "r", "--mode", "span+type", "--select", "sentence"]).unwrap();
        match cli.command {
            Command::Score(a) => {
                assert_eq!(a.mode, MatchMode::SpanType);
                assert_eq!(a.selection, Selection::Sentence);
                assert_eq!(a.beta, 0.5);
            }
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["gecanno", "score", "h", "r", "--mode", "loose"]).is_err());
        let cli = Cli::try_parse_from(["gecanno", "annotate", "a", "b", "--no-merge", "verb-phrase", "--no-merge", "transpose"]).unwrap();
        match cli.command {
            Command::Annotate(a) => assert_eq!(a.no_merge, vec![MergeRule::VerbPhrase, MergeRule::Transpose]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn missing_files_are_input_errors() {
        let (r, _) = run_args(&["stats", "/nonexistent/file.m2"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn out_of_range_threshold_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("a.conllu");
        std::fs::write(&f, "").unwrap();
        let f = f.to_str().unwrap();
        let (r, _) = run_args(&["annotate", f, f, "--alpha1", "1.5"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, out) = run_args(&["annotate", f, f, "--provenance"]);
        r.unwrap();
        assert!(out.starts_with("# gecanno"));
    }
}
