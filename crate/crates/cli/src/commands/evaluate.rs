//! `gecstrat evaluate`: score hypothesis corrections against reference M2
//! files, stratified by proficiency level and error type.

use std::path::{Path, PathBuf};

use gecstrat_core::report::JsonReport;
use gecstrat_core::score::{aggregate, compare_sentence, MatchMode, SentenceComparison, StratifiedReport};
use gecstrat_core::{extract_edits, Beta, Edit, Lexicon, M2Sentence, ProficiencyLevel};

use crate::commands::{file_name, load_m2_file, parse_betas};
use crate::config::RunConfig;
use crate::table::{report_rendered, OutputFormat};
use crate::{emit, CliError};

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Hypothesis file(s): parallel plain text (one corrected sentence per
    /// reference sentence) or M2.
    #[arg(long, required = true)]
    pub hyp: Vec<PathBuf>,
    /// Reference M2 file(s), one per hypothesis file.
    #[arg(long = "ref", required = true)]
    pub reference: Vec<PathBuf>,
    /// Proficiency level per pair (A/B/C/N); inferred from the reference
    /// file name when omitted.
    #[arg(long)]
    pub level: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Correction)]
    pub mode: Mode,
    /// Comma-separated F-beta weights, e.g. `0.5,1,2`.
    #[arg(long)]
    pub betas: Option<String>,
    /// Add a label-by-label table: `*`, an op wildcard like `M:*`, or an
    /// exact type like `R:DET`.
    #[arg(long, num_args = 0..=1, default_missing_value = "*")]
    pub labels: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Additionally write the full-precision JSON report here.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Correction,
    Detection,
}

impl From<Mode> for MatchMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Correction => MatchMode::Correction,
            Mode::Detection => MatchMode::Detection,
        }
    }
}

/// Hypothesis edits for every reference sentence, either extracted from a
/// parallel text file or taken from an M2 file's lowest annotator.
pub fn hypothesis_edits(
    hyp_path: &Path,
    references: &[M2Sentence],
    config: &RunConfig,
    lexicon: &Lexicon,
) -> Result<Vec<Vec<Edit>>, CliError> {
    if hyp_path.extension().is_some_and(|ext| ext == "m2") {
        let hyp_sentences = load_m2_file(hyp_path)?;
        if hyp_sentences.len() != references.len() {
            return Err(CliError::Eval(format!(
                "{}: hypothesis has {} sentences but reference has {}",
                hyp_path.display(),
                hyp_sentences.len(),
                references.len()
            )));
        }
        let mut edits = Vec::with_capacity(references.len());
        for (idx, (hyp, reference)) in hyp_sentences.iter().zip(references).enumerate() {
            if hyp.source_tokens != reference.source_tokens {
                return Err(CliError::Eval(format!(
                    "{}: sentence {} source differs from the reference (line {})",
                    hyp_path.display(),
                    idx + 1,
                    hyp.origin_line
                )));
            }
            let annotator_edits = match hyp.lowest_annotator() {
                Some(annotator) => hyp
                    .reference_edits(annotator)
                    .into_iter()
                    .cloned()
                    .collect(),
                None => Vec::new(),
            };
            edits.push(annotator_edits);
        }
        Ok(edits)
    } else {
        let text = std::fs::read_to_string(hyp_path).map_err(CliError::io(hyp_path))?;
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != references.len() {
            return Err(CliError::Eval(format!(
                "{}: hypothesis has {} lines but reference has {} sentences",
                hyp_path.display(),
                lines.len(),
                references.len()
            )));
        }
        Ok(lines
            .iter()
            .zip(references)
            .map(|(line, reference)| {
                let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                extract_edits(&reference.source_tokens, &tokens, &config.costs, lexicon)
            })
            .collect())
    }
}

pub fn compare_corpus(
    references: &[M2Sentence],
    hypothesis: &[Vec<Edit>],
    level: ProficiencyLevel,
    mode: MatchMode,
) -> Result<Vec<(ProficiencyLevel, SentenceComparison)>, CliError> {
    references
        .iter()
        .zip(hypothesis)
        .enumerate()
        .map(|(idx, (reference, edits))| {
            compare_sentence(edits, reference, mode)
                .map(|comparison| (level, comparison))
                .map_err(|e| {
                    CliError::Eval(format!("sentence {} (line {}): {e}", idx + 1, reference.origin_line))
                })
        })
        .collect()
}

pub struct Evaluation {
    pub report: StratifiedReport,
    pub json: JsonReport,
}

pub fn evaluate_pairs(
    pairs: &[(PathBuf, PathBuf, ProficiencyLevel)],
    mode: MatchMode,
    betas: &[Beta],
    config: &RunConfig,
) -> Result<Evaluation, CliError> {
    let lexicon = Lexicon::load(config.lexicon_path.as_deref())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut items = Vec::new();
    for (hyp_path, ref_path, level) in pairs {
        let references = load_m2_file(ref_path)?;
        let hypothesis = hypothesis_edits(hyp_path, &references, config, &lexicon)?;
        items.extend(compare_corpus(&references, &hypothesis, *level, mode)?);
    }
    let report = aggregate(&items, betas);
    let snapshot = serde_json::json!({
        "command": "evaluate",
        "mode": match mode { MatchMode::Correction => "correction", MatchMode::Detection => "detection" },
        "betas": betas.iter().map(|b| b.value()).collect::<Vec<_>>(),
        "pairs": pairs
            .iter()
            .map(|(hyp, reference, level)| serde_json::json!({
                "hyp": file_name(hyp),
                "ref": file_name(reference),
                "level": level.to_string(),
            }))
            .collect::<Vec<_>>(),
    });
    let json = JsonReport::from_report(&report, snapshot);
    Ok(Evaluation { report, json })
}

pub fn run(args: &EvaluateArgs, config: &RunConfig) -> Result<(), CliError> {
    if args.hyp.len() != args.reference.len() {
        return Err(CliError::Config(format!(
            "{} hypothesis files but {} reference files",
            args.hyp.len(),
            args.reference.len()
        )));
    }
    if !args.level.is_empty() && args.level.len() != args.reference.len() {
        return Err(CliError::Config(format!(
            "{} --level values for {} file pairs",
            args.level.len(),
            args.reference.len()
        )));
    }

    let mut pairs = Vec::new();
    for (idx, (hyp, reference)) in args.hyp.iter().zip(&args.reference).enumerate() {
        let level = match args.level.get(idx) {
            Some(letter) => letter
                .parse()
                .map_err(|_| CliError::Config(format!("--level: {letter:?} is not A/B/C/N")))?,
            None => crate::commands::infer_level(reference, config)?,
        };
        pairs.push((hyp.clone(), reference.clone(), level));
    }

    let betas = match &args.betas {
        Some(text) => parse_betas(text)?,
        None => config
            .betas
            .iter()
            .map(|v| Beta::new(*v).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?,
    };

    let evaluation = evaluate_pairs(&pairs, args.mode.into(), &betas, config)?;
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Text);
    let text = report_rendered(&evaluation.report, &evaluation.json, format, args.labels.as_deref())?;
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.json_out {
        std::fs::write(path, evaluation.json.to_canonical_string()).map_err(CliError::io(path))?;
    }
    Ok(())
}
