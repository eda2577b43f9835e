//! `gecstrat correct`: run a corrector (live endpoint, mock, or replay
//! transcript) over M2 corpora, persist hypotheses plus a run manifest, and
//! optionally chain evaluation against the corpora's own annotations.

use std::path::PathBuf;

use gecstrat_core::harness::{
    mock_by_name, run_batch, BatchOptions, CorrectionRun, Corrector, HttpCorrector,
    PromptConfig, RecordingCorrector, ReplayCorrector,
};
use gecstrat_core::report::JsonReport;
use gecstrat_core::score::aggregate;
use gecstrat_core::{extract_edits, Beta, Lexicon, M2Sentence, MatchMode, ProficiencyLevel};

use crate::commands::evaluate::compare_corpus;
use crate::commands::{expand_data_paths, file_name, infer_level, load_m2_file, parse_betas};
use crate::config::RunConfig;
use crate::table::{report_rendered, OutputFormat};
use crate::{emit, CliError};

#[derive(Debug, clap::Args)]
pub struct CorrectArgs {
    /// M2 files or directories to correct.
    #[arg(long, required = true)]
    pub data: Vec<PathBuf>,
    /// Offline corrector: identity, echo_reference, or drop_token.
    #[arg(long, conflicts_with_all = ["replay", "endpoint"])]
    pub mock: Option<String>,
    /// Replay a recorded transcript (JSONL of request/response pairs).
    #[arg(long, conflicts_with = "endpoint")]
    pub replay: Option<PathBuf>,
    /// Base URL of a live completion endpoint (overrides the config file).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model identifier sent to the live endpoint.
    #[arg(long)]
    pub model: Option<String>,
    /// Record request/response pairs to this transcript file.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Exemplar count (0-4 with the bundled bank).
    #[arg(long)]
    pub shots: Option<usize>,
    /// Seed for the drop_token mock.
    #[arg(long, default_value_t = 0)]
    pub mock_seed: u64,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
    /// Output directory for hypotheses, records, and the manifest.
    #[arg(long, default_value = "gecstrat-run")]
    pub out_dir: PathBuf,
    /// Ignore an existing checkpoint instead of resuming from it.
    #[arg(long)]
    pub no_resume: bool,
    /// Chain evaluation against the input corpora's own annotations.
    #[arg(long)]
    pub evaluate: bool,
    #[arg(long)]
    pub betas: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "*")]
    pub labels: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the evaluation report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Additionally write the full-precision JSON report here.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

struct LoadedCorpus {
    files: Vec<PathBuf>,
    /// Sentence count per file, in file order.
    bounds: Vec<usize>,
    sentences: Vec<M2Sentence>,
}

fn load_corpus(args: &CorrectArgs) -> Result<LoadedCorpus, CliError> {
    let files = expand_data_paths(&args.data)?;
    let mut sentences = Vec::new();
    let mut bounds = Vec::new();
    for file in &files {
        let corpus = load_m2_file(file)?;
        bounds.push(corpus.len());
        sentences.extend(corpus);
    }
    Ok(LoadedCorpus { files, bounds, sentences })
}

fn build_corrector(
    args: &CorrectArgs,
    config: &RunConfig,
    prompt: &PromptConfig,
    corpus: &[M2Sentence],
) -> Result<Box<dyn Corrector>, CliError> {
    let base: Box<dyn Corrector> = if let Some(name) = &args.mock {
        mock_by_name(name, prompt, corpus, args.mock_seed)
            .map_err(|e| CliError::Eval(e.to_string()))?
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown mock {name:?}; available: identity, echo_reference, drop_token"
                ))
            })?
    } else if let Some(path) = &args.replay {
        Box::new(ReplayCorrector::load(path).map_err(|e| CliError::Eval(e.to_string()))?)
    } else {
        let mut endpoint = config.endpoint.clone().unwrap_or_default();
        if let Some(base_url) = &args.endpoint {
            endpoint.base_url = base_url.clone();
        }
        if let Some(model) = &args.model {
            endpoint.model = model.clone();
        }
        if endpoint.base_url.is_empty() {
            return Err(CliError::Config(
                "no corrector selected: pass --mock/--replay/--endpoint or configure prompt_harness.endpoint"
                    .to_string(),
            ));
        }
        Box::new(HttpCorrector::new(&endpoint, prompt).map_err(|e| CliError::Config(e.to_string()))?)
    };
    match &args.record {
        Some(path) => Ok(Box::new(
            RecordingCorrector::create(BoxedCorrector(base), path)
                .map_err(|e| CliError::Config(e.to_string()))?,
        )),
        None => Ok(base),
    }
}

/// Adapter so a boxed corrector can sit inside the recording wrapper.
struct BoxedCorrector(Box<dyn Corrector>);

impl Corrector for BoxedCorrector {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn complete(&self, prompt: &str) -> Result<String, gecstrat_core::harness::CorrectorError> {
        self.0.complete(prompt)
    }
}

pub fn run(args: &CorrectArgs, config: &RunConfig) -> Result<(), CliError> {
    let corpus = load_corpus(args)?;

    let mut prompt = config.prompt.clone();
    if let Some(shots) = args.shots {
        prompt.n_shots = shots;
    }
    prompt.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let corrector = build_corrector(args, config, &prompt, &corpus.sentences)?;

    std::fs::create_dir_all(&args.out_dir).map_err(CliError::io(&args.out_dir))?;
    let checkpoint = args.out_dir.join("records.jsonl");
    if args.no_resume && checkpoint.exists() {
        std::fs::remove_file(&checkpoint).map_err(CliError::io(&checkpoint))?;
    }

    let endpoint_defaults = config.endpoint.clone().unwrap_or_default();
    let opts = BatchOptions {
        max_in_flight: args.max_in_flight.unwrap_or(endpoint_defaults.max_in_flight),
        max_attempts: endpoint_defaults.max_attempts,
        backoff_base: endpoint_defaults.backoff_base,
        checkpoint: Some(checkpoint),
    };
    let run = run_batch(&corpus.sentences, corrector.as_ref(), &prompt, &opts)
        .map_err(|e| CliError::Eval(e.to_string()))?;

    write_outputs(args, &corpus, &run)?;

    if args.evaluate {
        let betas = match &args.betas {
            Some(text) => parse_betas(text)?,
            None => config
                .betas
                .iter()
                .map(|v| Beta::new(*v).map_err(|e| CliError::Config(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let evaluation = evaluate_run(config, &corpus, &run, &betas)?;
        let format = args.format.or(config.format).unwrap_or(OutputFormat::Text);
        let text = report_rendered(&evaluation.0, &evaluation.1, format, args.labels.as_deref())?;
        emit(args.out.as_deref(), &text)?;
        if let Some(path) = &args.json_out {
            std::fs::write(path, evaluation.1.to_canonical_string()).map_err(CliError::io(path))?;
        }
    }
    Ok(())
}

fn write_outputs(args: &CorrectArgs, corpus: &LoadedCorpus, run: &CorrectionRun) -> Result<(), CliError> {
    let mut offset = 0usize;
    for (file, count) in corpus.files.iter().zip(&corpus.bounds) {
        let stem = file
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "corpus".to_string());
        let hyp_path = args.out_dir.join(format!("{stem}.hyp.txt"));
        let mut lines = String::new();
        for record in &run.records[offset..offset + count] {
            lines.push_str(&record.hypothesis);
            lines.push('\n');
        }
        std::fs::write(&hyp_path, lines).map_err(CliError::io(&hyp_path))?;
        offset += count;
    }

    let (ok, empty, failed) = run.status_counts();
    let manifest = serde_json::json!({
        "schema_version": gecstrat_core::report::SCHEMA_VERSION,
        "corrector": run.corrector,
        "files": corpus.files.iter().map(|f| file_name(f)).collect::<Vec<_>>(),
        "sentences": run.records.len(),
        "statuses": {"ok": ok, "empty": empty, "failed": failed},
        "resumed": run.resumed,
        "elapsed_secs": run.elapsed.as_secs_f64(),
        "config": run.config,
    });
    let manifest_path = args.out_dir.join("run_manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&manifest_path, text).map_err(CliError::io(&manifest_path))
}

fn evaluate_run(
    config: &RunConfig,
    corpus: &LoadedCorpus,
    run: &CorrectionRun,
    betas: &[Beta],
) -> Result<(gecstrat_core::score::StratifiedReport, JsonReport), CliError> {
    let lexicon = Lexicon::load(config.lexicon_path.as_deref())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut items = Vec::new();
    let mut offset = 0usize;
    let mut levels: Vec<(String, ProficiencyLevel)> = Vec::new();
    for (file, count) in corpus.files.iter().zip(&corpus.bounds) {
        let level = infer_level(file, config)?;
        levels.push((file_name(file), level));
        let references = &corpus.sentences[offset..offset + count];
        let hypothesis: Vec<Vec<gecstrat_core::Edit>> = run.records[offset..offset + count]
            .iter()
            .zip(references)
            .map(|(record, reference)| {
                let tokens: Vec<String> = record
                    .hypothesis
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                extract_edits(&reference.source_tokens, &tokens, &config.costs, &lexicon)
            })
            .collect();
        items.extend(compare_corpus(references, &hypothesis, level, MatchMode::Correction)?);
        offset += count;
    }
    let report = aggregate(&items, betas);
    let snapshot = serde_json::json!({
        "command": "correct",
        "corrector": run.corrector,
        "shots": run.config.n_shots,
        "mode": "correction",
        "betas": betas.iter().map(|b| b.value()).collect::<Vec<_>>(),
        "files": levels
            .iter()
            .map(|(name, level)| serde_json::json!({"file": name, "level": level.to_string()}))
            .collect::<Vec<_>>(),
    });
    let json = JsonReport::from_report(&report, snapshot);
    Ok((report, json))
}
