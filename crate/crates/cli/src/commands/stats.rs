//! `gecstrat stats`: per-proficiency error-type ratios and corpus
//! descriptors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use gecstrat_core::report::round_display;
use gecstrat_core::stats::{summarize, top_k_errors, AnnotatorPolicy, CorpusSummary};
use gecstrat_core::{M2Sentence, ProficiencyLevel};

use crate::commands::{expand_data_paths, infer_level, load_m2_file};
use crate::config::{RunConfig, DATA_DIR_ENV};
use crate::table::{align_columns, OutputFormat};
use crate::{emit, CliError};

#[derive(Debug, clap::Args)]
pub struct StatsArgs {
    /// M2 files or directories; falls back to $GECSTRAT_DATA_DIR or the
    /// config file's corpus_stats.data_dir.
    #[arg(long)]
    pub data: Vec<PathBuf>,
    /// How many error types to show per level.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = Policy::First)]
    pub policy: Policy,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Policy {
    First,
    All,
}

impl From<Policy> for AnnotatorPolicy {
    fn from(policy: Policy) -> Self {
        match policy {
            Policy::First => AnnotatorPolicy::First,
            Policy::All => AnnotatorPolicy::All,
        }
    }
}

pub fn run(args: &StatsArgs, config: &RunConfig) -> Result<(), CliError> {
    let data: Vec<PathBuf> = if !args.data.is_empty() {
        args.data.clone()
    } else if let Some(dir) = &config.data_dir {
        vec![dir.clone()]
    } else {
        return Err(CliError::Config(format!(
            "no data given: pass --data, set ${DATA_DIR_ENV}, or configure corpus_stats.data_dir"
        )));
    };

    let files = expand_data_paths(&data)?;
    let mut by_level: BTreeMap<ProficiencyLevel, Vec<M2Sentence>> = BTreeMap::new();
    for file in &files {
        let level = infer_level(file, config)?;
        by_level.entry(level).or_default().extend(load_m2_file(file)?);
    }

    let mut summaries: BTreeMap<ProficiencyLevel, CorpusSummary> = BTreeMap::new();
    for (level, corpus) in &by_level {
        let summary = summarize(corpus, *level, args.policy.into())
            .map_err(|e| CliError::Eval(e.to_string()))?;
        summaries.insert(*level, summary);
    }

    let format = args.format.or(config.format).unwrap_or(OutputFormat::Text);
    let text = match format {
        OutputFormat::Text => render_text(&summaries, args.top),
        OutputFormat::Tsv => render_tsv(&summaries),
        OutputFormat::Json => render_json(&summaries),
    };
    emit(args.out.as_deref(), &text)
}

fn render_text(summaries: &BTreeMap<ProficiencyLevel, CorpusSummary>, top: usize) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::new()];
    for level in summaries.keys() {
        header.push(format!("Proficiency {level}"));
        header.push(String::new());
    }
    rows.push(header);

    let mut summary_row = |label: &str, value: fn(&CorpusSummary) -> String| {
        let mut row = vec![label.to_string()];
        for summary in summaries.values() {
            row.push(value(summary));
            row.push(String::new());
        }
        rows.push(row);
    };
    summary_row("sentences", |s| s.sentences.to_string());
    summary_row("tokens", |s| s.tokens.to_string());
    summary_row("avg tokens", |s| round_display(s.avg_tokens_per_sentence, 4));
    summary_row("edits", |s| s.edits.to_string());

    let tops: Vec<Vec<(String, f64)>> = summaries
        .values()
        .map(|summary| top_k_errors(summary, top))
        .collect();
    let depth = tops.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..depth {
        let mut row = vec![if i == 0 { "top errors".to_string() } else { String::new() }];
        for column in &tops {
            match column.get(i) {
                Some((label, ratio)) => {
                    row.push(label.clone());
                    row.push(round_display(*ratio, 4));
                }
                None => {
                    row.push(String::new());
                    row.push(String::new());
                }
            }
        }
        rows.push(row);
    }
    align_columns(&rows)
}

fn render_tsv(summaries: &BTreeMap<ProficiencyLevel, CorpusSummary>) -> String {
    let mut out = String::from("level\tsentences\ttokens\tavg_tokens_per_sentence\tedits\ttype\tratio\n");
    for (level, summary) in summaries {
        for (label, ratio) in top_k_errors(summary, usize::MAX) {
            out.push_str(&format!(
                "{level}\t{}\t{}\t{}\t{}\t{label}\t{ratio}\n",
                summary.sentences, summary.tokens, summary.avg_tokens_per_sentence, summary.edits
            ));
        }
        if summary.type_ratios.is_empty() {
            out.push_str(&format!(
                "{level}\t{}\t{}\t{}\t{}\t\t\n",
                summary.sentences, summary.tokens, summary.avg_tokens_per_sentence, summary.edits
            ));
        }
    }
    out
}

fn render_json(summaries: &BTreeMap<ProficiencyLevel, CorpusSummary>) -> String {
    let levels: BTreeMap<String, serde_json::Value> = summaries
        .iter()
        .map(|(level, s)| {
            (
                level.to_string(),
                serde_json::json!({
                    "sentences": s.sentences,
                    "tokens": s.tokens,
                    "avg_tokens_per_sentence": s.avg_tokens_per_sentence,
                    "edits": s.edits,
                    "type_ratios": s.type_ratios,
                }),
            )
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&serde_json::json!({ "levels": levels }))
        .expect("stats json serializes");
    text.push('\n');
    text
}
