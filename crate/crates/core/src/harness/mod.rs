//! Zero-/few-shot prompting harness: prompt construction, completion
//! parsing, correctors (HTTP, mocks, record/replay), and a checkpointing
//! batch runner.
//!
//! Prompts are byte-deterministic: an instruction line, then each exemplar
//! rendered as `{ungrammatical} => {grammatical}` on its own line, then
//! `{input} =>` as the final line.  The model token budget resolves to 256
//! for zero-shot prompts and 512 otherwise, enforced with a whitespace-token
//! proxy (no model tokenizer): prompts over budget drop highest-numbered
//! exemplars first and are flagged.

use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub mod batch;
pub mod http;
pub mod mock;
pub mod replay;

pub use batch::{run_batch, BatchOptions, CorrectionRun, RecordStatus, SentenceRecord};
pub use http::{CompletionEndpoint, HttpCorrector};
pub use mock::{
    mock_by_name, DropTokenCorrector, EchoReferenceCorrector, FailAfterCorrector, FlakyCorrector,
    IdentityCorrector,
};
pub use replay::{request_hash, RecordingCorrector, ReplayCorrector, TranscriptEntry};

pub const DEFAULT_INSTRUCTION: &str = "Correct the grammatical errors in the following sentence:";

/// The bundled default exemplar bank, in shot order.
pub fn default_exemplars() -> Vec<ExemplarPair> {
    [
        ("This is important thing.", "This is an important thing."),
        ("Water is needed for alive.", "Water is necessary to live."),
        (
            "And young people spend time more ther lifestile.",
            "And young people spend more time on their lifestyles.",
        ),
        (
            "Both of these men have dealed with situations in an unconventional manner and the results are with everyone to see.",
            "Both of these men have dealt with situations in an unconventional manner and the results are plain to see.",
        ),
    ]
    .into_iter()
    .map(|(ungrammatical, grammatical)| ExemplarPair {
        ungrammatical: ungrammatical.to_string(),
        grammatical: grammatical.to_string(),
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExemplarPair {
    pub ungrammatical: String,
    pub grammatical: String,
}

/// Sampling knobs passed through to the completion endpoint opaquely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    /// `max_tokens` sent to the endpoint; defaults to the resolved token
    /// budget when unset.
    pub max_output_tokens: Option<u64>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            temperature: 0.0,
            max_output_tokens: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub instruction: String,
    pub exemplars: Vec<ExemplarPair>,
    pub n_shots: usize,
    pub delimiter_left: String,
    pub delimiter_right: String,
    pub sampling: SamplingParams,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            instruction: DEFAULT_INSTRUCTION.to_string(),
            exemplars: default_exemplars(),
            n_shots: 0,
            delimiter_left: "{".to_string(),
            delimiter_right: "}".to_string(),
            sampling: SamplingParams::default(),
        }
    }
}

impl PromptConfig {
    pub fn with_shots(n_shots: usize) -> Self {
        PromptConfig {
            n_shots,
            ..PromptConfig::default()
        }
    }

    /// Model token budget: 256 for zero-shot, 512 otherwise.
    pub fn token_budget(&self) -> usize {
        if self.n_shots == 0 {
            256
        } else {
            512
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_shots > self.exemplars.len() {
            return Err(HarnessError::ShotsExceedExemplars {
                shots: self.n_shots,
                bank: self.exemplars.len(),
            });
        }
        if self.delimiter_left.is_empty()
            || self.delimiter_right.is_empty()
            || self.delimiter_left == self.delimiter_right
        {
            return Err(HarnessError::BadDelimiters);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("requested {shots} shots but the exemplar bank has {bank} entries")]
    ShotsExceedExemplars { shots: usize, bank: usize },
    #[error("prompt delimiters must be nonempty and distinct")]
    BadDelimiters,
    #[error("invalid batch options: {0}")]
    BadBatchOptions(String),
    #[error("invalid endpoint configuration: {0}")]
    BadEndpoint(String),
    #[error("auth token environment variable {var} is not set")]
    MissingAuthToken { var: String },
    #[error("cannot open transcript {path}: {source}")]
    TranscriptIo {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("transcript {path} line {line}: {message}")]
    TranscriptParse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("checkpoint {path} record {index} does not match the corpus")]
    CheckpointMismatch { path: PathBuf, index: usize },
    #[error("checkpoint i/o at {path}: {source}")]
    CheckpointIo {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("batch aborted after {completed} completed records: {message}")]
    Aborted { message: String, completed: usize },
    #[error("cannot apply reference edits: {0}")]
    Reference(#[from] crate::m2::M2Error),
}

/// A built prompt plus how it was fitted to the token budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPrompt {
    pub text: String,
    pub shots_used: usize,
    /// Set when exemplars were dropped or the zero-exemplar prompt still
    /// exceeds the budget.
    pub truncated: bool,
}

fn render(cfg: &PromptConfig, shots: usize, input: &str) -> String {
    let (l, r) = (&cfg.delimiter_left, &cfg.delimiter_right);
    let mut lines = Vec::with_capacity(shots + 2);
    lines.push(cfg.instruction.clone());
    for pair in &cfg.exemplars[..shots] {
        lines.push(format!("{l}{}{r} => {l}{}{r}", pair.ungrammatical, pair.grammatical));
    }
    lines.push(format!("{l}{input}{r} =>"));
    lines.join("\n")
}

/// Builds the prompt for one input sentence, dropping highest-numbered
/// exemplars while the whitespace-token count exceeds the budget.
pub fn build_prompt<S: AsRef<str>>(
    cfg: &PromptConfig,
    input_tokens: &[S],
) -> Result<RenderedPrompt, HarnessError> {
    cfg.validate()?;
    let input = input_tokens
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join(" ");
    let budget = cfg.token_budget();
    let mut shots = cfg.n_shots;
    loop {
        let text = render(cfg, shots, &input);
        let tokens = text.split_whitespace().count();
        if tokens <= budget || shots == 0 {
            return Ok(RenderedPrompt {
                truncated: shots < cfg.n_shots || tokens > budget,
                shots_used: shots,
                text,
            });
        }
        shots -= 1;
    }
}

/// Outcome of parsing a raw completion.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedCompletion {
    /// Content of the first balanced delimiter pair.
    Delimited(Vec<String>),
    /// No delimiters present: first nonempty line, trimmed.
    Fallback(Vec<String>),
    /// Nothing usable; the caller substitutes the source sentence.
    Empty,
}

impl ParsedCompletion {
    pub fn tokens(&self) -> Option<&[String]> {
        match self {
            ParsedCompletion::Delimited(t) | ParsedCompletion::Fallback(t) => Some(t),
            ParsedCompletion::Empty => None,
        }
    }
}

/// Total completion parser: extracts the first balanced delimiter pair,
/// falls back to the first nonempty line, and reports `Empty` when neither
/// yields tokens.
pub fn parse_completion(raw: &str, cfg: &PromptConfig) -> ParsedCompletion {
    if let Some(content) = first_balanced(raw, &cfg.delimiter_left, &cfg.delimiter_right) {
        let tokens: Vec<String> = content.split_whitespace().map(str::to_string).collect();
        return if tokens.is_empty() {
            ParsedCompletion::Empty
        } else {
            ParsedCompletion::Delimited(tokens)
        };
    }
    match raw.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some(line) => {
            ParsedCompletion::Fallback(line.split_whitespace().map(str::to_string).collect())
        }
        None => ParsedCompletion::Empty,
    }
}

fn first_balanced<'a>(raw: &'a str, left: &str, right: &str) -> Option<&'a str> {
    let open = raw.find(left)?;
    let content_start = open + left.len();
    let mut depth = 1usize;
    let mut pos = content_start;
    while pos < raw.len() {
        if raw[pos..].starts_with(left) {
            depth += 1;
            pos += left.len();
        } else if raw[pos..].starts_with(right) {
            depth -= 1;
            if depth == 0 {
                return Some(&raw[content_start..pos]);
            }
            pos += right.len();
        } else {
            pos += raw[pos..].chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

/// Recovers the input sentence from a prompt's final line, the inverse of
/// the rendering above.  Mock correctors use this to find their sentence.
pub fn input_from_prompt(prompt: &str, cfg: &PromptConfig) -> Option<String> {
    let line = prompt.lines().last()?;
    let line = line.strip_suffix(" =>")?;
    let inner = line
        .strip_prefix(cfg.delimiter_left.as_str())?
        .strip_suffix(cfg.delimiter_right.as_str())?;
    Some(inner.to_string())
}

/// A text-completion backend: the live HTTP endpoint, a mock, or a replay.
pub trait Corrector: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, CorrectorError>;
}

#[derive(Debug, thiserror::Error)]
pub enum CorrectorError {
    /// Retryable: timeouts, 5xx, rate limits.
    #[error("transient: {0}")]
    Transient(String),
    /// Aborts the batch: bad auth, bad request, missing replay entries.
    #[error("fatal: {0}")]
    Fatal(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_shot_prompt_embeds_first_exemplar() {
        let cfg = PromptConfig::with_shots(1);
        let prompt = build_prompt(&cfg, &["He", "go", "home", "."]).unwrap();
        assert!(prompt
            .text
            .contains("{This is important thing.} => {This is an important thing.}"));
        assert!(prompt.text.ends_with("{He go home .} =>"));
        assert!(!prompt.truncated);
        assert_eq!(prompt.shots_used, 1);
    }

    #[test]
    fn zero_shot_prompt_is_instruction_plus_input() {
        let cfg = PromptConfig::default();
        let prompt = build_prompt(&cfg, &["He", "go", "home", "."]).unwrap();
        let lines: Vec<&str> = prompt.text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], DEFAULT_INSTRUCTION);
        assert_eq!(lines[1], "{He go home .} =>");
        assert_eq!(cfg.token_budget(), 256);
    }

    #[test]
    fn four_shot_prompt_keeps_bank_order_and_bigger_budget() {
        let cfg = PromptConfig::with_shots(4);
        assert_eq!(cfg.token_budget(), 512);
        let prompt = build_prompt(&cfg, &["ok"]).unwrap();
        let lines: Vec<&str> = prompt.text.lines().collect();
        assert_eq!(lines.len(), 6);
        for (line, pair) in lines[1..5].iter().zip(default_exemplars()) {
            assert!(line.starts_with(&format!("{{{}}}", pair.ungrammatical)));
        }
    }

    #[test]
    fn prompts_are_byte_deterministic() {
        let cfg = PromptConfig::with_shots(3);
        let input = ["some", "tokens", "here"];
        let a = build_prompt(&cfg, &input).unwrap();
        let b = build_prompt(&cfg, &input).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_many_shots_is_an_error() {
        let cfg = PromptConfig::with_shots(5);
        let err = build_prompt(&cfg, &["x"]).unwrap_err();
        assert!(err.to_string().contains("exemplar bank has 4 entries"));
    }

    #[test]
    fn equal_delimiters_are_rejected() {
        let cfg = PromptConfig {
            delimiter_right: "{".to_string(),
            ..PromptConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::BadDelimiters)));
    }

    #[test]
    fn over_budget_prompt_drops_exemplars_and_flags() {
        let cfg = PromptConfig::with_shots(4);
        // ~500 input tokens: the 512 budget forces exemplars out.
        let input: Vec<String> = (0..500).map(|i| format!("t{i}")).collect();
        let prompt = build_prompt(&cfg, &input).unwrap();
        assert!(prompt.truncated);
        assert_eq!(prompt.shots_used, 0);

        // zero-shot over 256 tokens cannot shrink further but is flagged
        let cfg0 = PromptConfig::default();
        let prompt0 = build_prompt(&cfg0, &input).unwrap();
        assert!(prompt0.truncated);
        assert_eq!(prompt0.shots_used, 0);
        assert!(prompt0.text.contains("t499"));
    }

    #[test]
    fn parse_extracts_first_balanced_pair() {
        let cfg = PromptConfig::default();
        assert_eq!(
            parse_completion("{He goes home .}\nextra", &cfg),
            ParsedCompletion::Delimited(vec![
                "He".to_string(),
                "goes".to_string(),
                "home".to_string(),
                ".".to_string()
            ])
        );
        // nested braces stay inside the first balanced pair
        assert_eq!(
            parse_completion("{a {b} c} {d}", &cfg),
            ParsedCompletion::Delimited(vec![
                "a".to_string(),
                "{b}".to_string(),
                "c".to_string()
            ])
        );
    }

    #[test]
    fn parse_falls_back_to_first_nonempty_line() {
        let cfg = PromptConfig::default();
        assert_eq!(
            parse_completion("He goes home .", &cfg),
            ParsedCompletion::Fallback(vec![
                "He".to_string(),
                "goes".to_string(),
                "home".to_string(),
                ".".to_string()
            ])
        );
        assert_eq!(
            parse_completion("\n\n  spaced line  \nmore", &cfg),
            ParsedCompletion::Fallback(vec!["spaced".to_string(), "line".to_string()])
        );
        // unbalanced opening delimiter falls back too
        assert_eq!(
            parse_completion("{never closed", &cfg),
            ParsedCompletion::Fallback(vec!["{never".to_string(), "closed".to_string()])
        );
    }

    #[test]
    fn parse_reports_empty() {
        let cfg = PromptConfig::default();
        assert_eq!(parse_completion("", &cfg), ParsedCompletion::Empty);
        assert_eq!(parse_completion("{}", &cfg), ParsedCompletion::Empty);
        assert_eq!(parse_completion("{   }", &cfg), ParsedCompletion::Empty);
        assert_eq!(parse_completion("\n  \n", &cfg), ParsedCompletion::Empty);
    }

    #[test]
    fn parse_inverts_rendering_for_delimiter_free_tokens() {
        let cfg = PromptConfig::default();
        for tokens in [vec!["a"], vec!["He", "goes", "."], vec!["x", "y", "z", "w"]] {
            let wrapped = format!("{{{}}}", tokens.join(" "));
            let parsed = parse_completion(&wrapped, &cfg);
            assert_eq!(parsed.tokens().unwrap(), tokens.as_slice());
        }
    }

    #[test]
    fn input_recovered_from_prompt() {
        let cfg = PromptConfig::with_shots(2);
        let prompt = build_prompt(&cfg, &["He", "go", "home", "."]).unwrap();
        assert_eq!(input_from_prompt(&prompt.text, &cfg).unwrap(), "He go home .");
    }
}
