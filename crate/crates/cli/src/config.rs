//! Layered run configuration: defaults, then the TOML config file, then
//! environment variables, then flags (handled per subcommand).  Everything
//! is resolved up front; nothing is looked up mid-run.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use gecstrat_core::harness::{CompletionEndpoint, ExemplarPair, PromptConfig};
use gecstrat_core::scalar::decimal_from_f64;
use gecstrat_core::stats::default_level_patterns;
use gecstrat_core::{CostConfig, ProficiencyLevel};

use crate::CliError;

pub const CONFIG_ENV: &str = "GECSTRAT_CONFIG";
pub const DATA_DIR_ENV: &str = "GECSTRAT_DATA_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    edit_extraction: CostSection,
    #[serde(default)]
    error_classification: ClassifySection,
    #[serde(default)]
    scoring: ScoringSection,
    #[serde(default)]
    corpus_stats: StatsSection,
    #[serde(default)]
    prompt_harness: HarnessSection,
    #[serde(default)]
    cli_reporting: ReportingSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostSection {
    substitute_base: Option<f64>,
    insert: Option<f64>,
    delete: Option<f64>,
    case_only_substitute: Option<f64>,
    transpose_per_token: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifySection {
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoringSection {
    betas: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsSection {
    data_dir: Option<PathBuf>,
    /// Pattern → level letter pairs, e.g. `[[".A.", "A"]]`; patterns with
    /// `*`/`?` match the whole file name as globs, others as substrings.
    level_patterns: Option<Vec<(String, String)>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarnessSection {
    instruction: Option<String>,
    delimiter_left: Option<String>,
    delimiter_right: Option<String>,
    n_shots: Option<usize>,
    temperature: Option<f64>,
    max_output_tokens: Option<u64>,
    exemplars: Option<Vec<(String, String)>>,
    #[serde(default)]
    endpoint: EndpointSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointSection {
    base_url: Option<String>,
    model: Option<String>,
    auth_env: Option<String>,
    timeout_secs: Option<u64>,
    max_in_flight: Option<usize>,
    max_attempts: Option<usize>,
    backoff_base_ms: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportingSection {
    format: Option<String>,
}

/// Fully resolved configuration handed to every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub costs: CostConfig,
    pub lexicon_path: Option<PathBuf>,
    pub betas: Vec<f64>,
    pub data_dir: Option<PathBuf>,
    pub level_patterns: Vec<(String, ProficiencyLevel)>,
    pub prompt: PromptConfig,
    /// Present only when the config file names a base URL.
    pub endpoint: Option<CompletionEndpoint>,
    pub format: Option<crate::table::OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            costs: CostConfig::default(),
            lexicon_path: None,
            betas: vec![0.5],
            data_dir: None,
            level_patterns: default_level_patterns(),
            prompt: PromptConfig::default(),
            endpoint: None,
            format: None,
        }
    }
}

pub fn load(flag_path: Option<&Path>) -> Result<RunConfig, CliError> {
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let path = flag_path.map(Path::to_path_buf).or(env_path);
    let mut resolved = RunConfig::default();
    if let Some(data_dir) = std::env::var_os(DATA_DIR_ENV) {
        resolved.data_dir = Some(PathBuf::from(data_dir));
    }
    let Some(path) = path else {
        return Ok(resolved);
    };

    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;

    let cost = |value: Option<f64>, field: &str, default| -> Result<_, CliError> {
        match value {
            None => Ok(default),
            Some(v) => decimal_from_f64(v).ok_or_else(|| {
                CliError::Config(format!("edit_extraction.{field}: {v} is not a plain decimal"))
            }),
        }
    };
    let defaults: CostConfig = CostConfig::default();
    resolved.costs = CostConfig {
        substitute_base: cost(file.edit_extraction.substitute_base, "substitute_base", defaults.substitute_base)?,
        insert: cost(file.edit_extraction.insert, "insert", defaults.insert)?,
        delete: cost(file.edit_extraction.delete, "delete", defaults.delete)?,
        case_only_substitute: cost(
            file.edit_extraction.case_only_substitute,
            "case_only_substitute",
            defaults.case_only_substitute,
        )?,
        transpose_per_token: cost(
            file.edit_extraction.transpose_per_token,
            "transpose_per_token",
            defaults.transpose_per_token,
        )?,
    };
    resolved
        .costs
        .validate()
        .map_err(|e| CliError::Config(format!("edit_extraction: {e}")))?;

    resolved.lexicon_path = file.error_classification.lexicon;
    if let Some(betas) = file.scoring.betas {
        resolved.betas = betas;
    }
    // flag/env-provided data dir wins over the file's
    if resolved.data_dir.is_none() {
        resolved.data_dir = file.corpus_stats.data_dir;
    }
    if let Some(patterns) = file.corpus_stats.level_patterns {
        let mut parsed = Vec::new();
        for (pattern, letter) in patterns {
            let level: ProficiencyLevel = letter
                .parse()
                .map_err(|_| CliError::Config(format!("corpus_stats.level_patterns: {letter:?} is not A/B/C/N")))?;
            parsed.push((pattern, level));
        }
        resolved.level_patterns = parsed;
    }

    let harness = file.prompt_harness;
    if let Some(instruction) = harness.instruction {
        resolved.prompt.instruction = instruction;
    }
    if let Some(left) = harness.delimiter_left {
        resolved.prompt.delimiter_left = left;
    }
    if let Some(right) = harness.delimiter_right {
        resolved.prompt.delimiter_right = right;
    }
    if let Some(shots) = harness.n_shots {
        resolved.prompt.n_shots = shots;
    }
    if let Some(temperature) = harness.temperature {
        resolved.prompt.sampling.temperature = temperature;
    }
    if let Some(max) = harness.max_output_tokens {
        resolved.prompt.sampling.max_output_tokens = Some(max);
    }
    if let Some(pairs) = harness.exemplars {
        resolved.prompt.exemplars = pairs
            .into_iter()
            .map(|(ungrammatical, grammatical)| ExemplarPair { ungrammatical, grammatical })
            .collect();
    }
    let endpoint = harness.endpoint;
    if let Some(base_url) = endpoint.base_url {
        let mut resolved_endpoint = CompletionEndpoint {
            base_url,
            ..CompletionEndpoint::default()
        };
        if let Some(model) = endpoint.model {
            resolved_endpoint.model = model;
        }
        if let Some(auth_env) = endpoint.auth_env {
            resolved_endpoint.auth_env = auth_env;
        }
        if let Some(secs) = endpoint.timeout_secs {
            resolved_endpoint.timeout = Duration::from_secs(secs);
        }
        if let Some(n) = endpoint.max_in_flight {
            resolved_endpoint.max_in_flight = n;
        }
        if let Some(n) = endpoint.max_attempts {
            resolved_endpoint.max_attempts = n;
        }
        if let Some(ms) = endpoint.backoff_base_ms {
            resolved_endpoint.backoff_base = Duration::from_millis(ms);
        }
        resolved.endpoint = Some(resolved_endpoint);
    }

    if let Some(format) = file.cli_reporting.format {
        resolved.format = Some(
            format
                .parse()
                .map_err(|_| CliError::Config(format!("cli_reporting.format: unknown format {format:?}")))?,
        );
    }
    Ok(resolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gecstrat_core::Cost;

    #[test]
    fn defaults_without_a_file() {
        let cfg = load(None).unwrap();
        assert_eq!(cfg.betas, vec![0.5]);
        assert_eq!(cfg.prompt.n_shots, 0);
        assert!(cfg.endpoint.is_none());
    }

    #[test]
    fn file_values_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gecstrat.toml");
        std::fs::write(
            &path,
            r#"
[edit_extraction]
case_only_substitute = 0.2

[scoring]
betas = [0.5, 1.0, 2.0]

[prompt_harness]
n_shots = 2

[prompt_harness.endpoint]
base_url = "http://localhost:9999"
model = "test-model"
"#,
        )
        .unwrap();
        let cfg = load(Some(&path)).unwrap();
        assert_eq!(cfg.costs.case_only_substitute, Cost::new(1, 5));
        assert_eq!(cfg.costs.substitute_base, Cost::new(1, 1));
        assert_eq!(cfg.betas, vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.prompt.n_shots, 2);
        assert_eq!(cfg.endpoint.unwrap().model, "test-model");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gecstrat.toml");
        std::fs::write(&path, "[edit_extraction]\ntypo_field = 1.0\n").unwrap();
        assert!(matches!(load(Some(&path)), Err(CliError::Config(_))));
    }

    #[test]
    fn missing_config_file_is_an_io_error() {
        let err = load(Some(Path::new("/nonexistent/gecstrat.toml"))).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("/nonexistent/gecstrat.toml"));
    }
}
