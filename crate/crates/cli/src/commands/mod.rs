//! Subcommand implementations and shared corpus-loading helpers.

use std::path::{Path, PathBuf};

use gecstrat_core::stats::level_from_file_name;
use gecstrat_core::{parse_m2, M2Sentence, ProficiencyLevel};

use crate::config::RunConfig;
use crate::CliError;

pub mod correct;
pub mod evaluate;
pub mod report;
pub mod stats;

/// Expands files and directories into a sorted list of `.m2` files.
pub fn expand_data_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        let meta = std::fs::metadata(path).map_err(CliError::io(path))?;
        if meta.is_dir() {
            let mut found = Vec::new();
            for entry in std::fs::read_dir(path).map_err(CliError::io(path))? {
                let entry = entry.map_err(CliError::io(path))?;
                let candidate = entry.path();
                if candidate.extension().is_some_and(|ext| ext == "m2") {
                    found.push(candidate);
                }
            }
            if found.is_empty() {
                return Err(CliError::Config(format!(
                    "no .m2 files found in {}",
                    path.display()
                )));
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Config("no input files given".to_string()));
    }
    Ok(files)
}

pub fn load_m2_file(path: &Path) -> Result<Vec<M2Sentence>, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_m2(&text).map_err(|e| CliError::Eval(format!("{}: {e}", path.display())))
}

pub fn infer_level(path: &Path, config: &RunConfig) -> Result<ProficiencyLevel, CliError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_default();
    level_from_file_name(&name, &config.level_patterns).ok_or_else(|| {
        CliError::Config(format!(
            "cannot infer a proficiency level from {name:?}; pass --level or extend corpus_stats.level_patterns"
        ))
    })
}

pub fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn parse_betas(text: &str) -> Result<Vec<gecstrat_core::Beta>, CliError> {
    let mut betas = Vec::new();
    for part in text.split(',') {
        let value: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--betas: {part:?} is not a number")))?;
        betas.push(
            gecstrat_core::Beta::new(value).map_err(|e| CliError::Config(e.to_string()))?,
        );
    }
    if betas.is_empty() {
        return Err(CliError::Config("--betas: empty list".to_string()));
    }
    Ok(betas)
}
