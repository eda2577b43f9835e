//! Corpus descriptors: error-type distribution ratios, tokens per sentence,
//! and per-proficiency summaries.

use std::collections::BTreeMap;

use crate::m2::{M2Sentence, ProficiencyLevel};
use crate::Score;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("cannot summarize an empty corpus")]
    EmptyCorpus,
}

/// Which annotators contribute edits to the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnotatorPolicy {
    /// Only the lowest annotator id per sentence (deterministic, one
    /// distribution per corpus).
    #[default]
    First,
    /// Every annotator's edits.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub proficiency: ProficiencyLevel,
    pub sentences: usize,
    pub tokens: usize,
    pub avg_tokens_per_sentence: Score,
    /// Total counted edits, noop sentinels excluded.
    pub edits: usize,
    /// Error-type string → fraction of all counted edits; sums to 1 when
    /// `edits > 0`.
    pub type_ratios: BTreeMap<String, Score>,
}

/// Counts edits per type over the corpus and derives ratios.
pub fn summarize(
    corpus: &[M2Sentence],
    proficiency: ProficiencyLevel,
    policy: AnnotatorPolicy,
) -> Result<CorpusSummary, StatsError> {
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let tokens: usize = corpus.iter().map(|s| s.source_tokens.len()).sum();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut edits = 0usize;
    for sentence in corpus {
        let annotators: Vec<usize> = match policy {
            AnnotatorPolicy::First => sentence.lowest_annotator().into_iter().collect(),
            AnnotatorPolicy::All => sentence.annotations.keys().copied().collect(),
        };
        for annotator in annotators {
            for edit in sentence.reference_edits(annotator) {
                *counts.entry(edit.label.to_string()).or_default() += 1;
                edits += 1;
            }
        }
    }
    let type_ratios = counts
        .into_iter()
        .map(|(label, n)| (label, n as Score / edits as Score))
        .collect();
    Ok(CorpusSummary {
        proficiency,
        sentences: corpus.len(),
        tokens,
        avg_tokens_per_sentence: tokens as Score / corpus.len() as Score,
        edits,
        type_ratios,
    })
}

/// The `k` most frequent error types, descending by ratio with ties broken
/// by ascending type string.
pub fn top_k_errors(summary: &CorpusSummary, k: usize) -> Vec<(String, Score)> {
    let mut entries: Vec<(String, Score)> = summary
        .type_ratios
        .iter()
        .map(|(t, r)| (t.clone(), *r))
        .collect();
    entries.sort_by(|(ta, ra), (tb, rb)| rb.total_cmp(ra).then_with(|| ta.cmp(tb)));
    entries.truncate(k);
    entries
}

/// Default file-name → proficiency patterns: a stem containing `.A.` maps to
/// level A, and so on.
pub fn default_level_patterns() -> Vec<(String, ProficiencyLevel)> {
    ProficiencyLevel::ALL
        .iter()
        .map(|level| (format!(".{level}."), *level))
        .collect()
}

/// Infers the proficiency level of a corpus file from its name.  Patterns
/// containing `*` or `?` are matched as globs against the whole file name,
/// anything else as a plain substring.
pub fn level_from_file_name(
    name: &str,
    patterns: &[(String, ProficiencyLevel)],
) -> Option<ProficiencyLevel> {
    for (pattern, level) in patterns {
        let hit = if pattern.contains(['*', '?']) {
            glob_match(pattern, name)
        } else {
            name.contains(pattern.as_str())
        };
        if hit {
            return Some(*level);
        }
    }
    None
}

fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    // iterative wildcard match with backtracking on the last `*`
    let (mut pi, mut ti) = (0usize, 0usize);
    let (mut star, mut star_ti) = (None::<usize>, 0usize);
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some(pi);
            star_ti = ti;
            pi += 1;
        } else if let Some(s) = star {
            pi = s + 1;
            star_ti += 1;
            ti = star_ti;
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}
