//! Span-based evaluation: TP/FP/FN accumulation against multi-annotator
//! references and stratified precision / recall / F-beta reports.
//!
//! Conventions follow the ERRANT reference scorer: precision is 1.0 when
//! nothing was proposed, recall is 1.0 when nothing was required, and F is
//! 0.0 when its denominator vanishes — so an identity corrector scores
//! P=1, R=0, F=0 and a correct noop scores a perfect 1.0.  Aggregation is
//! micro (counts are summed before any ratio is taken).

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error_type::{EditLabel, EditOp};
use crate::m2::{Edit, M2Sentence, ProficiencyLevel};
use crate::scalar::MetricScalar;
use crate::Score;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScoreError {
    #[error("beta must be a positive finite number, got {beta}")]
    NonPositiveBeta { beta: f64 },
    #[error("hypothesis edit span {start}..{end} outside sentence of {len} tokens")]
    HypothesisSpanOutOfRange { start: usize, end: usize, len: usize },
    #[error("malformed stratum selector {text:?} (expected `*`, `M:*`, or an exact type like `R:DET`)")]
    BadSelector { text: String },
    #[error("malformed stratum key {text:?}")]
    BadStratumKey { text: String },
}

/// F-beta weight, validated positive and finite so it can key a map.
#[derive(Debug, Clone, Copy)]
pub struct Beta(f64);

impl Beta {
    pub const HALF: Beta = Beta(0.5);
    pub const ONE: Beta = Beta(1.0);
    pub const TWO: Beta = Beta(2.0);

    pub fn new(value: f64) -> Result<Beta, ScoreError> {
        if value.is_finite() && value > 0.0 {
            Ok(Beta(value))
        } else {
            Err(ScoreError::NonPositiveBeta { beta: value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Beta {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == std::cmp::Ordering::Equal
    }
}
impl Eq for Beta {}
impl PartialOrd for Beta {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Beta {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(1+β²)·P·R / (β²·P + R)`, or 0 when the denominator is 0.
pub fn f_beta<F: MetricScalar>(precision: F, recall: F, beta: F) -> Result<F, ScoreError> {
    if beta <= F::zero() || !beta.is_finite() {
        return Err(ScoreError::NonPositiveBeta {
            beta: beta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let b2 = beta * beta;
    let denominator = b2 * precision + recall;
    if denominator == F::zero() {
        Ok(F::zero())
    } else {
        Ok(((F::one() + b2) * precision * recall) / denominator)
    }
}

/// True/false positive and false negative counts.  Componentwise addition is
/// a commutative monoid with identity `(0, 0, 0)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub tp: u64,
    pub fp: u64,
    /// False negatives (`fn` is reserved in Rust).
    pub fn_: u64,
}

impl EvalCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        EvalCounts { tp, fp, fn_ }
    }

    pub fn precision(&self) -> Score {
        if self.tp + self.fp > 0 {
            self.tp as Score / (self.tp + self.fp) as Score
        } else {
            1.0
        }
    }

    pub fn recall(&self) -> Score {
        if self.tp + self.fn_ > 0 {
            self.tp as Score / (self.tp + self.fn_) as Score
        } else {
            1.0
        }
    }

    pub fn f(&self, beta: Beta) -> Score {
        f_beta(self.precision(), self.recall(), beta.value())
            .expect("Beta is validated positive")
    }
}

impl std::ops::Add for EvalCounts {
    type Output = EvalCounts;
    fn add(self, other: EvalCounts) -> EvalCounts {
        EvalCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
        }
    }
}

impl std::ops::AddAssign for EvalCounts {
    fn add_assign(&mut self, other: EvalCounts) {
        *self = *self + other;
    }
}

impl std::iter::Sum for EvalCounts {
    fn sum<I: Iterator<Item = EvalCounts>>(iter: I) -> EvalCounts {
        iter.fold(EvalCounts::default(), |acc, c| acc + c)
    }
}

/// Counts with their derived metrics for every requested beta.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub counts: EvalCounts,
    pub precision: Score,
    pub recall: Score,
    pub f: BTreeMap<Beta, Score>,
}

impl ScoreRow {
    pub fn from_counts(counts: EvalCounts, betas: &[Beta]) -> ScoreRow {
        ScoreRow {
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f: betas.iter().map(|&beta| (beta, counts.f(beta))).collect(),
        }
    }
}

/// Hypothesis/reference matching criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// TP iff some reference edit has identical `(start, end, replacement)`.
    /// The error type is never required to match; types only route counts
    /// into per-type strata.
    Correction,
    /// TP iff some reference edit has identical `(start, end)`.
    Detection,
}

/// Outcome of scoring one sentence against its best reference annotator.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceComparison {
    pub counts: EvalCounts,
    /// The annotator whose reference maximized sentence-level F0.5
    /// (ties: fewer FP, then fewer FN, then lowest id).
    pub annotator: usize,
    /// Matched (hypothesis, reference) edit pairs.
    pub matched: Vec<(Edit, Edit)>,
    /// Hypothesis edits with no reference match (the FPs).
    pub unmatched_hyp: Vec<Edit>,
    /// Reference edits with no hypothesis match (the FNs).
    pub unmatched_ref: Vec<Edit>,
    /// Per-label counts: TP and FN carry the reference edit's label, FP the
    /// hypothesis edit's own (classifier-assigned) label.
    pub by_label: BTreeMap<String, EvalCounts>,
}

fn match_key(edit: &Edit, mode: MatchMode) -> (usize, usize, Option<String>) {
    match mode {
        MatchMode::Correction => (edit.start, edit.end, Some(edit.replacement.clone())),
        MatchMode::Detection => (edit.start, edit.end, None),
    }
}

fn compare_against(hyp: &[&Edit], reference: &[&Edit], mode: MatchMode) -> SentenceComparison {
    let mut pool: HashMap<(usize, usize, Option<String>), VecDeque<&Edit>> = HashMap::new();
    for edit in reference {
        pool.entry(match_key(edit, mode)).or_default().push_back(edit);
    }

    let mut matched = Vec::new();
    let mut unmatched_hyp = Vec::new();
    for edit in hyp {
        match pool.get_mut(&match_key(edit, mode)).and_then(VecDeque::pop_front) {
            Some(ref_edit) => matched.push(((*edit).clone(), ref_edit.clone())),
            None => unmatched_hyp.push((*edit).clone()),
        }
    }
    let mut unmatched_ref: Vec<Edit> = pool
        .into_values()
        .flatten()
        .cloned()
        .collect();
    unmatched_ref.sort_by_key(|e| (e.start, e.end, e.replacement.clone()));

    let counts = EvalCounts::new(matched.len() as u64, unmatched_hyp.len() as u64, unmatched_ref.len() as u64);
    let mut by_label: BTreeMap<String, EvalCounts> = BTreeMap::new();
    for (_, ref_edit) in &matched {
        by_label.entry(ref_edit.label.to_string()).or_default().tp += 1;
    }
    for edit in &unmatched_hyp {
        by_label.entry(edit.label.to_string()).or_default().fp += 1;
    }
    for edit in &unmatched_ref {
        by_label.entry(edit.label.to_string()).or_default().fn_ += 1;
    }

    SentenceComparison {
        counts,
        annotator: 0,
        matched,
        unmatched_hyp,
        unmatched_ref,
        by_label,
    }
}

/// Scores hypothesis edits against every annotator of `reference` and keeps
/// the annotator that maximizes sentence-level F0.5.  Noop annotations
/// contribute zero reference edits, so a noop annotator plus an empty
/// hypothesis scores a perfect `(0, 0, 0)`.
pub fn compare_sentence(
    hyp_edits: &[Edit],
    reference: &M2Sentence,
    mode: MatchMode,
) -> Result<SentenceComparison, ScoreError> {
    let len = reference.source_tokens.len();
    let hyp: Vec<&Edit> = hyp_edits.iter().filter(|e| !e.is_noop()).collect();
    for edit in &hyp {
        if edit.end > len || edit.start > edit.end {
            return Err(ScoreError::HypothesisSpanOutOfRange {
                start: edit.start,
                end: edit.end,
                len,
            });
        }
    }

    let annotators: Vec<usize> = if reference.annotations.is_empty() {
        vec![0]
    } else {
        reference.annotations.keys().copied().collect()
    };

    let mut best: Option<(Score, SentenceComparison)> = None;
    for annotator in annotators {
        let reference_edits = reference.reference_edits(annotator);
        let mut comparison = compare_against(&hyp, &reference_edits, mode);
        comparison.annotator = annotator;
        let f = comparison.counts.f(Beta::HALF);
        let better = match &best {
            None => true,
            Some((best_f, best_cmp)) => {
                f > *best_f
                    || (f == *best_f
                        && (comparison.counts.fp < best_cmp.counts.fp
                            || (comparison.counts.fp == best_cmp.counts.fp
                                && comparison.counts.fn_ < best_cmp.counts.fn_)))
            }
        };
        if better {
            best = Some((f, comparison));
        }
    }
    Ok(best.expect("at least one annotator candidate").1)
}

/// Proficiency axis of a stratum: a concrete level or the grand total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelKey {
    Level(ProficiencyLevel),
    All,
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelKey::Level(level) => write!(f, "{level}"),
            LevelKey::All => f.write_str("all"),
        }
    }
}

/// Label axis of a stratum: everything, one edit operation, or one type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKey {
    Total,
    Op(EditOp),
    Type(String),
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKey::Total => Ok(()),
            LabelKey::Op(op) => write!(f, "{op}:*"),
            LabelKey::Type(t) => f.write_str(t),
        }
    }
}

/// One report stratum, rendered as `all`, `B`, `B/M:PUNCT`, `B/M:*`, ...
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumKey {
    pub level: LevelKey,
    pub label: LabelKey,
}

impl StratumKey {
    pub fn total(level: LevelKey) -> Self {
        StratumKey { level, label: LabelKey::Total }
    }

    pub fn parse(text: &str) -> Result<StratumKey, ScoreError> {
        let bad = || ScoreError::BadStratumKey { text: text.to_string() };
        let (level_text, label_text) = match text.split_once('/') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let level = if level_text == "all" {
            LevelKey::All
        } else {
            LevelKey::Level(level_text.parse().map_err(|_| bad())?)
        };
        let label = match label_text {
            None => LabelKey::Total,
            Some(t) => match parse_selector(t).map_err(|_| bad())? {
                Selector::Op(op) => LabelKey::Op(op),
                Selector::Exact(s) => LabelKey::Type(s),
                Selector::All => return Err(bad()),
            },
        };
        Ok(StratumKey { level, label })
    }
}

impl fmt::Display for StratumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            LabelKey::Total => write!(f, "{}", self.level),
            label => write!(f, "{}/{}", self.level, label),
        }
    }
}

/// Report over every stratum: per-level totals, per-level × type, per-level
/// × edit op, plus the `all` aggregates of each.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedReport {
    pub betas: Vec<Beta>,
    pub rows: BTreeMap<StratumKey, ScoreRow>,
}

impl StratifiedReport {
    pub fn get(&self, key: &StratumKey) -> Option<&ScoreRow> {
        self.rows.get(key)
    }

    pub fn levels(&self) -> Vec<LevelKey> {
        let mut levels: Vec<LevelKey> = self
            .rows
            .keys()
            .filter(|k| k.label == LabelKey::Total)
            .map(|k| k.level)
            .collect();
        levels.dedup();
        levels
    }
}

/// Micro-aggregates per-sentence comparisons into a [`StratifiedReport`].
///
/// Counts are summed per proficiency, per error type, per edit op, and
/// overall; only then are P/R/F computed.  Panics (debug and release) if the
/// per-type partition or the per-level partition fails to sum to its total,
/// which cannot happen for comparisons produced by [`compare_sentence`].
pub fn aggregate(
    items: &[(ProficiencyLevel, SentenceComparison)],
    betas: &[Beta],
) -> StratifiedReport {
    let mut totals: BTreeMap<StratumKey, EvalCounts> = BTreeMap::new();
    for (level, comparison) in items {
        for level_key in [LevelKey::Level(*level), LevelKey::All] {
            *totals.entry(StratumKey::total(level_key)).or_default() += comparison.counts;
            for (label, counts) in &comparison.by_label {
                *totals
                    .entry(StratumKey { level: level_key, label: LabelKey::Type(label.clone()) })
                    .or_default() += *counts;
                if let Some(op) = EditLabel::parse(label).op() {
                    *totals
                        .entry(StratumKey { level: level_key, label: LabelKey::Op(op) })
                        .or_default() += *counts;
                }
            }
        }
    }
    if items.is_empty() {
        totals.insert(StratumKey::total(LevelKey::All), EvalCounts::default());
    }

    // Partition invariants: per-type counts sum to the stratum total, and
    // per-level totals sum to `all`.
    let level_keys: Vec<LevelKey> = totals
        .keys()
        .filter(|k| k.label == LabelKey::Total)
        .map(|k| k.level)
        .collect();
    let mut level_sum = EvalCounts::default();
    for level in &level_keys {
        let total = totals[&StratumKey::total(*level)];
        let type_sum: EvalCounts = totals
            .iter()
            .filter(|(k, _)| k.level == *level && matches!(k.label, LabelKey::Type(_)))
            .map(|(_, c)| *c)
            .sum();
        assert_eq!(type_sum, total, "per-type partition broken for {level}");
        if *level != LevelKey::All {
            level_sum += total;
        }
    }
    if level_keys.iter().any(|l| *l != LevelKey::All) {
        assert_eq!(
            level_sum,
            totals[&StratumKey::total(LevelKey::All)],
            "per-level partition broken"
        );
    }

    StratifiedReport {
        betas: betas.to_vec(),
        rows: totals
            .into_iter()
            .map(|(key, counts)| (key, ScoreRow::from_counts(counts, betas)))
            .collect(),
    }
}

enum Selector {
    All,
    Op(EditOp),
    Exact(String),
}

fn parse_selector(text: &str) -> Result<Selector, ScoreError> {
    let bad = || ScoreError::BadSelector { text: text.to_string() };
    if text == "*" {
        return Ok(Selector::All);
    }
    let (op_text, rest) = text.split_once(':').ok_or_else(bad)?;
    let op: EditOp = op_text.parse().map_err(|()| bad())?;
    if rest == "*" {
        Ok(Selector::Op(op))
    } else if rest.is_empty() || rest.contains(char::is_whitespace) {
        Err(bad())
    } else {
        Ok(Selector::Exact(text.to_string()))
    }
}

/// Filters a report's label rows by an error-type selector: an exact type
/// (`"R:DET"`), an op wildcard (`"M:*"`, the sum over all categories with
/// that op), or `"*"` for every populated type.  Rows are grouped by level
/// and ordered by descending TP then type string.
pub fn label_breakdown(
    report: &StratifiedReport,
    selector: &str,
) -> Result<Vec<(StratumKey, ScoreRow)>, ScoreError> {
    let selector = parse_selector(selector)?;
    let mut out = Vec::new();
    for level in report.levels() {
        match &selector {
            Selector::All => {
                let mut rows: Vec<(StratumKey, ScoreRow)> = report
                    .rows
                    .iter()
                    .filter(|(k, _)| k.level == level && matches!(k.label, LabelKey::Type(_)))
                    .map(|(k, row)| (k.clone(), row.clone()))
                    .collect();
                rows.sort_by(|(ka, a), (kb, b)| {
                    b.counts
                        .tp
                        .cmp(&a.counts.tp)
                        .then_with(|| ka.label.cmp(&kb.label))
                });
                out.extend(rows);
            }
            Selector::Op(op) => {
                let key = StratumKey { level, label: LabelKey::Op(*op) };
                if let Some(row) = report.rows.get(&key) {
                    out.push((key, row.clone()));
                }
            }
            Selector::Exact(t) => {
                let key = StratumKey { level, label: LabelKey::Type(t.clone()) };
                if let Some(row) = report.rows.get(&key) {
                    out.push((key, row.clone()));
                }
            }
        }
    }
    Ok(out)
}
