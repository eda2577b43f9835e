//! Proficiency-stratified grammatical-error-correction (GEC) evaluation.
//!
//! The crate covers the full offline pipeline for scoring sentence
//! corrections against multi-annotator references:
//!
//! - [`m2`] — parsing, serialization, and application of M2 edit-annotation
//!   files (the BEA-2019 interchange format).
//! - [`align`] — minimum-cost token alignment between a source sentence and a
//!   corrected hypothesis, merged into contiguous edits.
//! - [`classify`] — rule-based error typing (`M:PUNCT`, `R:PREP`, ...) with a
//!   bundled closed-class lexicon.
//! - [`score`] — TP/FP/FN accumulation and precision / recall / F-beta
//!   reports stratified by proficiency level, error type, and edit operation.
//! - [`stats`] — corpus descriptors (error-type ratios, tokens per sentence).
//! - [`harness`] — zero-/few-shot prompt construction, a generic completion
//!   endpoint client, deterministic mock correctors, and a checkpointing
//!   batch runner with record/replay support.
//! - [`report`] — the versioned JSON report schema shared with the CLI.
//!
//! Numeric code is generic over the scalar type: alignment costs take any
//! [`scalar::CostScalar`] and metrics any [`scalar::MetricScalar`].  The
//! concrete aliases used throughout the crate are [`Cost`] (an exact
//! rational, so alignment tie-breaks never depend on float rounding) and
//! [`Score`].

pub mod align;
pub mod classify;
pub mod error_type;
pub mod harness;
pub mod m2;
pub mod report;
pub mod scalar;
pub mod score;
pub mod stats;

/// Alignment cost scalar: exact rational arithmetic.
pub type Cost = num_rational::Ratio<i64>;

/// Metric scalar for precision / recall / F-beta values.
pub type Score = f64;

pub use align::{align, extract_edits, merge_alignment, AlignError, Alignment, AlignmentOp, CostConfig, OpKind, RawEdit};
pub use classify::{classify_edit, Lexicon, LexiconError, PosTag};
pub use error_type::{Category, EditLabel, EditOp, ErrorType};
pub use m2::{apply_edits, parse_m2, serialize_m2, Edit, M2Error, M2Sentence, ProficiencyLevel};
pub use score::{
    aggregate, compare_sentence, f_beta, label_breakdown, Beta, EvalCounts, LabelKey, LevelKey,
    MatchMode, ScoreError, ScoreRow, SentenceComparison, StratifiedReport, StratumKey,
};
pub use stats::{summarize, top_k_errors, AnnotatorPolicy, CorpusSummary, StatsError};
