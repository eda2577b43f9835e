//! Minimum-cost token alignment and edit extraction.
//!
//! [`align`] runs a Damerau-Levenshtein dynamic program with configurable
//! costs over two token sequences, [`merge_alignment`] collapses the op path
//! into contiguous [`RawEdit`]s, and [`extract_edits`] chains both with the
//! rule-based classifier to turn a (source, hypothesis) pair into scoreable
//! [`Edit`]s.
//!
//! Costs are generic over [`CostScalar`]; the crate default [`crate::Cost`]
//! is an exact rational, so minimum-cost paths and tie-breaks are
//! bit-stable.

use crate::classify::{classify_edit, Lexicon};
use crate::m2::Edit;
use crate::scalar::CostScalar;
use crate::Cost;

/// Largest adjacent block considered for transposition.
const MAX_TRANSPOSE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Match,
    Substitute,
    Insert,
    Delete,
    Transpose,
}

/// One step of an alignment path.  `Match`/`Substitute` cover one token on
/// each side, `Insert` has an empty source range, `Delete` an empty target
/// range, and `Transpose` covers an adjacent block of 2–4 tokens per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentOp<C = Cost> {
    pub kind: OpKind,
    pub src_start: usize,
    pub src_end: usize,
    pub tgt_start: usize,
    pub tgt_end: usize,
    pub cost: C,
}

/// A full alignment: the op path in source order plus the DP terminal cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<C = Cost> {
    pub ops: Vec<AlignmentOp<C>>,
    pub total_cost: C,
}

/// Alignment costs.  `Match` is fixed at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostConfig<C = Cost> {
    pub substitute_base: C,
    pub insert: C,
    pub delete: C,
    /// Substitution cost when the two tokens are case-insensitively equal,
    /// biasing the path toward treating capitalization fixes as
    /// substitutions rather than delete+insert pairs.
    pub case_only_substitute: C,
    /// Per-token cost of transposing an adjacent block.
    pub transpose_per_token: C,
}

impl<C: CostScalar> Default for CostConfig<C> {
    fn default() -> Self {
        let one = C::one();
        CostConfig {
            substitute_base: one,
            insert: one,
            delete: one,
            case_only_substitute: one / C::from_u64(10).expect("small integer fits any scalar"),
            transpose_per_token: one / C::from_u64(2).expect("small integer fits any scalar"),
        }
    }
}

impl<C: CostScalar> CostConfig<C> {
    pub fn validate(&self) -> Result<(), AlignError> {
        let fields = [
            ("substitute_base", self.substitute_base),
            ("insert", self.insert),
            ("delete", self.delete),
            ("case_only_substitute", self.case_only_substitute),
            ("transpose_per_token", self.transpose_per_token),
        ];
        for (field, value) in fields {
            if value < C::zero() {
                return Err(AlignError::NegativeCost { field });
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("negative cost in CostConfig field `{field}`")]
    NegativeCost { field: &'static str },
    #[error("non-contiguous alignment op at index {index}: op starts at ({op_src}, {op_tgt}), cursor is at ({cursor_src}, {cursor_tgt})")]
    NonContiguous {
        index: usize,
        op_src: usize,
        op_tgt: usize,
        cursor_src: usize,
        cursor_tgt: usize,
    },
    #[error("alignment ops cover ({covered_src}, {covered_tgt}) tokens of ({src_len}, {tgt_len})")]
    IncompleteCoverage {
        covered_src: usize,
        covered_tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },
}

/// A merged, not-yet-classified edit: a source span rewritten into a target
/// span, with the token material of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdit {
    pub src_start: usize,
    pub src_end: usize,
    pub tgt_start: usize,
    pub tgt_end: usize,
    pub source: Vec<String>,
    pub replacement: Vec<String>,
}

impl RawEdit {
    pub fn is_insertion(&self) -> bool {
        self.source.is_empty()
    }

    pub fn is_deletion(&self) -> bool {
        self.replacement.is_empty()
    }
}

/// Returns one minimum-total-cost alignment of `source` to `target`.
///
/// Total over all inputs (empty sides included).  Ties are broken
/// deterministically during backtrace by scanning op kinds in the fixed
/// order Match, Substitute, Transpose (smallest block first), Delete,
/// Insert, so equal inputs always produce identical op lists.
pub fn align<S: AsRef<str>, C: CostScalar>(
    source: &[S],
    target: &[S],
    cfg: &CostConfig<C>,
) -> Alignment<C> {
    debug_assert!(cfg.validate().is_ok(), "align called with invalid costs");
    let n = source.len();
    let m = target.len();
    let src: Vec<&str> = source.iter().map(AsRef::as_ref).collect();
    let tgt: Vec<&str> = target.iter().map(AsRef::as_ref).collect();
    let src_lower: Vec<String> = src.iter().map(|t| t.to_lowercase()).collect();
    let tgt_lower: Vec<String> = tgt.iter().map(|t| t.to_lowercase()).collect();

    let width = m + 1;
    let mut dp: Vec<C> = vec![C::zero(); (n + 1) * width];
    for i in 1..=n {
        dp[i * width] = dp[(i - 1) * width] + cfg.delete;
    }
    for j in 1..=m {
        dp[j] = dp[j - 1] + cfg.insert;
    }

    let sub_cost = |i: usize, j: usize| -> C {
        if src_lower[i] == tgt_lower[j] {
            cfg.case_only_substitute
        } else {
            cfg.substitute_base
        }
    };
    let transposable = |i: usize, j: usize, k: usize| -> bool {
        if i < k || j < k {
            return false;
        }
        let mut a: Vec<&str> = src_lower[i - k..i].iter().map(String::as_str).collect();
        let mut b: Vec<&str> = tgt_lower[j - k..j].iter().map(String::as_str).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    };

    for i in 1..=n {
        for j in 1..=m {
            let diag = dp[(i - 1) * width + (j - 1)];
            let mut best = if src[i - 1] == tgt[j - 1] {
                diag
            } else {
                diag + sub_cost(i - 1, j - 1)
            };
            let del = dp[(i - 1) * width + j] + cfg.delete;
            if del < best {
                best = del;
            }
            let ins = dp[i * width + (j - 1)] + cfg.insert;
            if ins < best {
                best = ins;
            }
            for k in 2..=MAX_TRANSPOSE.min(i).min(j) {
                if transposable(i, j, k) {
                    let cost = dp[(i - k) * width + (j - k)]
                        + cfg.transpose_per_token * C::from_usize(k).expect("block size fits any scalar");
                    if cost < best {
                        best = cost;
                    }
                }
            }
            dp[i * width + j] = best;
        }
    }

    // Backtrace with the fixed tie-break order.
    let mut ops: Vec<AlignmentOp<C>> = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        let op = 'pick: {
            if i > 0 && j > 0 {
                let diag = dp[(i - 1) * width + (j - 1)];
                if src[i - 1] == tgt[j - 1] && diag == here {
                    break 'pick AlignmentOp {
                        kind: OpKind::Match,
                        src_start: i - 1,
                        src_end: i,
                        tgt_start: j - 1,
                        tgt_end: j,
                        cost: C::zero(),
                    };
                }
                if src[i - 1] != tgt[j - 1] {
                    let cost = sub_cost(i - 1, j - 1);
                    if diag + cost == here {
                        break 'pick AlignmentOp {
                            kind: OpKind::Substitute,
                            src_start: i - 1,
                            src_end: i,
                            tgt_start: j - 1,
                            tgt_end: j,
                            cost,
                        };
                    }
                }
                for k in 2..=MAX_TRANSPOSE.min(i).min(j) {
                    if transposable(i, j, k) {
                        let cost = cfg.transpose_per_token
                            * C::from_usize(k).expect("block size fits any scalar");
                        if dp[(i - k) * width + (j - k)] + cost == here {
                            break 'pick AlignmentOp {
                                kind: OpKind::Transpose,
                                src_start: i - k,
                                src_end: i,
                                tgt_start: j - k,
                                tgt_end: j,
                                cost,
                            };
                        }
                    }
                }
            }
            if i > 0 && dp[(i - 1) * width + j] + cfg.delete == here {
                break 'pick AlignmentOp {
                    kind: OpKind::Delete,
                    src_start: i - 1,
                    src_end: i,
                    tgt_start: j,
                    tgt_end: j,
                    cost: cfg.delete,
                };
            }
            debug_assert!(j > 0 && dp[i * width + (j - 1)] + cfg.insert == here);
            AlignmentOp {
                kind: OpKind::Insert,
                src_start: i,
                src_end: i,
                tgt_start: j - 1,
                tgt_end: j,
                cost: cfg.insert,
            }
        };
        i = op.src_start;
        j = op.tgt_start;
        ops.push(op);
    }
    ops.reverse();

    Alignment {
        total_cost: dp[n * width + m],
        ops,
    }
}

/// Collapses an alignment path into [`RawEdit`]s.
///
/// `Match` ops are boundaries and a `Transpose` always forms its own edit.
/// Runs of the remaining ops merge into one edit, except that two adjacent
/// `Substitute` ops stay separate, keeping single-token replacements at the
/// granularity reference annotations use.  Insertions between two matches
/// keep an empty source span at the boundary index.
pub fn merge_alignment<S: AsRef<str>, C: CostScalar>(
    source: &[S],
    target: &[S],
    ops: &[AlignmentOp<C>],
) -> Result<Vec<RawEdit>, AlignError> {
    let (mut cursor_src, mut cursor_tgt) = (0usize, 0usize);
    for (index, op) in ops.iter().enumerate() {
        if op.src_start != cursor_src || op.tgt_start != cursor_tgt {
            return Err(AlignError::NonContiguous {
                index,
                op_src: op.src_start,
                op_tgt: op.tgt_start,
                cursor_src,
                cursor_tgt,
            });
        }
        cursor_src = op.src_end;
        cursor_tgt = op.tgt_end;
    }
    if cursor_src != source.len() || cursor_tgt != target.len() {
        return Err(AlignError::IncompleteCoverage {
            covered_src: cursor_src,
            covered_tgt: cursor_tgt,
            src_len: source.len(),
            tgt_len: target.len(),
        });
    }
    Ok(merge_runs(source, target, ops))
}

fn merge_runs<S: AsRef<str>, C: CostScalar>(
    source: &[S],
    target: &[S],
    ops: &[AlignmentOp<C>],
) -> Vec<RawEdit> {
    let make = |src_start: usize, src_end: usize, tgt_start: usize, tgt_end: usize| RawEdit {
        src_start,
        src_end,
        tgt_start,
        tgt_end,
        source: source[src_start..src_end]
            .iter()
            .map(|t| t.as_ref().to_string())
            .collect(),
        replacement: target[tgt_start..tgt_end]
            .iter()
            .map(|t| t.as_ref().to_string())
            .collect(),
    };

    let mut edits = Vec::new();
    // (src_start, tgt_start, src_end, tgt_end, last kind) of the open run
    let mut run: Option<(usize, usize, usize, usize, OpKind)> = None;
    let flush = |run: &mut Option<(usize, usize, usize, usize, OpKind)>, edits: &mut Vec<RawEdit>| {
        if let Some((src_start, tgt_start, src_end, tgt_end, _)) = run.take() {
            edits.push(make(src_start, src_end, tgt_start, tgt_end));
        }
    };

    for op in ops {
        match op.kind {
            OpKind::Match => flush(&mut run, &mut edits),
            OpKind::Transpose => {
                flush(&mut run, &mut edits);
                edits.push(make(op.src_start, op.src_end, op.tgt_start, op.tgt_end));
            }
            OpKind::Substitute | OpKind::Insert | OpKind::Delete => {
                if op.kind == OpKind::Substitute
                    && matches!(run, Some((_, _, _, _, OpKind::Substitute)))
                {
                    flush(&mut run, &mut edits);
                }
                match &mut run {
                    Some((_, _, se, te, last)) => {
                        *se = op.src_end;
                        *te = op.tgt_end;
                        *last = op.kind;
                    }
                    None => {
                        run = Some((op.src_start, op.tgt_start, op.src_end, op.tgt_end, op.kind));
                    }
                }
            }
        }
    }
    flush(&mut run, &mut edits);
    edits
}

/// Full extraction pipeline: align, merge, and classify each raw edit.
///
/// The result always satisfies `apply_edits(source, result) == target` and is
/// empty when the two sides are identical.
pub fn extract_edits<S: AsRef<str>, C: CostScalar>(
    source: &[S],
    target: &[S],
    cfg: &CostConfig<C>,
    lexicon: &Lexicon,
) -> Vec<Edit> {
    let alignment = align(source, target, cfg);
    merge_runs(source, target, &alignment.ops)
        .into_iter()
        .map(|raw| {
            let label = classify_edit(&raw, lexicon);
            Edit::new(raw.src_start, raw.src_end, raw.replacement.join(" "), label, 0)
        })
        .collect()
}
