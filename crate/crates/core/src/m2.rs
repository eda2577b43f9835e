//! Bit-exact parsing, serialization, and application of M2 edit-annotation
//! files.
//!
//! An M2 file is a sequence of blocks separated by blank lines.  Each block
//! has one `S` line (the whitespace-tokenized source sentence) followed by
//! zero or more `A` lines:
//!
//! ```text
//! S in addition more and more scientists agree with alien really exist
//! A 0 1|||R:ORTH|||In|||REQUIRED|||-NONE-|||0
//! ```
//!
//! `A` lines carry six `|||`-separated fields: span (`start end`), type,
//! replacement (`-NONE-` encodes empty), required flag, comment, annotator
//! id.  The required flag and comment are preserved verbatim and otherwise
//! unused.  Tokens are exactly what whitespace-splitting the `S` line
//! yields; this module never re-tokenizes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error_type::EditLabel;

/// Sentinel encoding an empty replacement in the M2 replacement field.
const NONE_FIELD: &str = "-NONE-";

/// CEFR proficiency level; `N` marks native text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProficiencyLevel {
    A,
    B,
    C,
    N,
}

impl ProficiencyLevel {
    pub const ALL: [ProficiencyLevel; 4] = [
        ProficiencyLevel::A,
        ProficiencyLevel::B,
        ProficiencyLevel::C,
        ProficiencyLevel::N,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProficiencyLevel::A => "A",
            ProficiencyLevel::B => "B",
            ProficiencyLevel::C => "C",
            ProficiencyLevel::N => "N",
        }
    }
}

impl FromStr for ProficiencyLevel {
    type Err = M2Error;

    fn from_str(s: &str) -> Result<Self, M2Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(ProficiencyLevel::A),
            "B" => Ok(ProficiencyLevel::B),
            "C" => Ok(ProficiencyLevel::C),
            "N" => Ok(ProficiencyLevel::N),
            _ => Err(M2Error::BadProficiency { text: s.to_string() }),
        }
    }
}

impl fmt::Display for ProficiencyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One edit over a source sentence: a half-open token span `[start, end)`,
/// a space-joined replacement (empty string deletes the span), a label, and
/// the annotator that proposed it.
///
/// `start == end` inserts before `start`.  The `noop` sentinel (span `-1 -1`
/// on disk) is modeled by [`EditLabel::Noop`]; its `start`/`end` are zero and
/// carry no meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: String,
    pub label: EditLabel,
    /// Required flag field, preserved verbatim (usually `REQUIRED`).
    pub required: String,
    /// Comment field, preserved verbatim (usually `-NONE-`).
    pub comment: String,
    pub annotator: usize,
}

impl Edit {
    pub fn new(
        start: usize,
        end: usize,
        replacement: impl Into<String>,
        label: impl Into<EditLabel>,
        annotator: usize,
    ) -> Self {
        Edit {
            start,
            end,
            replacement: replacement.into(),
            label: label.into(),
            required: "REQUIRED".to_string(),
            comment: NONE_FIELD.to_string(),
            annotator,
        }
    }

    pub fn noop(annotator: usize) -> Self {
        Edit {
            start: 0,
            end: 0,
            replacement: String::new(),
            label: EditLabel::Noop,
            required: "REQUIRED".to_string(),
            comment: NONE_FIELD.to_string(),
            annotator,
        }
    }

    pub fn is_noop(&self) -> bool {
        self.label.is_noop()
    }

    pub fn is_insertion(&self) -> bool {
        !self.is_noop() && self.start == self.end
    }

    pub fn is_deletion(&self) -> bool {
        !self.is_noop() && self.replacement.is_empty()
    }

    /// Replacement as individual tokens (empty for deletions).
    pub fn replacement_tokens(&self) -> Vec<&str> {
        if self.replacement.is_empty() {
            Vec::new()
        } else {
            self.replacement.split(' ').collect()
        }
    }
}

/// One source sentence plus per-annotator edit lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Sentence {
    pub source_tokens: Vec<String>,
    /// Annotator id → edits, sorted by `(start, end)` within each annotator.
    /// Ids need not be contiguous and 0 need not exist.
    pub annotations: BTreeMap<usize, Vec<Edit>>,
    /// 1-based line number of the `S` line, for diagnostics.
    pub origin_line: usize,
}

impl M2Sentence {
    pub fn new(source_tokens: Vec<String>) -> Self {
        M2Sentence {
            source_tokens,
            annotations: BTreeMap::new(),
            origin_line: 0,
        }
    }

    pub fn source_text(&self) -> String {
        self.source_tokens.join(" ")
    }

    pub fn lowest_annotator(&self) -> Option<usize> {
        self.annotations.keys().next().copied()
    }

    /// Edits of one annotator with the noop sentinel filtered out.
    pub fn reference_edits(&self, annotator: usize) -> Vec<&Edit> {
        self.annotations
            .get(&annotator)
            .map(|edits| edits.iter().filter(|e| !e.is_noop()).collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum M2Error {
    #[error("line {line}: malformed M2 line: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: edit span {start} {end} out of range for {len} source tokens")]
    SpanOutOfRange {
        line: usize,
        start: i64,
        end: i64,
        len: usize,
    },
    #[error("line {line}: non-integer annotator field {text:?}")]
    BadAnnotator { line: usize, text: String },
    #[error("sentence {index}: {reason}")]
    InvalidSentence { index: usize, reason: String },
    #[error("edits overlap: span {first_start}..{first_end} vs {second_start}..{second_end}")]
    OverlappingEdits {
        first_start: usize,
        first_end: usize,
        second_start: usize,
        second_end: usize,
    },
    #[error("edit span {start}..{end} exceeds {len} source tokens")]
    SpanBeyondSource { start: usize, end: usize, len: usize },
    #[error("noop edit passed to apply_edits")]
    NoopInApply,
    #[error("not a proficiency level letter: {text:?}")]
    BadProficiency { text: String },
}

/// Parses M2 text into sentences, in file order.
///
/// Edits are canonicalized on the way in: per annotator, sorted stably by
/// `(start, end)` (same-index insertions keep file order) and checked for
/// overlap, span validity, and noop exclusivity.
pub fn parse_m2(text: &str) -> Result<Vec<M2Sentence>, M2Error> {
    let mut sentences = Vec::new();
    let mut current: Option<M2Sentence> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);

        if line.trim().is_empty() {
            if let Some(sentence) = current.take() {
                sentences.push(finish_sentence(sentence)?);
            }
            continue;
        }

        if line == "S" || line.starts_with("S ") {
            if current.is_some() {
                return Err(M2Error::Malformed {
                    line: line_no,
                    text: format!("expected blank line before new sentence: {line:?}"),
                });
            }
            let tokens: Vec<String> = line[1..].split_whitespace().map(str::to_string).collect();
            let mut sentence = M2Sentence::new(tokens);
            sentence.origin_line = line_no;
            current = Some(sentence);
        } else if line.starts_with("A ") {
            let sentence = current.as_mut().ok_or_else(|| M2Error::Malformed {
                line: line_no,
                text: format!("edit line before any sentence: {line:?}"),
            })?;
            let edit = parse_edit_line(line, line_no, sentence.source_tokens.len())?;
            sentence.annotations.entry(edit.annotator).or_default().push(edit);
        } else {
            return Err(M2Error::Malformed {
                line: line_no,
                text: line.to_string(),
            });
        }
    }

    if let Some(sentence) = current.take() {
        sentences.push(finish_sentence(sentence)?);
    }
    Ok(sentences)
}

fn parse_edit_line(line: &str, line_no: usize, source_len: usize) -> Result<Edit, M2Error> {
    let body = &line[2..];
    let fields: Vec<&str> = body.split("|||").collect();
    if fields.len() != 6 {
        return Err(M2Error::Malformed {
            line: line_no,
            text: format!("expected 6 `|||`-separated fields, found {}: {line:?}", fields.len()),
        });
    }

    let (start_text, end_text) = fields[0].split_once(' ').ok_or_else(|| M2Error::Malformed {
        line: line_no,
        text: format!("span field must be `start end`: {:?}", fields[0]),
    })?;
    let start: i64 = start_text.parse().map_err(|_| M2Error::Malformed {
        line: line_no,
        text: format!("non-integer span start: {start_text:?}"),
    })?;
    let end: i64 = end_text.parse().map_err(|_| M2Error::Malformed {
        line: line_no,
        text: format!("non-integer span end: {end_text:?}"),
    })?;

    let label = EditLabel::parse(fields[1]);
    let replacement_field = fields[2].trim();
    let replacement = if replacement_field == NONE_FIELD {
        String::new()
    } else {
        replacement_field.split_whitespace().collect::<Vec<_>>().join(" ")
    };
    let annotator: usize = fields[5].trim().parse().map_err(|_| M2Error::BadAnnotator {
        line: line_no,
        text: fields[5].to_string(),
    })?;

    if label.is_noop() {
        if (start, end) != (-1, -1) {
            return Err(M2Error::Malformed {
                line: line_no,
                text: format!("noop edit must have span `-1 -1`, found `{start} {end}`"),
            });
        }
        let mut edit = Edit::noop(annotator);
        edit.required = fields[3].to_string();
        edit.comment = fields[4].to_string();
        return Ok(edit);
    }

    if (start, end) == (-1, -1) {
        return Err(M2Error::Malformed {
            line: line_no,
            text: format!("span `-1 -1` is reserved for noop edits, found type {:?}", fields[1]),
        });
    }
    if start < 0 || end < start || end > source_len as i64 {
        return Err(M2Error::SpanOutOfRange {
            line: line_no,
            start,
            end,
            len: source_len,
        });
    }

    Ok(Edit {
        start: start as usize,
        end: end as usize,
        replacement,
        label,
        required: fields[3].to_string(),
        comment: fields[4].to_string(),
        annotator,
    })
}

fn finish_sentence(mut sentence: M2Sentence) -> Result<M2Sentence, M2Error> {
    for edits in sentence.annotations.values_mut() {
        edits.sort_by_key(|e| (e.start, e.end));
        if edits.iter().any(Edit::is_noop) && edits.len() > 1 {
            return Err(M2Error::InvalidSentence {
                index: sentence.origin_line,
                reason: "annotator mixes noop with other edits".to_string(),
            });
        }
        check_disjoint(edits)?;
    }
    Ok(sentence)
}

fn check_disjoint(edits: &[Edit]) -> Result<(), M2Error> {
    for pair in edits.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.is_noop() || b.is_noop() {
            continue;
        }
        if b.start < a.end {
            return Err(M2Error::OverlappingEdits {
                first_start: a.start,
                first_end: a.end,
                second_start: b.start,
                second_end: b.end,
            });
        }
    }
    Ok(())
}

/// Serializes sentences back to M2 text.
///
/// Inverse of [`parse_m2`] over canonical input: fields joined with `|||`,
/// A-lines ordered by annotator then span, blocks separated by exactly one
/// blank line, trailing newline at end of file.  The empty list serializes
/// to the empty string.
pub fn serialize_m2(sentences: &[M2Sentence]) -> Result<String, M2Error> {
    let mut blocks = Vec::with_capacity(sentences.len());
    for (index, sentence) in sentences.iter().enumerate() {
        blocks.push(serialize_sentence(sentence, index)?);
    }
    if blocks.is_empty() {
        Ok(String::new())
    } else {
        Ok(blocks.join("\n\n") + "\n")
    }
}

fn serialize_sentence(sentence: &M2Sentence, index: usize) -> Result<String, M2Error> {
    let invalid = |reason: String| M2Error::InvalidSentence { index, reason };

    for token in &sentence.source_tokens {
        if token.chars().any(char::is_whitespace) || token.is_empty() {
            return Err(invalid(format!("source token {token:?} is empty or contains whitespace")));
        }
    }

    let mut lines = Vec::new();
    if sentence.source_tokens.is_empty() {
        lines.push("S".to_string());
    } else {
        lines.push(format!("S {}", sentence.source_text()));
    }

    for (&annotator, edits) in &sentence.annotations {
        let mut sorted: Vec<&Edit> = edits.iter().collect();
        sorted.sort_by_key(|e| (e.start, e.end));
        if sorted.iter().any(|e| e.is_noop()) && sorted.len() > 1 {
            return Err(invalid(format!("annotator {annotator} mixes noop with other edits")));
        }
        for edit in &sorted {
            if edit.annotator != annotator {
                return Err(invalid(format!(
                    "edit annotator {} disagrees with its map key {annotator}",
                    edit.annotator
                )));
            }
            for field in [&edit.replacement, &edit.required, &edit.comment] {
                if field.contains("|||") || field.contains('\n') {
                    return Err(invalid(format!("field {field:?} contains a reserved sequence")));
                }
            }
            if edit.replacement != edit.replacement.trim() {
                return Err(invalid(format!(
                    "replacement {:?} has leading or trailing whitespace",
                    edit.replacement
                )));
            }
            let (span, type_field) = if edit.is_noop() {
                ("-1 -1".to_string(), "noop".to_string())
            } else {
                if edit.end > sentence.source_tokens.len() || edit.start > edit.end {
                    return Err(invalid(format!(
                        "edit span {}..{} invalid for {} source tokens",
                        edit.start,
                        edit.end,
                        sentence.source_tokens.len()
                    )));
                }
                (format!("{} {}", edit.start, edit.end), edit.label.to_string())
            };
            let replacement = if edit.replacement.is_empty() {
                NONE_FIELD
            } else {
                edit.replacement.as_str()
            };
            lines.push(format!(
                "A {span}|||{type_field}|||{replacement}|||{}|||{}|||{annotator}",
                edit.required, edit.comment
            ));
        }
        let non_noop: Vec<&&Edit> = sorted.iter().filter(|e| !e.is_noop()).collect();
        for pair in non_noop.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(invalid(format!(
                    "annotator {annotator} has overlapping edits {}..{} and {}..{}",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                )));
            }
        }
    }
    Ok(lines.join("\n"))
}

/// Applies one annotator's edits to the source tokens.
///
/// Edits must be sorted, non-overlapping, and noop-free.  They are applied
/// right to left so earlier spans keep their indices; an empty replacement
/// deletes the span.
pub fn apply_edits<S: AsRef<str>>(source_tokens: &[S], edits: &[Edit]) -> Result<Vec<String>, M2Error> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    for edit in &sorted {
        if edit.is_noop() {
            return Err(M2Error::NoopInApply);
        }
        if edit.end > source_tokens.len() || edit.start > edit.end {
            return Err(M2Error::SpanBeyondSource {
                start: edit.start,
                end: edit.end,
                len: source_tokens.len(),
            });
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(M2Error::OverlappingEdits {
                first_start: pair[0].start,
                first_end: pair[0].end,
                second_start: pair[1].start,
                second_end: pair[1].end,
            });
        }
    }

    let mut tokens: Vec<String> = source_tokens.iter().map(|t| t.as_ref().to_string()).collect();
    for edit in sorted.iter().rev() {
        let replacement: Vec<String> = edit.replacement_tokens().iter().map(|t| t.to_string()).collect();
        tokens.splice(edit.start..edit.end, replacement);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_type::{Category, EditOp, ErrorType};

    const EXAMPLE_LINE: &str =
        "S in addition more and more scientists agree with alien really exist\nA 0 1|||R:ORTH|||In|||REQUIRED|||-NONE-|||0";

    #[test]
    fn parses_single_edit_sentence() {
        let sentences = parse_m2(EXAMPLE_LINE).unwrap();
        assert_eq!(sentences.len(), 1);
        let s = &sentences[0];
        assert_eq!(s.source_tokens.len(), 11);
        assert_eq!(s.origin_line, 1);
        let edits = &s.annotations[&0];
        assert_eq!(edits.len(), 1);
        let edit = &edits[0];
        assert_eq!((edit.start, edit.end), (0, 1));
        assert_eq!(edit.replacement, "In");
        assert_eq!(
            edit.label,
            EditLabel::Typed(ErrorType::new(EditOp::Replacement, Category::Orth))
        );
        assert_eq!(edit.annotator, 0);
    }

    #[test]
    fn parses_noop_sentence() {
        let text = "S Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0";
        let sentences = parse_m2(text).unwrap();
        assert_eq!(sentences.len(), 1);
        let edits = &sentences[0].annotations[&0];
        assert_eq!(edits.len(), 1);
        assert!(edits[0].is_noop());
        assert!(sentences[0].reference_edits(0).is_empty());
    }

    #[test]
    fn empty_input_parses_to_empty_list() {
        assert_eq!(parse_m2("").unwrap(), Vec::new());
        assert_eq!(parse_m2("\n\n").unwrap(), Vec::new());
    }

    #[test]
    fn malformed_line_reports_line_number_and_text() {
        let text = "S a b\nA 0 1|||R:ORTH|||In|||REQUIRED|||-NONE-|||0\n\nB bogus";
        match parse_m2(text) {
            Err(M2Error::Malformed { line, text }) => {
                assert_eq!(line, 4);
                assert!(text.contains("B bogus"));
            }
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn span_out_of_range_is_an_error() {
        let text = "S a b\nA 0 3|||R:OTHER|||x|||REQUIRED|||-NONE-|||0";
        match parse_m2(text) {
            Err(M2Error::SpanOutOfRange { line, end, len, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(end, 3);
                assert_eq!(len, 2);
            }
            other => panic!("expected span error, got {other:?}"),
        }
    }

    #[test]
    fn non_integer_annotator_is_an_error() {
        let text = "S a b\nA 0 1|||R:OTHER|||x|||REQUIRED|||-NONE-|||zero";
        match parse_m2(text) {
            Err(M2Error::BadAnnotator { line, text }) => {
                assert_eq!(line, 2);
                assert_eq!(text, "zero");
            }
            other => panic!("expected annotator error, got {other:?}"),
        }
    }

    #[test]
    fn serialize_inverts_parse() {
        let sentences = parse_m2(EXAMPLE_LINE).unwrap();
        let out = serialize_m2(&sentences).unwrap();
        assert!(out.starts_with("S in addition more"));
        assert!(out.contains("A 0 1|||R:ORTH|||In"));
        assert!(out.ends_with('\n'));
        assert_eq!(parse_m2(&out).unwrap(), sentences);
        assert_eq!(serialize_m2(&[]).unwrap(), "");
    }

    #[test]
    fn two_annotator_lines_sorted_by_annotator_then_span() {
        let text = "S a b c\nA 1 2|||R:OTHER|||x|||REQUIRED|||-NONE-|||1\nA 0 1|||R:OTHER|||y|||REQUIRED|||-NONE-|||1\nA 2 2|||M:PUNCT|||,|||REQUIRED|||-NONE-|||0";
        let sentences = parse_m2(text).unwrap();
        let out = serialize_m2(&sentences).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[1], "A 2 2|||M:PUNCT|||,|||REQUIRED|||-NONE-|||0");
        assert_eq!(lines[2], "A 0 1|||R:OTHER|||y|||REQUIRED|||-NONE-|||1");
        assert_eq!(lines[3], "A 1 2|||R:OTHER|||x|||REQUIRED|||-NONE-|||1");
        assert_eq!(parse_m2(&out).unwrap(), sentences);
    }

    #[test]
    fn apply_reconstructs_corrected_sentence() {
        let source: Vec<&str> = "in addition more and more scientists agree with alien really exist"
            .split(' ')
            .collect();
        let r = |s, e, t: &str, cat| Edit::new(s, e, t, ErrorType::new(EditOp::Replacement, cat), 0);
        let m = |s: usize, t: &str, cat| Edit::new(s, s, t, ErrorType::new(EditOp::Missing, cat), 0);
        let edits = vec![
            r(0, 1, "In", Category::Orth),
            m(2, ",", Category::Punct),
            r(7, 8, "that", Category::Prep),
            r(8, 9, "aliens", Category::NounNum),
            m(11, ".", Category::Punct),
        ];
        let out = apply_edits(&source, &edits).unwrap();
        assert_eq!(
            out.join(" "),
            "In addition , more and more scientists agree that aliens really exist ."
        );
    }

    #[test]
    fn apply_with_no_edits_is_identity() {
        let source = ["a", "b", "c"];
        assert_eq!(apply_edits(&source, &[]).unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn empty_replacement_deletes_span() {
        let edit = Edit::new(0, 1, "", ErrorType::new(EditOp::Unnecessary, Category::Other), 0);
        assert_eq!(apply_edits(&["a", "b"], &[edit]).unwrap(), vec!["b"]);
    }

    #[test]
    fn same_index_insertions_keep_order() {
        let m = |t: &str| Edit::new(1, 1, t, ErrorType::new(EditOp::Missing, Category::Other), 0);
        let out = apply_edits(&["a", "b"], &[m("x"), m("y")]).unwrap();
        assert_eq!(out, vec!["a", "x", "y", "b"]);
    }

    #[test]
    fn overlapping_edits_rejected() {
        let r = |s, e| Edit::new(s, e, "x", ErrorType::new(EditOp::Replacement, Category::Other), 0);
        assert!(matches!(
            apply_edits(&["a", "b", "c"], &[r(0, 2), r(1, 3)]),
            Err(M2Error::OverlappingEdits { .. })
        ));
        // touching spans are fine
        assert!(apply_edits(&["a", "b", "c"], &[r(0, 1), r(1, 2)]).is_ok());
    }

    #[test]
    fn apply_rejects_out_of_range_span() {
        let r = Edit::new(1, 4, "x", ErrorType::new(EditOp::Replacement, Category::Other), 0);
        assert!(matches!(
            apply_edits(&["a", "b"], &[r]),
            Err(M2Error::SpanBeyondSource { .. })
        ));
    }

    #[test]
    fn multi_token_replacement_roundtrip() {
        let text = "S he go home\nA 1 2|||R:VERB|||did go|||REQUIRED|||-NONE-|||0";
        let sentences = parse_m2(text).unwrap();
        let edit = &sentences[0].annotations[&0][0];
        assert_eq!(edit.replacement, "did go");
        assert_eq!(edit.replacement_tokens(), vec!["did", "go"]);
        let out = serialize_m2(&sentences).unwrap();
        assert_eq!(parse_m2(&out).unwrap(), sentences);
    }

    #[test]
    fn unknown_type_preserved_verbatim() {
        let text = "S a cat\nA 1 2|||R:NOUN:INFL|||cats|||REQUIRED|||-NONE-|||0";
        let sentences = parse_m2(text).unwrap();
        let edit = &sentences[0].annotations[&0][0];
        assert_eq!(edit.label, EditLabel::Opaque("R:NOUN:INFL".to_string()));
        assert!(serialize_m2(&sentences).unwrap().contains("|||R:NOUN:INFL|||"));
    }

    #[test]
    fn noop_mixed_with_edits_rejected() {
        let text = "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\nA 0 1|||R:OTHER|||x|||REQUIRED|||-NONE-|||0";
        assert!(matches!(parse_m2(text), Err(M2Error::InvalidSentence { .. })));
    }

    #[test]
    fn empty_sentence_roundtrips() {
        let sentences = parse_m2("S\nA 0 0|||M:OTHER|||hello|||REQUIRED|||-NONE-|||0\n").unwrap();
        assert!(sentences[0].source_tokens.is_empty());
        let out = serialize_m2(&sentences).unwrap();
        assert!(out.starts_with("S\n"));
        assert_eq!(parse_m2(&out).unwrap(), sentences);
    }

    #[test]
    fn edit_line_before_any_sentence_is_malformed() {
        let text = "A 0 1|||R:ORTH|||In|||REQUIRED|||-NONE-|||0";
        match parse_m2(text) {
            Err(M2Error::Malformed { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn proficiency_parses_case_insensitively() {
        assert_eq!("a".parse::<ProficiencyLevel>().unwrap(), ProficiencyLevel::A);
        assert_eq!("N".parse::<ProficiencyLevel>().unwrap(), ProficiencyLevel::N);
        assert!("D".parse::<ProficiencyLevel>().is_err());
        assert!("AB".parse::<ProficiencyLevel>().is_err());
    }
}
