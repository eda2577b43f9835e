//! Versioned JSON report schema plus display rounding.
//!
//! JSON carries full-precision values; display output rounds half-up to four
//! decimals and trims trailing zeros, which is exactly the rendering used by
//! the tables this tool prints.  Rounded strings never feed back into any
//! computation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::score::{ScoreRow, StratifiedReport, StratumKey};
use crate::Score;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub strata: Vec<JsonStratum>,
    pub config_snapshot: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonStratum {
    pub key: String,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: Score,
    pub recall: Score,
    /// Beta rendered as a string key, e.g. `"0.5"`, `"1"`, `"2"`.
    pub f: BTreeMap<String, Score>,
}

impl JsonStratum {
    pub fn from_row(key: &StratumKey, row: &ScoreRow) -> JsonStratum {
        JsonStratum {
            key: key.to_string(),
            tp: row.counts.tp,
            fp: row.counts.fp,
            fn_: row.counts.fn_,
            precision: row.precision,
            recall: row.recall,
            f: row.f.iter().map(|(beta, v)| (beta.to_string(), *v)).collect(),
        }
    }
}

impl JsonReport {
    pub fn from_report(report: &StratifiedReport, config_snapshot: serde_json::Value) -> JsonReport {
        JsonReport {
            schema_version: SCHEMA_VERSION,
            strata: report
                .rows
                .iter()
                .map(|(key, row)| JsonStratum::from_row(key, row))
                .collect(),
            config_snapshot,
        }
    }

    /// Canonical serialization: pretty-printed with sorted object keys and a
    /// trailing newline, byte-deterministic for equal inputs.
    pub fn to_canonical_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report schema serializes");
        text.push('\n');
        text
    }

    pub fn stratum(&self, key: &str) -> Option<&JsonStratum> {
        self.strata.iter().find(|s| s.key == key)
    }
}

/// Parses report JSON, mapping syntax errors to a byte offset in the input.
pub fn parse_report(text: &str) -> Result<JsonReport, ReportParseError> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        ReportParseError {
            offset,
            message: e.to_string(),
        }
    })
}

#[derive(Debug, thiserror::Error)]
#[error("report parse error at byte {offset}: {message}")]
pub struct ReportParseError {
    pub offset: usize,
    pub message: String,
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (idx, l) in text.split('\n').enumerate() {
        if idx + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}

/// Rounds half-up to `places` decimals and trims trailing zeros, so
/// `0.52500` renders as `"0.525"` and `0.0089818` as `"0.009"`.
///
/// Works on the decimal expansion (12 digits) rather than binary rounding,
/// so count ratios that land exactly on a half boundary round up.
pub fn round_display(value: Score, places: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let negative = value < 0.0;
    let expanded = format!("{:.12}", value.abs());
    let (int_part, frac_part) = expanded.split_once('.').unwrap_or((expanded.as_str(), ""));
    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes().take(places + 1))
        .map(|b| b - b'0')
        .collect();
    let int_len = int_part.len();
    // decide the carry from the digit after the cut
    let carry = digits.len() > int_len + places && digits[int_len + places] >= 5;
    digits.truncate(int_len + places);
    if carry {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let int_len = digits.len() - places;
    let int_str: String = digits[..int_len].iter().map(|d| (d + b'0') as char).collect();
    let mut frac_str: String = digits[int_len..].iter().map(|d| (d + b'0') as char).collect();
    while frac_str.ends_with('0') {
        frac_str.pop();
    }
    let mut out = String::new();
    if negative && (!int_str.trim_start_matches('0').is_empty() || !frac_str.is_empty()) {
        out.push('-');
    }
    out.push_str(if int_str.is_empty() { "0" } else { &int_str });
    if !frac_str.is_empty() {
        out.push('.');
        out.push_str(&frac_str);
    }
    out
}
