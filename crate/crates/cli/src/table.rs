//! Text, TSV, and JSON renderings of stratified reports.
//!
//! Text cells round half-up to four decimals with trailing zeros trimmed
//! (the rendering the reference tables use); TSV and JSON carry full
//! precision.  Rounded output never feeds back into computation.

use std::str::FromStr;

use gecstrat_core::report::{round_display, JsonReport};
use gecstrat_core::score::{label_breakdown, LabelKey, StratifiedReport, StratumKey};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Tsv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(()),
        }
    }
}

/// Left-aligned columns with a two-space gutter; first row is the header.
pub fn align_columns(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if i + 1 < row.len() {
                for _ in cell.chars().count()..widths[i] {
                    line.push(' ');
                }
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn metric_header(report: &StratifiedReport) -> Vec<String> {
    let mut header = vec![
        "stratum".to_string(),
        "TP".to_string(),
        "FP".to_string(),
        "FN".to_string(),
        "Prec".to_string(),
        "Rec".to_string(),
    ];
    for beta in &report.betas {
        header.push(format!("F{beta}"));
    }
    header
}

fn metric_row(report: &StratifiedReport, key: &StratumKey, display: bool) -> Vec<String> {
    let row = &report.rows[key];
    let fmt = |v: f64| {
        if display {
            round_display(v, 4)
        } else {
            format!("{v}")
        }
    };
    let mut cells = vec![
        key.to_string(),
        row.counts.tp.to_string(),
        row.counts.fp.to_string(),
        row.counts.fn_.to_string(),
        fmt(row.precision),
        fmt(row.recall),
    ];
    for beta in &report.betas {
        cells.push(fmt(row.f[beta]));
    }
    cells
}

/// The main per-level table, plus a label-by-label table when a selector is
/// given.
pub fn report_text(report: &StratifiedReport, labels: Option<&str>) -> Result<String, CliError> {
    let mut rows = vec![metric_header(report)];
    for key in report.rows.keys() {
        if key.label == LabelKey::Total {
            rows.push(metric_row(report, key, true));
        }
    }
    let mut out = align_columns(&rows);

    if let Some(selector) = labels {
        let breakdown = label_breakdown(report, selector)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mut label_rows = vec![metric_header(report)];
        for (key, _) in &breakdown {
            label_rows.push(metric_row(report, key, true));
        }
        out.push('\n');
        out.push_str(&format!("label-by-label ({selector})\n"));
        out.push_str(&align_columns(&label_rows));
    }
    Ok(out)
}

/// One stratum per row, every stratum included, full precision.
pub fn report_tsv(report: &StratifiedReport) -> String {
    let mut out = metric_header(report).join("\t");
    out.push('\n');
    for key in report.rows.keys() {
        out.push_str(&metric_row(report, key, false).join("\t"));
        out.push('\n');
    }
    out
}

pub fn report_rendered(
    report: &StratifiedReport,
    json: &JsonReport,
    format: OutputFormat,
    labels: Option<&str>,
) -> Result<String, CliError> {
    match format {
        OutputFormat::Text => report_text(report, labels),
        OutputFormat::Tsv => Ok(report_tsv(report)),
        OutputFormat::Json => Ok(json.to_canonical_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gecstrat_core::score::{aggregate, Beta, EvalCounts, SentenceComparison};
    use gecstrat_core::ProficiencyLevel;

    fn sample_report() -> StratifiedReport {
        let counts = EvalCounts::new(1118, 1479, 1830);
        let comparison = SentenceComparison {
            counts,
            annotator: 0,
            matched: Vec::new(),
            unmatched_hyp: Vec::new(),
            unmatched_ref: Vec::new(),
            by_label: [("M:PUNCT".to_string(), counts)].into_iter().collect(),
        };
        aggregate(&[(ProficiencyLevel::A, comparison)], &[Beta::HALF])
    }

    #[test]
    fn text_table_contains_the_published_row() {
        let report = sample_report();
        let text = report_text(&report, None).unwrap();
        let normalized: Vec<String> = text
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .collect();
        assert!(
            normalized.contains(&"A 1118 1479 1830 0.4305 0.3792 0.4192".to_string()),
            "{text}"
        );
        assert!(text.lines().next().unwrap().contains("F0.5"));
    }

    #[test]
    fn tsv_has_full_precision() {
        let report = sample_report();
        let tsv = report_tsv(&report);
        assert!(tsv.contains("0.4304967269926839"), "{tsv}");
        assert!(tsv.starts_with("stratum\tTP\tFP\tFN\tPrec\tRec\tF0.5\n"));
    }

    #[test]
    fn label_table_is_appended() {
        let report = sample_report();
        let text = report_text(&report, Some("M:PUNCT")).unwrap();
        assert!(text.contains("label-by-label (M:PUNCT)"));
        assert!(text.contains("A/M:PUNCT"));
        assert!(matches!(
            report_text(&report, Some("bogus")),
            Err(CliError::Config(_))
        ));
    }
}
