//! `gecstrat report`: stratum-by-stratum deltas between two report JSON
//! files (left minus right).
//!
//! Stored reference rows for the gector and t5 systems ship with the binary
//! and can stand in for either side via `sota:gector` / `sota:t5`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gecstrat_core::report::{parse_report, round_display, JsonReport, SCHEMA_VERSION};

use crate::config::RunConfig;
use crate::table::{align_columns, OutputFormat};
use crate::{emit, CliError};

pub const GECTOR_REPORT: &str = include_str!("../../assets/sota_gector.json");
pub const T5_REPORT: &str = include_str!("../../assets/sota_t5.json");

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Left report: a JSON file path, or `sota:gector` / `sota:t5`.
    pub left: String,
    /// Right report (same forms); deltas are left minus right.
    pub right: String,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_report(source: &str) -> Result<(String, JsonReport), CliError> {
    let (name, text) = match source {
        "sota:gector" => ("gector".to_string(), GECTOR_REPORT.to_string()),
        "sota:t5" => ("t5".to_string(), T5_REPORT.to_string()),
        path => {
            let path = Path::new(path);
            let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
            (crate::commands::file_name(path), text)
        }
    };
    let report = parse_report(&text).map_err(|e| CliError::Eval(format!("{name}: {e}")))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Eval(format!(
            "{name}: schema version mismatch: file has {}, this tool supports {SCHEMA_VERSION}",
            report.schema_version
        )));
    }
    Ok((name, report))
}

pub fn run(args: &ReportArgs, config: &RunConfig) -> Result<(), CliError> {
    let (left_name, left) = load_report(&args.left)?;
    let (right_name, right) = load_report(&args.right)?;

    let mut rows: Vec<DeltaRow> = Vec::new();
    for stratum in &left.strata {
        let Some(other) = right.stratum(&stratum.key) else {
            continue;
        };
        let betas: BTreeMap<String, (f64, f64)> = stratum
            .f
            .iter()
            .filter_map(|(beta, value)| other.f.get(beta).map(|o| (beta.clone(), (*value, *o))))
            .collect();
        rows.push(DeltaRow {
            key: stratum.key.clone(),
            precision: (stratum.precision, other.precision),
            recall: (stratum.recall, other.recall),
            f: betas,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Eval(format!(
            "reports {left_name} and {right_name} share no strata"
        )));
    }

    let format = args.format.or(config.format).unwrap_or(OutputFormat::Text);
    let text = match format {
        OutputFormat::Text => render_text(&left_name, &right_name, &rows),
        OutputFormat::Tsv => render_tsv(&rows),
        OutputFormat::Json => render_json(&left_name, &right_name, &rows),
    };
    emit(args.out.as_deref(), &text)
}

struct DeltaRow {
    key: String,
    precision: (f64, f64),
    recall: (f64, f64),
    f: BTreeMap<String, (f64, f64)>,
}

fn beta_names(rows: &[DeltaRow]) -> Vec<String> {
    let mut names: Vec<String> = rows
        .iter()
        .flat_map(|r| r.f.keys().cloned())
        .collect();
    names.sort_by(|a, b| {
        a.parse::<f64>()
            .unwrap_or(f64::MAX)
            .total_cmp(&b.parse::<f64>().unwrap_or(f64::MAX))
    });
    names.dedup();
    names
}

fn render_text(left_name: &str, right_name: &str, rows: &[DeltaRow]) -> String {
    let betas = beta_names(rows);
    let mut table = Vec::new();
    let mut header = vec!["stratum".to_string(), "ΔPrec".to_string(), "ΔRec".to_string()];
    for beta in &betas {
        header.push(format!("ΔF{beta}"));
    }
    table.push(header);
    for row in rows {
        let mut cells = vec![
            row.key.clone(),
            round_display(row.precision.0 - row.precision.1, 4),
            round_display(row.recall.0 - row.recall.1, 4),
        ];
        for beta in &betas {
            cells.push(match row.f.get(beta) {
                Some((a, b)) => round_display(a - b, 4),
                None => String::new(),
            });
        }
        table.push(cells);
    }
    format!("{left_name} minus {right_name}\n{}", align_columns(&table))
}

fn render_tsv(rows: &[DeltaRow]) -> String {
    let betas = beta_names(rows);
    let mut out = String::from("stratum\tdelta_precision\tdelta_recall");
    for beta in &betas {
        out.push_str(&format!("\tdelta_f{beta}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}",
            row.key,
            row.precision.0 - row.precision.1,
            row.recall.0 - row.recall.1
        ));
        for beta in &betas {
            match row.f.get(beta) {
                Some((a, b)) => out.push_str(&format!("\t{}", a - b)),
                None => out.push('\t'),
            }
        }
        out.push('\n');
    }
    out
}

fn render_json(left_name: &str, right_name: &str, rows: &[DeltaRow]) -> String {
    let strata: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "key": row.key,
                "delta_precision": row.precision.0 - row.precision.1,
                "delta_recall": row.recall.0 - row.recall.1,
                "delta_f": row
                    .f
                    .iter()
                    .map(|(beta, (a, b))| (beta.clone(), a - b))
                    .collect::<BTreeMap<String, f64>>(),
            })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&serde_json::json!({
        "left": left_name,
        "right": right_name,
        "strata": strata,
    }))
    .expect("delta json serializes");
    text.push('\n');
    text
}
