//! Byte-stable report serialization.
//!
//! Reports are rendered by hand rather than through serde so the bytes are
//! fully pinned: fixed field order, every float printed with exactly six
//! fractional digits, negative zero normalized away. Determinism across
//! hosts and runs is an acceptance requirement, so nothing here may depend
//! on map iteration order or on shortest-roundtrip float formatting.
//!
//! JSON carries every report field. CSV is the plot-ready surface: one row
//! per report with the scalar fields plus semicolon-joined alarm times; the
//! sliding-kappa series is deliberately left to JSON.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::ranks::RankTable;
use crate::harness::runner::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::invalid(format!("unknown report format '{other}'"))),
        }
    }
}

/// Six fractional digits, with -0.0 folded into 0.0 so equal values always
/// produce equal bytes.
fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_one_json(report: &RunReport, indent: &str) -> String {
    let mut out = String::new();
    let field = |out: &mut String, name: &str, value: String, last: bool| {
        let _ = write!(out, "{indent}  {}: {value}", json_string(name));
        out.push_str(if last { "\n" } else { ",\n" });
    };

    let alarm_times = format!(
        "[{}]",
        report
            .alarm_times
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let sliding = format!(
        "[{}]",
        report
            .sliding_kappa
            .iter()
            .map(|&(t, v)| format!("[{t}, {}]", fmt_f64(v)))
            .collect::<Vec<_>>()
            .join(", ")
    );

    let _ = writeln!(out, "{indent}{{");
    field(&mut out, "dataset", json_string(&report.dataset), false);
    field(&mut out, "method", json_string(report.method.as_str()), false);
    field(&mut out, "kappa", fmt_f64(report.kappa), false);
    field(&mut out, "label_ratio", fmt_f64(report.label_ratio), false);
    field(&mut out, "n_alarms", report.n_alarms.to_string(), false);
    field(&mut out, "alarm_times", alarm_times, false);
    field(&mut out, "sliding_kappa", sliding, false);
    field(&mut out, "labels_used", report.labels_used.to_string(), false);
    field(
        &mut out,
        "stream_length",
        report.stream_length.to_string(),
        false,
    );
    field(&mut out, "seed", report.seed.to_string(), true);
    let _ = write!(out, "{indent}}}");
    out
}

const CSV_HEADER: &str =
    "dataset,method,kappa,label_ratio,n_alarms,alarm_times,labels_used,stream_length,seed";

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_one_csv_row(report: &RunReport) -> String {
    let alarm_times = report
        .alarm_times
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(";");
    [
        csv_field(&report.dataset),
        report.method.as_str().to_string(),
        fmt_f64(report.kappa),
        fmt_f64(report.label_ratio),
        report.n_alarms.to_string(),
        csv_field(&alarm_times),
        report.labels_used.to_string(),
        report.stream_length.to_string(),
        report.seed.to_string(),
    ]
    .join(",")
}

/// Renders reports to their serialized form: a single JSON object for one
/// report, a JSON array for several, or header-plus-rows CSV.
pub fn render_reports(reports: &[RunReport], format: ReportFormat) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::invalid("nothing to report"));
    }
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            if reports.len() == 1 {
                out.push_str(&render_one_json(&reports[0], ""));
            } else {
                out.push_str("[\n");
                for (i, report) in reports.iter().enumerate() {
                    out.push_str(&render_one_json(report, "  "));
                    out.push_str(if i + 1 < reports.len() { ",\n" } else { "\n" });
                }
                out.push(']');
            }
            out.push('\n');
        }
        ReportFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for report in reports {
                out.push_str(&render_one_csv_row(report));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Renders a rank table: methods, one rank row per dataset, and the
/// average row. CSV puts the average last with dataset name "average".
pub fn render_rank_table(table: &RankTable, format: ReportFormat) -> Result<String> {
    if table.methods.is_empty() {
        return Err(Error::invalid("rank table has no methods"));
    }
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            out.push_str("{\n  \"methods\": [");
            out.push_str(
                &table
                    .methods
                    .iter()
                    .map(|m| json_string(m))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push_str("],\n  \"per_dataset\": [\n");
            for (i, (dataset, ranks)) in table.per_dataset.iter().enumerate() {
                let row = ranks.iter().map(|&r| fmt_f64(r)).collect::<Vec<_>>().join(", ");
                let _ = write!(
                    out,
                    "    {{\"dataset\": {}, \"ranks\": [{row}]}}",
                    json_string(dataset)
                );
                out.push_str(if i + 1 < table.per_dataset.len() { ",\n" } else { "\n" });
            }
            out.push_str("  ],\n  \"average_rank\": [");
            out.push_str(
                &table
                    .average_rank
                    .iter()
                    .map(|&r| fmt_f64(r))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push_str("]\n}\n");
        }
        ReportFormat::Csv => {
            out.push_str("dataset");
            for m in &table.methods {
                out.push(',');
                out.push_str(&csv_field(m));
            }
            out.push('\n');
            for (dataset, ranks) in &table.per_dataset {
                out.push_str(&csv_field(dataset));
                for &r in ranks {
                    out.push(',');
                    out.push_str(&fmt_f64(r));
                }
                out.push('\n');
            }
            out.push_str("average");
            for &r in &table.average_rank {
                out.push(',');
                out.push_str(&fmt_f64(r));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Renders and writes reports to `path`.
pub fn emit_report(reports: &[RunReport], format: ReportFormat, path: &Path) -> Result<()> {
    let rendered = render_reports(reports, format)?;
    std::fs::write(path, rendered)?;
    Ok(())
}

/// Renders and writes one rank table to `path`.
pub fn emit_rank_table(table: &RankTable, format: ReportFormat, path: &Path) -> Result<()> {
    let rendered = render_rank_table(table, format)?;
    std::fs::write(path, rendered)?;
    Ok(())
}
