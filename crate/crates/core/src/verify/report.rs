use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CheckRun, ScanTable, TheoremCheck};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Csv,
}

kebab_enum_str!(ReportFormat {
    Json => "json",
    Csv => "csv",
});

impl ReportFormat {
    /// `.csv` means CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

pub const CHECK_COLUMNS: [&str; 10] = [
    "theorem_id",
    "params",
    "lhs",
    "rhs",
    "ratio",
    "pass",
    "methods",
    "witness",
    "slack",
    "index",
];

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
}

fn check_row(c: &TheoremCheck) -> [String; 10] {
    [
        c.theorem_id.to_string(),
        c.params.label(),
        c.lhs.to_string(),
        c.rhs.to_string(),
        c.ratio.to_string(),
        c.pass.to_string(),
        join(&c.methods),
        c.witness.join("|"),
        c.slack.to_string(),
        c.index.to_string(),
    ]
}

fn csv_string<R: IntoIterator<Item = [String; N]>, const N: usize>(header: [&str; N], rows: R) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn checks_to_csv(checks: &[TheoremCheck]) -> Result<String> {
    csv_string(CHECK_COLUMNS, checks.iter().map(check_row))
}

pub fn run_to_json(run: &CheckRun) -> String {
    serde_json::to_string_pretty(run).expect("check records serialize") + "\n"
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a run as CSV (checks only) or JSON (the full run).
pub fn write_run(run: &CheckRun, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    if run.checks.is_empty() {
        return Err(Error::invalid("refusing to write a report with no checks"));
    }
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Csv => checks_to_csv(&run.checks)?,
        ReportFormat::Json => run_to_json(run),
    };
    write_text(path, &text)
}

pub fn read_run(path: impl AsRef<Path>) -> Result<CheckRun> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub const SCAN_COLUMNS: [&str; 6] = ["family", "params", "value", "reference", "error_estimate", "method"];

pub fn scan_to_csv(table: &ScanTable) -> Result<String> {
    csv_string(
        SCAN_COLUMNS,
        table.rows.iter().map(|r| {
            [
                table.family.to_string(),
                r.params.label(),
                r.value.to_string(),
                r.reference.map(|x| x.to_string()).unwrap_or_default(),
                r.error_estimate.to_string(),
                r.method.to_string(),
            ]
        }),
    )
}

pub fn scan_to_json(table: &ScanTable) -> String {
    serde_json::to_string_pretty(table).expect("scan rows serialize") + "\n"
}

pub fn write_scan(table: &ScanTable, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => scan_to_csv(table)?,
        ReportFormat::Json => scan_to_json(table),
    };
    write_text(path.as_ref(), &text)
}
