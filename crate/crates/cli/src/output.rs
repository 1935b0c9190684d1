//! File emission: CSV tables, JSON documents, and the run manifest.
//!
//! Every run writes a manifest carrying the resolved inputs, the crate
//! versions, and the grid sizes, so rerunning the recorded command
//! reproduces the outputs bitwise. Nothing time- or host-dependent goes
//! into any output file.

use std::fs;
use std::io::Write;
use std::path::Path;

use backscatter_core::config::ConfigFile;
use serde::Serialize;

use crate::sweep::{SweepSpec, Table};

/// Scientific notation, shortest round-trip; `nan` for missing values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:e}")
    }
}

/// Render a float table as CSV text.
pub fn csv_string(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Write a float table as CSV.
pub fn write_csv(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> std::io::Result<()> {
    fs::write(path, csv_string(columns, rows))
}

/// Write rows that carry a leading label column, as CSV.
pub fn write_labeled_csv(
    path: &Path,
    columns: &[&str],
    rows: &[(String, Vec<f64>)],
) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "{}", columns.join(","))?;
    for (label, values) in rows {
        let cells: Vec<String> = values.iter().map(|&v| format_float(v)).collect();
        writeln!(f, "{},{}", label, cells.join(","))?;
    }
    Ok(())
}

/// Serialize any document as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Crate versions baked into every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub backscatter_core: &'static str,
    pub backscatter_cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            backscatter_core: backscatter_core::VERSION,
            backscatter_cli: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The reproducibility record written next to every run's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    /// Subcommand that ran.
    pub command: String,
    pub format: String,
    /// Propagation nodes / scan sample count.
    pub grid: usize,
    pub paper_literal_envelope: bool,
    pub versions: Versions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// The parsed config, echoed back resolved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a ConfigFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<&'a SweepSpec>,
    /// Files this run wrote, relative to the output directory.
    pub outputs: Vec<String>,
}

/// Write `manifest.json` into the output directory.
pub fn write_manifest(dir: &Path, manifest: &Manifest) -> anyhow::Result<()> {
    write_json(&dir.join("manifest.json"), manifest)
}

/// Write a sweep table in the requested format; CSV is always produced
/// (the table is the sweep's primary artifact), JSON additionally when
/// asked.
pub fn write_table(dir: &Path, name: &str, table: &Table, json_too: bool) -> anyhow::Result<Vec<String>> {
    let mut written = Vec::new();
    let csv_name = format!("{name}.csv");
    write_csv(&dir.join(&csv_name), &table.columns, &table.rows)?;
    written.push(csv_name);
    if json_too {
        let json_name = format!("{name}.json");
        write_json(&dir.join(&json_name), table)?;
        written.push(json_name);
    }
    Ok(written)
}
