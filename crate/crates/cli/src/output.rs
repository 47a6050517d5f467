//! Artifact writing: JSON summaries with config echo and CSV tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub type AnyError = Box<dyn std::error::Error>;

/// Envelope written around every JSON summary.
#[derive(Serialize)]
pub struct Summary<C: Serialize, R: Serialize> {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: C,
    pub results: R,
    pub pass: bool,
}

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

pub fn ensure_dir(dir: &Path) -> Result<(), AnyError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_json<C: Serialize, R: Serialize>(
    dir: &Path,
    name: &str,
    summary: &Summary<C, R>,
) -> Result<PathBuf, AnyError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut doc = serde_json::to_string_pretty(summary)?;
    doc.push('\n');
    std::fs::write(&path, doc)?;
    Ok(path)
}

/// Write a CSV table; rows are formatted with shortest-round-trip floats so
/// identical configs and seeds produce byte-identical files.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<String>],
) -> Result<PathBuf, AnyError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut doc = String::new();
    writeln!(doc, "{header}")?;
    for row in rows {
        writeln!(doc, "{}", row.join(","))?;
    }
    std::fs::write(&path, doc)?;
    Ok(path)
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn verdict(pass: bool, what: &str) {
    println!("{}: {what}", if pass { "PASS" } else { "FAIL" });
}
