//! One module per subcommand plus small shared helpers.

pub mod balance;
pub mod benchmark;
pub mod eval;
pub mod moon;
pub mod project;
pub mod sweep;

use std::path::Path;

use simpor::data::{load_csv, Dataset};
use simpor::{Error, Result};

use crate::options::parse_label_column;

/// Refuse to clobber existing artifacts unless `--force` was given.
pub fn ensure_writable(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::config(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value, force: bool) -> Result<()> {
    ensure_writable(path, force)?;
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_input(path: &Path, label_column: &str) -> Result<Dataset> {
    let (ds, report) = load_csv(path, &parse_label_column(label_column))?;
    if report.rows_dropped > 0 {
        eprintln!(
            "warning: {}: dropped {} unusable row(s)",
            path.display(),
            report.rows_dropped
        );
    }
    Ok(ds)
}

/// `out.csv` -> `out.report.json`, used when no report path is given.
pub fn default_report_path(output: &Path) -> std::path::PathBuf {
    output.with_extension("report.json")
}
