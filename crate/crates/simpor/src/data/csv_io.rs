//! CSV loading and saving.
//!
//! Input files must have a header row. One column holds the class label
//! (selected by name, by zero-based position, or defaulting to the last
//! column); every other column is parsed as an f64 feature. Rows with
//! unparseable or non-finite feature values, or an empty label, are dropped
//! and counted rather than aborting the load. Structural problems (missing
//! header, inconsistent column counts, no usable rows) are errors.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save/load cycle reproduces values exactly and reruns are byte-identical.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// How to find the label column in a CSV header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Match a header cell exactly.
    Name(String),
    /// Zero-based column position.
    Index(usize),
    /// Use the last column.
    Last,
}

/// Counts from a [`load_csv`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadReport {
    /// Data rows read, excluding the header.
    pub rows_read: usize,
    /// Rows dropped for unparseable/non-finite features or an empty label.
    pub rows_dropped: usize,
}

/// Load a dataset from a CSV file with a header row.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<(Dataset, LoadReport)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if headers.is_empty() {
        return Err(Error::data(format!("{}: empty header row", path.display())));
    }
    let label_idx = match label {
        LabelColumn::Name(name) => headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::data(format!(
                "{}: label column '{name}' not found in header",
                path.display()
            ))
        })?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::data(format!(
                    "{}: label column index {i} out of range ({} columns)",
                    path.display(),
                    headers.len()
                )));
            }
            *i
        }
        LabelColumn::Last => headers.len() - 1,
    };
    if headers.len() < 2 {
        return Err(Error::data(format!(
            "{}: need at least one feature column besides the label",
            path.display()
        )));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut rows_read = 0usize;
    let mut rows_dropped = 0usize;

    for (rec_no, record) in reader.records().enumerate() {
        let record = record?;
        // Line 1 is the header.
        let line = rec_no + 2;
        if record.len() != headers.len() {
            return Err(Error::data(format!(
                "{}: line {line}: expected {} columns, found {}",
                path.display(),
                headers.len(),
                record.len()
            )));
        }
        rows_read += 1;
        let label_cell = record.get(label_idx).unwrap_or("");
        if label_cell.is_empty() {
            rows_dropped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(feature_names.len());
        let mut ok = true;
        for (i, cell) in record.iter().enumerate() {
            if i == label_idx {
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            rows_dropped += 1;
            continue;
        }
        rows.push(row);
        labels.push(label_cell.to_string());
    }

    if rows.is_empty() {
        return Err(Error::data(format!(
            "{}: no usable rows ({rows_read} read, {rows_dropped} dropped)",
            path.display()
        )));
    }
    let label_name = headers[label_idx].clone();
    let mut ds = Dataset::from_rows(rows, labels, feature_names)?;
    ds.label_column = label_name;
    Ok((ds, LoadReport {
        rows_read,
        rows_dropped,
    }))
}

fn format_float(v: f64) -> String {
    let mut s = String::new();
    // Shortest representation that round-trips.
    write!(s, "{v}").expect("write to string");
    s
}

fn write_rows(
    ds: &Dataset,
    path: &Path,
    synthetic_from: Option<usize>,
) -> Result<()> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);

    let mut header: Vec<String> = ds.feature_names().to_vec();
    header.push(ds.label_column.clone());
    if synthetic_from.is_some() {
        header.push("synthetic".to_string());
    }
    writeln!(out, "{}", header.join(","))?;

    for i in 0..ds.len() {
        let mut cells: Vec<String> = ds
            .features()
            .row(i)
            .iter()
            .map(|&v| format_float(v))
            .collect();
        cells.push(ds.label_names()[ds.labels()[i]].clone());
        if let Some(n_original) = synthetic_from {
            cells.push(if i >= n_original { "1" } else { "0" }.to_string());
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Write a dataset as CSV: feature columns in order, then the label column.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_rows(ds, path.as_ref(), None)
}

/// Like [`save_csv`] but with a trailing `synthetic` column: 0 for rows with
/// index below `n_original`, 1 for the appended rows.
pub fn save_csv_flagged(ds: &Dataset, path: impl AsRef<Path>, n_original: usize) -> Result<()> {
    write_rows(ds, path.as_ref(), Some(n_original))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_with_last_column_default() {
        let f = write_tmp("x,y,class\n1.0,2.0,a\n3.0,4.0,b\n");
        let (ds, report) = load_csv(f.path(), &LabelColumn::Last).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.feature_names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(ds.label_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(report.rows_read, 2);
        assert_eq!(report.rows_dropped, 0);
    }

    #[test]
    fn label_by_name_keeps_feature_order() {
        let f = write_tmp("class,x,y\na,1.0,2.0\nb,3.0,4.0\n");
        let (ds, _) = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(ds.feature_names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(ds.features().row(0).to_vec(), vec![1.0, 2.0]);
    }

    #[test]
    fn missing_label_column_is_an_error() {
        let f = write_tmp("x,y\n1.0,2.0\n");
        let err = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        assert!(err.to_string().contains("not found"));
    }

    #[test]
    fn bad_rows_are_dropped_and_counted() {
        let f = write_tmp("x,label\n1.0,a\nnot_a_number,a\n2.0,\nnan,a\n3.0,b\n");
        let (ds, report) = load_csv(f.path(), &LabelColumn::Last).unwrap();
        assert_eq!(report.rows_read, 5);
        // Unparseable feature, empty label, and non-finite feature ("nan").
        assert_eq!(report.rows_dropped, 3);
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn nan_feature_rows_are_dropped() {
        let f = write_tmp("x,label\nnan,a\ninf,a\n1.0,b\n2.0,c\n");
        let (ds, report) = load_csv(f.path(), &LabelColumn::Last).unwrap();
        assert_eq!(report.rows_dropped, 2);
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn inconsistent_width_is_an_error() {
        let f = write_tmp("x,y,label\n1.0,2.0,a\n1.0,a\n");
        let err = load_csv(f.path(), &LabelColumn::Last).unwrap_err();
        assert!(err.to_string().contains("expected 3 columns"));
    }

    #[test]
    fn all_rows_dropped_is_an_error() {
        let f = write_tmp("x,label\nbad,a\nworse,b\n");
        assert!(load_csv(f.path(), &LabelColumn::Last).is_err());
    }

    #[test]
    fn roundtrip_is_exact_and_stable() {
        let dir = tempfile::tempdir().unwrap();
        let ds = Dataset::from_rows(
            vec![
                vec![0.1, 1.0 / 3.0],
                vec![-2.5e-7, 4.0],
                vec![1e300, -0.0],
            ],
            vec!["a", "b", "a"].into_iter().map(String::from).collect(),
            vec!["u".into(), "v".into()],
        )
        .unwrap();
        let p1 = dir.path().join("one.csv");
        let p2 = dir.path().join("two.csv");
        save_csv(&ds, &p1).unwrap();
        let (back, _) = load_csv(&p1, &LabelColumn::Last).unwrap();
        assert_eq!(back.features(), ds.features());
        assert_eq!(back.labels(), ds.labels());
        save_csv(&back, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn label_column_name_survives_roundtrip() {
        let f = write_tmp("x,target\n1.0,a\n2.0,b\n");
        let (ds, _) = load_csv(f.path(), &LabelColumn::Name("target".into())).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        save_csv(&ds, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,target\n"));
    }

    #[test]
    fn flagged_save_marks_appended_rows() {
        let ds = Dataset::from_rows(
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec!["a", "b", "b"].into_iter().map(String::from).collect(),
            vec!["x".into()],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("flagged.csv");
        save_csv_flagged(&ds, &p, 2).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,label,synthetic");
        assert_eq!(lines[1], "1,a,0");
        assert_eq!(lines[3], "3,b,1");
    }
}
