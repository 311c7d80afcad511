//! Loader for the raw inertial signals of the UCI-HAR dataset.
//!
//! A split directory (for example `UCI HAR Dataset/train`) contains
//!
//! ```text
//! y_train.txt
//! Inertial Signals/total_acc_x_train.txt
//! Inertial Signals/total_acc_y_train.txt
//! Inertial Signals/total_acc_z_train.txt
//! ```
//!
//! Each axis file holds one window per line, 128 whitespace-separated samples
//! in units of standard gravity, sampled at 50 Hz. Labels are 1-based
//! activity ids and are shifted to 0-based class indices.

use std::fs;
use std::path::{Path, PathBuf};

use super::{Dataset, LabeledWindow, TimeSeries};
use crate::error::{Error, Result};

pub const UCIHAR_SAMPLE_RATE: f64 = 50.0;
pub const UCIHAR_WINDOW: usize = 128;
pub const UCIHAR_CLASSES: usize = 6;

fn split_name(dir: &Path) -> Result<String> {
    dir.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::invalid("dir_path", "cannot infer split name from directory"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read(path)?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(parse_err(path, k + 1, format!("non-finite value {tok:?}"))),
                Err(_) => Err(parse_err(path, k + 1, format!("non-numeric token {tok:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != UCIHAR_WINDOW {
            return Err(parse_err(
                path,
                k + 1,
                format!("expected {UCIHAR_WINDOW} samples, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_err(path: &Path, line: usize, reason: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    }
}

/// Load every window of one split, preserving file order.
pub fn load_ucihar_raw(dir_path: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir_path.as_ref();
    let split = split_name(dir)?;
    let label_path = dir.join(format!("y_{split}.txt"));
    let axis_path = |axis: &str| -> PathBuf {
        dir.join("Inertial Signals")
            .join(format!("total_acc_{axis}_{split}.txt"))
    };

    let label_text = read(&label_path)?;
    let mut labels = Vec::new();
    for (k, line) in label_text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let id: usize = tok
            .parse()
            .map_err(|_| parse_err(&label_path, k + 1, format!("non-numeric label {tok:?}")))?;
        if !(1..=UCIHAR_CLASSES).contains(&id) {
            return Err(parse_err(&label_path, k + 1, format!("label {id} out of 1..=6")));
        }
        labels.push(id - 1);
    }
    if labels.is_empty() {
        return Err(parse_err(&label_path, 0, "empty label file".into()));
    }

    let axes = ["x", "y", "z"]
        .iter()
        .map(|a| {
            let p = axis_path(a);
            parse_rows(&p).map(|rows| (p, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    for (p, rows) in &axes {
        if rows.len() != labels.len() {
            return Err(parse_err(
                p,
                rows.len(),
                format!("{} rows but {} labels", rows.len(), labels.len()),
            ));
        }
    }

    let windows = labels
        .iter()
        .enumerate()
        .map(|(r, &label)| {
            let mut data = Vec::with_capacity(UCIHAR_WINDOW * 3);
            for t in 0..UCIHAR_WINDOW {
                for (_, rows) in &axes {
                    data.push(rows[r][t]);
                }
            }
            Ok(LabeledWindow {
                imu: TimeSeries::new(UCIHAR_SAMPLE_RATE, 3, data)?,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(windows, UCIHAR_CLASSES)
}
