//! On-disk formats.
//!
//! * Features (and source predictions), CSV: no header, one sample per line,
//!   comma-separated decimal values parsed as `f64`.
//! * Features, binary: the 4 magic bytes `TMIF`, one version byte (currently
//!   1), then `n` and `d` as little-endian `u64`, then `n * d` little-endian
//!   `f64` values in row-major order. Nothing may follow the payload.
//! * Labels: plain text, one non-negative integer per line.
//! * Accuracies: CSV rows of `model_id,accuracy`; an optional
//!   `model_id,accuracy` header line is skipped.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AccuracyVector, FeatureMatrix, LabelVector, SourcePredictionMatrix};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"TMIF";
pub const BINARY_VERSION: u8 = 1;
const BINARY_HEADER_LEN: usize = 4 + 1 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureFormat {
    #[default]
    Csv,
    Binary,
}

impl FeatureFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FeatureFormat::Csv => "csv",
            FeatureFormat::Binary => "bin",
        }
    }
}

impl FromStr for FeatureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(FeatureFormat::Csv),
            "binary" | "bin" => Ok(FeatureFormat::Binary),
            other => Err(Error::Validation(format!(
                "unknown feature format {other:?} (expected csv or binary)"
            ))),
        }
    }
}

pub fn load_features(path: impl AsRef<Path>, format: FeatureFormat) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    match format {
        FeatureFormat::Csv => load_csv_matrix(path),
        FeatureFormat::Binary => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_binary(path, &bytes)
        }
    }
}

pub fn save_features(
    path: impl AsRef<Path>,
    features: &FeatureMatrix,
    format: FeatureFormat,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        FeatureFormat::Csv => {
            let mut out = String::new();
            for row in features.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
        FeatureFormat::Binary => encode_binary(features),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads source-classifier probabilities stored in a feature-matrix format.
pub fn load_source_predictions(
    path: impl AsRef<Path>,
    format: FeatureFormat,
) -> Result<SourcePredictionMatrix> {
    SourcePredictionMatrix::new(load_features(path, format)?)
}

pub fn load_labels(path: impl AsRef<Path>, num_classes: Option<usize>) -> Result<LabelVector> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let field = line.trim().trim_end_matches(',').trim();
        if field.is_empty() {
            continue;
        }
        let value: i64 = field.parse().map_err(|_| {
            Error::parse(
                path,
                lineno + 1,
                1,
                format!("{field:?} is not an integer label"),
            )
        })?;
        if value < 0 {
            return Err(Error::Validation(format!(
                "negative label {value} at line {}",
                lineno + 1
            )));
        }
        labels.push(value as usize);
    }
    LabelVector::new(labels, num_classes)
}

pub fn save_labels(path: impl AsRef<Path>, labels: &LabelVector) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(labels.len() * 3);
    for y in labels.as_slice() {
        out.push_str(&y.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_accuracies(path: impl AsRef<Path>) -> Result<AccuracyVector> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut ids = Vec::new();
    let mut accuracies = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::parse(
                path,
                row,
                record.len().min(3),
                format!(
                    "expected 2 fields (model_id,accuracy), found {}",
                    record.len()
                ),
            ));
        }
        if i == 0 && &record[0] == "model_id" && &record[1] == "accuracy" {
            continue;
        }
        let acc: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse(path, row, 2, format!("{:?} is not a number", &record[1])))?;
        ids.push(record[0].to_string());
        accuracies.push(acc);
    }
    AccuracyVector::new(ids, accuracies)
}

pub fn save_accuracies(path: impl AsRef<Path>, accuracies: &AccuracyVector) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for (id, a) in accuracies.model_ids().iter().zip(accuracies.accuracies()) {
        writeln!(file, "{id},{a}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let (row, column) = e.position().map_or((0, 0), |p| (p.line() as usize, 0));
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::parse(path, row, column, format!("{kind:?}")),
    }
}

fn load_csv_matrix(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut data = Vec::new();
    let mut d = 0;
    let mut n = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if n == 0 {
            d = record.len();
        } else if record.len() != d {
            return Err(Error::parse(
                path,
                row,
                record.len().min(d + 1),
                format!("expected {d} columns, found {}", record.len()),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Error::parse(path, row, j + 1, format!("{field:?} is not a number"))
            })?;
            if !value.is_finite() {
                return Err(Error::Validation(format!(
                    "{}: non-finite value {field:?} at row {row}, column {}",
                    path.display(),
                    j + 1
                )));
            }
            data.push(value);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::parse(path, 1, 1, "file contains no rows"));
    }
    FeatureMatrix::new(data, n, d)
}

fn encode_binary(features: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(BINARY_HEADER_LEN + 8 * features.as_slice().len());
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.extend_from_slice(&(features.n() as u64).to_le_bytes());
    out.extend_from_slice(&(features.d() as u64).to_le_bytes());
    for v in features.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode_binary(path: &Path, bytes: &[u8]) -> Result<FeatureMatrix> {
    let header_err = |msg: String| Error::parse(path, 0, 0, msg);
    if bytes.len() < BINARY_HEADER_LEN {
        return Err(header_err(format!(
            "binary header truncated: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(header_err("bad magic bytes, expected \"TMIF\"".into()));
    }
    if bytes[4] != BINARY_VERSION {
        return Err(header_err(format!(
            "unsupported format version {}",
            bytes[4]
        )));
    }
    let n = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes"));
    let d = u64::from_le_bytes(bytes[13..21].try_into().expect("8 bytes"));
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| usize::try_from(b).ok())
        .ok_or_else(|| header_err(format!("dimensions {n}x{d} overflow")))?;
    let payload = &bytes[BINARY_HEADER_LEN..];
    if payload.len() != expected {
        return Err(header_err(format!(
            "payload has {} bytes, header {n}x{d} requires {expected}",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    FeatureMatrix::new(data, n as usize, d as usize)
}
