//! CSV ingestion and export.
//!
//! Schema: header `<feature>,...,<feature>,label[,family]`, one sample per
//! line, `.` decimal separator. `label` is 0 or 1; `family` is a family
//! name or `none`/empty for benign rows.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Dataset, Family, HpcSample, Label, Provenance, MAX_RAW_FEATURES};
use crate::error::{Error, Result};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a dataset from a CSV file, preserving row order.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_csv_reader(BufReader::new(file))
}

/// Reads a dataset from any reader carrying the CSV schema.
pub fn parse_csv_reader(reader: impl Read) -> Result<Dataset> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => return Err(parse_err(1, e.to_string())),
        None => return Err(Error::EmptyDataset),
    };
    let columns: Vec<&str> = header.trim_end_matches('\r').split(',').collect();

    let has_family = columns.last() == Some(&"family");
    let label_pos = if has_family {
        columns.len().checked_sub(2)
    } else {
        columns.len().checked_sub(1)
    };
    let label_pos = match label_pos {
        Some(p) if columns.get(p) == Some(&"label") => p,
        _ => {
            return Err(parse_err(
                1,
                "header must end with `label` or `label,family`",
            ))
        }
    };
    if label_pos == 0 {
        return Err(parse_err(1, "header has no feature columns"));
    }
    if label_pos > MAX_RAW_FEATURES {
        return Err(parse_err(
            1,
            format!(
                "{label_pos} feature columns exceed the raw capture limit of {MAX_RAW_FEATURES}"
            ),
        ));
    }
    let feature_names: Vec<String> = columns[..label_pos].iter().map(|s| s.to_string()).collect();
    let expected_cols = columns.len();

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols {
            return Err(parse_err(
                line_no,
                format!("expected {expected_cols} columns, found {}", fields.len()),
            ));
        }

        let mut features = Vec::with_capacity(label_pos);
        for (j, raw) in fields[..label_pos].iter().enumerate() {
            let v: f64 = raw.trim().parse().map_err(|_| {
                parse_err(
                    line_no,
                    format!("non-numeric value `{raw}` in column `{}`", feature_names[j]),
                )
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(parse_err(
                    line_no,
                    format!(
                        "counter `{}` must be finite and >= 0, got {v}",
                        feature_names[j]
                    ),
                ));
            }
            features.push(v);
        }

        let label_raw = fields[label_pos].trim();
        let label = match label_raw {
            "0" => Label::Benign,
            "1" => Label::Malware,
            other => {
                return Err(parse_err(
                    line_no,
                    format!("label must be 0 or 1, got `{other}`"),
                ))
            }
        };

        let family =
            if has_family {
                let raw = fields[label_pos + 1].trim();
                if raw.is_empty() || raw == "none" {
                    None
                } else {
                    Some(raw.parse::<Family>().map_err(|_| {
                        parse_err(line_no, format!("unknown malware family `{raw}`"))
                    })?)
                }
            } else {
                None
            };

        let sample = HpcSample {
            features,
            label,
            family,
        };
        sample
            .check_family_consistency()
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        samples.push(sample);
    }

    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(samples, feature_names, Provenance::Ingested)
}

/// Writes a dataset as CSV. The family column is always emitted; benign
/// rows carry `none`.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(write_csv_string(ds).as_bytes())
        .map_err(|e| io_err(path, e))
}

/// Renders a dataset in the CSV schema.
pub fn write_csv_string(ds: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&ds.feature_names.join(","));
    out.push_str(",label,family\n");
    for s in &ds.samples {
        for v in &s.features {
            out.push_str(&format!("{v},"));
        }
        let family = s.family.map(|f| f.name()).unwrap_or("none");
        out.push_str(&format!("{},{}\n", s.label.as_u8(), family));
    }
    out
}
