//! Hand-rolled CSV readers and writers for the toolkit's strict,
//! quote-free schemas. Read errors carry 1-based line numbers.

use std::fs;
use std::path::Path;

use itercert_core::mpc::{Dataset, DatasetRecord, MetricRow, SolveStatus};
use itercert_core::scenario::{SampleValues, TradeoffPoint};
use thiserror::Error;

use crate::format::{fmt_f64, fmt_opt_f64};

/// CSV format violations.
#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:1: expected header `{expected}`, got `{got}`")]
    Header { path: String, expected: &'static str, got: String },
    #[error("{path}:{line}: expected {expected} fields, got {got}")]
    FieldCount { path: String, line: usize, expected: usize, got: usize },
    #[error("{path}:{line}: field `{field}` is not a valid {kind}: `{value}`")]
    Parse { path: String, line: usize, field: &'static str, kind: &'static str, value: String },
    #[error("{path}: no data rows")]
    Empty { path: String },
    #[error("{path}: {reason}")]
    Semantic { path: String, reason: String },
}

fn read_lines(path: &Path) -> Result<Vec<String>, CsvError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CsvError::Io { path: display(path), source })?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    field: &'static str,
    kind: &'static str,
    raw: &str,
) -> Result<T, CsvError> {
    raw.trim().parse().map_err(|_| CsvError::Parse {
        path: display(path),
        line,
        field,
        kind,
        value: raw.to_string(),
    })
}

/// Reads a samples CSV (`sample_id,value`). A dataset CSV
/// (`sample_id,x0_1,x0_2,n_iters`) is accepted too, taking `n_iters` as the
/// value, so generated datasets feed directly into the solve/sweep commands.
pub fn read_sample_values(path: &Path) -> Result<SampleValues, CsvError> {
    let lines = read_lines(path)?;
    let header = lines.first().map(String::as_str).unwrap_or_default();
    let value_col = match header {
        "sample_id,value" => 1,
        "sample_id,x0_1,x0_2,n_iters" => 3,
        got => {
            return Err(CsvError::Header {
                path: display(path),
                expected: "sample_id,value (or sample_id,x0_1,x0_2,n_iters)",
                got: got.to_string(),
            })
        }
    };
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for (idx, row) in lines.iter().enumerate().skip(1) {
        if row.is_empty() {
            continue;
        }
        let line = idx + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != value_col + 1 {
            return Err(CsvError::FieldCount {
                path: display(path),
                line,
                expected: value_col + 1,
                got: fields.len(),
            });
        }
        ids.push(parse_field(path, line, "sample_id", "integer", fields[0])?);
        values.push(parse_field(path, line, "value", "number", fields[value_col])?);
    }
    if values.is_empty() {
        return Err(CsvError::Empty { path: display(path) });
    }
    SampleValues::new(values, ids)
        .map_err(|e| CsvError::Semantic { path: display(path), reason: e.to_string() })
}

/// Writes a samples CSV.
pub fn write_sample_values(path: &Path, samples: &SampleValues) -> Result<(), CsvError> {
    let mut out = String::from("sample_id,value\n");
    for (id, v) in samples.sample_ids().iter().zip(samples.values()) {
        out.push_str(&format!("{id},{}\n", fmt_f64(*v)));
    }
    fs::write(path, out).map_err(|source| CsvError::Io { path: display(path), source })
}

/// Writes a dataset CSV (`sample_id,x0_1,x0_2,n_iters`).
pub fn write_dataset(path: &Path, dataset: &Dataset) -> Result<(), CsvError> {
    let mut out = String::from("sample_id,x0_1,x0_2,n_iters\n");
    for r in &dataset.records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.sample_id,
            fmt_f64(r.x0[0]),
            fmt_f64(r.x0[1]),
            r.iterations
        ));
    }
    fs::write(path, out).map_err(|source| CsvError::Io { path: display(path), source })
}

/// Reads a dataset CSV back into records (all marked `Solved`; only solved
/// candidates are ever written).
pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>, CsvError> {
    let lines = read_lines(path)?;
    let header = lines.first().map(String::as_str).unwrap_or_default();
    if header != "sample_id,x0_1,x0_2,n_iters" {
        return Err(CsvError::Header {
            path: display(path),
            expected: "sample_id,x0_1,x0_2,n_iters",
            got: header.to_string(),
        });
    }
    let mut records = Vec::new();
    for (idx, row) in lines.iter().enumerate().skip(1) {
        if row.is_empty() {
            continue;
        }
        let line = idx + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 4 {
            return Err(CsvError::FieldCount {
                path: display(path),
                line,
                expected: 4,
                got: fields.len(),
            });
        }
        records.push(DatasetRecord {
            sample_id: parse_field(path, line, "sample_id", "integer", fields[0])?,
            candidate_index: parse_field(path, line, "sample_id", "integer", fields[0])?,
            x0: [
                parse_field(path, line, "x0_1", "number", fields[1])?,
                parse_field(path, line, "x0_2", "number", fields[2])?,
            ],
            iterations: parse_field(path, line, "n_iters", "integer", fields[3])?,
            status: SolveStatus::Solved,
        });
    }
    if records.is_empty() {
        return Err(CsvError::Empty { path: display(path) });
    }
    Ok(records)
}

/// Writes a metric-trace CSV (`sample_id,k,phi`).
pub fn write_metric_trace(path: &Path, rows: &[MetricRow]) -> Result<(), CsvError> {
    let mut out = String::from("sample_id,k,phi\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.sample_id, r.k, fmt_f64(r.phi)));
    }
    fs::write(path, out).map_err(|source| CsvError::Io { path: display(path), source })
}

/// Reads a metric-trace CSV.
pub fn read_metric_trace(path: &Path) -> Result<Vec<MetricRow>, CsvError> {
    let lines = read_lines(path)?;
    let header = lines.first().map(String::as_str).unwrap_or_default();
    if header != "sample_id,k,phi" {
        return Err(CsvError::Header {
            path: display(path),
            expected: "sample_id,k,phi",
            got: header.to_string(),
        });
    }
    let mut rows = Vec::new();
    for (idx, row) in lines.iter().enumerate().skip(1) {
        if row.is_empty() {
            continue;
        }
        let line = idx + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(CsvError::FieldCount {
                path: display(path),
                line,
                expected: 3,
                got: fields.len(),
            });
        }
        rows.push(MetricRow {
            sample_id: parse_field(path, line, "sample_id", "integer", fields[0])?,
            k: parse_field(path, line, "k", "integer", fields[1])?,
            phi: parse_field(path, line, "phi", "number", fields[2])?,
        });
    }
    if rows.is_empty() {
        return Err(CsvError::Empty { path: display(path) });
    }
    Ok(rows)
}

const TRADEOFF_HEADER: &str = "control,y_value,q_star,s_star,epsilon,epsilon_lower,empirical_violation";

/// Writes a trade-off CSV; inapplicable fields are left empty.
pub fn write_tradeoff(path: &Path, points: &[TradeoffPoint]) -> Result<(), CsvError> {
    fs::write(path, tradeoff_to_string(points))
        .map_err(|source| CsvError::Io { path: display(path), source })
}

/// Renders trade-off points to CSV text (also used for stdout summaries).
pub fn tradeoff_to_string(points: &[TradeoffPoint]) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(p.control),
            fmt_f64(p.y_value),
            p.q_star,
            p.s_star.map(|s| s.to_string()).unwrap_or_default(),
            fmt_f64(p.epsilon),
            fmt_opt_f64(p.epsilon_lower),
            fmt_f64(p.empirical_violation),
        ));
    }
    out
}

/// Reads a trade-off CSV.
pub fn read_tradeoff(path: &Path) -> Result<Vec<TradeoffPoint>, CsvError> {
    let lines = read_lines(path)?;
    let header = lines.first().map(String::as_str).unwrap_or_default();
    if header != TRADEOFF_HEADER {
        return Err(CsvError::Header {
            path: display(path),
            expected: TRADEOFF_HEADER,
            got: header.to_string(),
        });
    }
    let mut points = Vec::new();
    for (idx, row) in lines.iter().enumerate().skip(1) {
        if row.is_empty() {
            continue;
        }
        let line = idx + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 7 {
            return Err(CsvError::FieldCount {
                path: display(path),
                line,
                expected: 7,
                got: fields.len(),
            });
        }
        let s_star = if fields[3].is_empty() {
            None
        } else {
            Some(parse_field(path, line, "s_star", "integer", fields[3])?)
        };
        let epsilon_lower = if fields[5].is_empty() {
            None
        } else {
            Some(parse_field(path, line, "epsilon_lower", "number", fields[5])?)
        };
        points.push(TradeoffPoint {
            control: parse_field(path, line, "control", "number", fields[0])?,
            y_value: parse_field(path, line, "y_value", "number", fields[1])?,
            q_star: parse_field(path, line, "q_star", "integer", fields[2])?,
            s_star,
            epsilon: parse_field(path, line, "epsilon", "number", fields[4])?,
            epsilon_lower,
            empirical_violation: parse_field(
                path,
                line,
                "empirical_violation",
                "number",
                fields[6],
            )?,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn sample_csv_round_trip_and_errors() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let samples =
            SampleValues::new(vec![1.25, 8200.0, 0.0], vec![0, 1, 2]).unwrap();
        write_sample_values(&path, &samples).unwrap();
        let back = read_sample_values(&path).unwrap();
        assert_eq!(back, samples);

        std::fs::write(&path, "sample_id,value\n0,1.0\n1,bogus\n").unwrap();
        let err = read_sample_values(&path).unwrap_err();
        assert!(err.to_string().contains(":3:"), "line number missing: {err}");
    }

    #[test]
    fn tradeoff_round_trip_preserves_empty_fields() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let points = vec![
            TradeoffPoint {
                control: 0.002,
                y_value: 5150.0,
                q_star: 467,
                s_star: Some(468),
                epsilon: 0.51,
                epsilon_lower: None,
                empirical_violation: 0.467,
            },
            TradeoffPoint {
                control: 25.0,
                y_value: 25.0,
                q_star: 990,
                s_star: None,
                epsilon: 1.0,
                epsilon_lower: Some(0.1),
                empirical_violation: 0.99,
            },
        ];
        write_tradeoff(&path, &points).unwrap();
        let back = read_tradeoff(&path).unwrap();
        assert_eq!(back, points);
    }
}
