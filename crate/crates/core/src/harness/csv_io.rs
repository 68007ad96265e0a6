//! CSV files for estimate records and benchmark summaries.
//!
//! Both files may start with `#`-prefixed comment lines carrying the effective
//! configuration as `key=value`. Floats use 17 significant digits so that
//! values survive a write/read cycle unchanged.

use std::fs;
use std::path::Path;

use csv::{ReaderBuilder, WriterBuilder};

use super::BenchResult;
use crate::error::{Error, Result};
use crate::estimator::{EstimateRecord, Method};

pub const RECORD_HEADER: [&str; 11] = [
    "method",
    "space",
    "dim",
    "integrand",
    "n",
    "aux_n",
    "rep",
    "seed",
    "estimate",
    "true_value",
    "abs_error",
];

pub const BENCH_HEADER: [&str; 5] = ["method", "n", "rmse", "reps", "slope"];

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn comment_block(comments: &[(String, String)]) -> String {
    comments.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, comments: &[(String, String)], header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut wtr = WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    wtr.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        wtr.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    let body = wtr.into_inner().map_err(|e| csv_err(path, e))?;
    let mut bytes = comment_block(comments).into_bytes();
    bytes.extend_from_slice(&body);
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_records_csv(path: &Path, records: &[EstimateRecord], comments: &[(String, String)]) -> Result<()> {
    let rows = records
        .iter()
        .map(|r| {
            vec![
                r.method.label().to_string(),
                r.space.clone(),
                r.dim.to_string(),
                r.integrand.clone(),
                r.n.to_string(),
                r.aux_n.to_string(),
                r.rep.to_string(),
                r.seed.to_string(),
                format_float(r.estimate),
                format_opt(r.true_value),
                format_opt(r.abs_error),
            ]
        })
        .collect();
    write_file(path, comments, &RECORD_HEADER, rows)
}

pub fn write_bench_csv(path: &Path, bench: &BenchResult, comments: &[(String, String)]) -> Result<()> {
    let rows = bench
        .rows
        .iter()
        .map(|row| {
            vec![
                row.method.label().to_string(),
                row.n.to_string(),
                format_float(row.rmse),
                bench.reps.to_string(),
                format_opt(bench.slope(row.method)),
            ]
        })
        .collect();
    write_file(path, comments, &BENCH_HEADER, rows)
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let found = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(csv_err(path, format!("unexpected header {found:?}")));
    }
    rdr.records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| csv_err(path, e))
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        csv_err(
            path,
            format!("bad field {} in {rec:?}", RECORD_HEADER.get(i).unwrap_or(&"?")),
        )
    })
}

fn opt_field(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(path, rec, i).map(Some),
    }
}

pub fn read_records_csv(path: &Path) -> Result<Vec<EstimateRecord>> {
    read_rows(path, &RECORD_HEADER)?
        .iter()
        .map(|rec| {
            Ok(EstimateRecord {
                method: rec[0].parse::<Method>()?,
                space: rec[1].to_string(),
                dim: field(path, rec, 2)?,
                integrand: rec[3].to_string(),
                n: field(path, rec, 4)?,
                aux_n: field(path, rec, 5)?,
                rep: field(path, rec, 6)?,
                seed: field(path, rec, 7)?,
                estimate: field(path, rec, 8)?,
                true_value: opt_field(path, rec, 9)?,
                abs_error: opt_field(path, rec, 10)?,
            })
        })
        .collect()
}

/// One bench file row: `(method, n, rmse, reps, slope)`.
pub type BenchLine = (Method, usize, f64, usize, Option<f64>);

pub fn read_bench_csv(path: &Path) -> Result<Vec<BenchLine>> {
    read_rows(path, &BENCH_HEADER)?
        .iter()
        .map(|rec| {
            Ok((
                rec[0].parse::<Method>()?,
                field(path, rec, 1)?,
                field(path, rec, 2)?,
                field(path, rec, 3)?,
                opt_field(path, rec, 4)?,
            ))
        })
        .collect()
}
