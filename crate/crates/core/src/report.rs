//! CSV and JSON Lines rows for count results.
//!
//! Columns: `d,monic,variant,m,n,H,count,method,workers,elapsed_seconds`.
//! `m` and `n` are empty for the total count; `elapsed_seconds` is empty
//! unless timings were requested, so repeated runs give identical bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{CountResult, Split, Variant};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub d: usize,
    pub monic: bool,
    pub variant: String,
    pub m: Option<usize>,
    pub n: Option<usize>,
    #[serde(rename = "H")]
    pub height: u64,
    pub count: u128,
    pub method: String,
    pub workers: usize,
    pub elapsed_seconds: Option<f64>,
}

impl CountRow {
    pub fn from_result(r: &CountResult, timings: bool) -> Self {
        let split = r.query.reported_split();
        Self {
            d: r.query.degree,
            monic: r.query.monic,
            variant: r.query.variant.label().to_string(),
            m: split.map(|s| s.outer),
            n: split.map(|s| s.inner),
            height: r.query.height,
            count: r.count,
            method: r.method.label().to_string(),
            workers: r.workers,
            elapsed_seconds: timings.then_some(r.elapsed_seconds),
        }
    }

    /// The count variant this row describes.
    pub fn variant(&self) -> Option<Variant> {
        match (self.variant.as_str(), self.m, self.n) {
            ("total", _, _) => Some(Variant::Total),
            ("indecomp_pair", _, _) => Some(Variant::IndecompPair),
            ("split", Some(m), Some(n)) => Some(Variant::Split(Split::new(m, n))),
            _ => None,
        }
    }
}

/// Same fields as [`CountRow`], with the count as a string since it can
/// exceed 64 bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct JsonRow {
    d: usize,
    monic: bool,
    variant: String,
    m: Option<usize>,
    n: Option<usize>,
    #[serde(rename = "H")]
    height: u64,
    count: String,
    method: String,
    workers: usize,
    elapsed_seconds: Option<f64>,
}

impl From<&CountRow> for JsonRow {
    fn from(r: &CountRow) -> Self {
        Self {
            d: r.d,
            monic: r.monic,
            variant: r.variant.clone(),
            m: r.m,
            n: r.n,
            height: r.height,
            count: r.count.to_string(),
            method: r.method.clone(),
            workers: r.workers,
            elapsed_seconds: r.elapsed_seconds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes rows one at a time, emitting the CSV header before the first.
pub struct RowWriter<W: Write> {
    format: Format,
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
}

impl<W: Write> RowWriter<W> {
    pub fn new(format: Format, out: W) -> Self {
        match format {
            Format::Csv => Self { format, csv: Some(csv::Writer::from_writer(out)), raw: None },
            Format::Json => Self { format, csv: None, raw: Some(out) },
        }
    }

    pub fn write(&mut self, row: &CountRow) -> Result<(), ReportError> {
        match (self.format, &mut self.csv, &mut self.raw) {
            (Format::Csv, Some(w), _) => {
                w.serialize(row)?;
                w.flush()?;
            }
            (_, _, Some(w)) => {
                serde_json::to_writer(&mut *w, &JsonRow::from(row))?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
            _ => unreachable!("writer built for its format"),
        }
        Ok(())
    }

    /// Flushes buffered output.
    pub fn finish(self) -> Result<(), ReportError> {
        if let Some(mut w) = self.csv {
            w.flush()?;
        }
        Ok(())
    }
}

pub fn rows_to_string(rows: &[CountRow], format: Format) -> Result<String, ReportError> {
    let mut buf = Vec::new();
    let mut w = RowWriter::new(format, &mut buf);
    for r in rows {
        w.write(r)?;
    }
    w.finish()?;
    Ok(String::from_utf8(buf).expect("writers emit UTF-8"))
}

/// Parses rows written by [`RowWriter`] in CSV format.
pub fn parse_count_csv(text: &str) -> Result<Vec<CountRow>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<CountRow>().enumerate() {
        let row = rec?;
        if row.variant().is_none() {
            return Err(ReportError::BadRow {
                row: i + 1,
                message: format!("unknown variant {:?} (m={:?}, n={:?})", row.variant, row.m, row.n),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}
