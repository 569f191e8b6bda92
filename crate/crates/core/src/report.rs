//! Deterministic report serialization.
//!
//! JSON keys come out sorted and every float is written with 17 significant
//! digits, so identical results always produce identical bytes.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::Result;

/// Scientific notation with 17 significant digits; `nan`, `inf`, `-inf` for
/// non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

/// Compact JSON formatter writing floats via [`fmt_f64`].
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // non-finite values never reach here: serde_json maps them to null
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` with sorted keys and fixed float precision.
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    // round-trip through Value so map keys are ordered
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedPrecision);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// A cell of a tabular report.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// A result set that can be written as JSON and, optionally, as CSV.
pub trait Report {
    fn to_json(&self) -> Value;

    fn to_table(&self) -> Option<Table> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Serializes a report. Reports without a tabular form fall back to JSON
/// when CSV is requested.
pub fn emit_report<R: Report + ?Sized>(results: &R, format: ReportFormat) -> Result<Vec<u8>> {
    match (format, results.to_table()) {
        (ReportFormat::Csv, Some(table)) => Ok(table.to_csv().into_bytes()),
        _ => to_json_bytes(&results.to_json()),
    }
}

impl Report for Value {
    fn to_json(&self) -> Value {
        self.clone()
    }
}
