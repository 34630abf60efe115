//! Report rows and their JSON/CSV emission. Field order is declaration
//! order; exact rationals are strings `p/q`, reals carry 12 significant
//! digits.

use std::io::{self, Write};

use serde::Serialize;

use spherical_points::Rational;

use crate::args::Format;

pub fn sig12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn sig12_opt(x: Option<f64>) -> Option<f64> {
    x.map(sig12)
}

pub fn exact(r: &Rational) -> String {
    r.to_string()
}

#[derive(Debug, Serialize)]
pub struct CountRow {
    pub n: u32,
    pub boundary: &'static str,
    pub l1: String,
    pub l2: String,
    pub bound: u64,
    pub count: u64,
    pub raw_tuple_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub naive_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ConstantsRow {
    pub a: String,
    pub b: u32,
    pub e: Option<String>,
    pub alpha: Option<String>,
    pub adjoint_d1: String,
    pub adjoint_d2: String,
    pub adjoint_type: &'static str,
    pub delta: Option<String>,
    pub omega_inf: Option<f64>,
    pub omega_inf_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_inf_mc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_inf_mc_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub euler_product: f64,
    pub fiber_sum: Option<f64>,
    pub truncation_m: Option<u64>,
    pub tail_bound: Option<f64>,
    pub c: Option<f64>,
    pub c_error: Option<f64>,
    pub supported: bool,
    pub n: u32,
    pub boundary: &'static str,
    pub l1: String,
    pub l2: String,
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub bound: u64,
    pub exact: u64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    pub supported: bool,
}

#[derive(Debug, Serialize)]
pub struct FpRow {
    pub n: u32,
    pub p: u64,
    pub x_count: u64,
    pub u_count_w: u64,
    pub u_count_wz: u64,
    pub omega_w: String,
    pub omega_wz: String,
}

#[derive(Debug, Serialize)]
pub struct FiberRow {
    pub fiber: String,
    pub bound: u64,
    pub exact: u64,
    pub predicted: f64,
    pub ratio: Option<f64>,
}

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// One record: a JSON object or a CSV header plus one line.
pub fn emit_one<T: Serialize>(format: Format, row: &T) -> io::Result<()> {
    emit_table(format, std::slice::from_ref(row), false)
}

/// Several records: a JSON array or a CSV table.
pub fn emit_rows<T: Serialize>(format: Format, rows: &[T]) -> io::Result<()> {
    emit_table(format, rows, true)
}

fn emit_table<T: Serialize>(format: Format, rows: &[T], array: bool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            if array {
                serde_json::to_writer_pretty(&mut out, rows)?;
            } else {
                serde_json::to_writer_pretty(&mut out, &rows[0])?;
            }
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(16.0), 16.0);
        assert_eq!(sig12(std::f64::consts::PI).to_string(), "3.14159265359");
        assert_eq!(sig12(1.0 / 3.0).to_string(), "0.333333333333");
        assert!(sig12(f64::NAN).is_nan());
    }
}
