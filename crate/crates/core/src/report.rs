//! Text output helpers shared by the CSV and JSON writers.
//!
//! Every float is written with 17 significant digits so that parsing the
//! output reproduces the in-memory value exactly.

use serde::ser::{SerializeSeq, Serializer};
use serde_json::value::RawValue;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw17(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { fmt17(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// `serialize_with` helper writing one float at 17 significant digits;
/// non-finite values become `null`.
pub fn f64_17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&raw17(*x))
}

pub fn opt_f64_17<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f64_17(v, s),
        None => s.serialize_none(),
    }
}

pub fn vec_f64_17<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&raw17(x))?;
    }
    seq.end()
}

/// Renders columns as CSV under `header`, one row per index.
pub fn csv_columns(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut out = String::with_capacity(header.len() * 25 * (rows + 1));
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt17(col[i]));
        }
        out.push('\n');
    }
    out
}

/// Parses CSV produced by [`csv_columns`] back into a header and columns.
pub fn parse_csv_columns(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty csv")?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(format!("row {} has {} fields", lineno + 2, fields.len()));
        }
        for (col, field) in columns.iter_mut().zip(fields) {
            col.push(field.parse::<f64>().map_err(|e| format!("row {}: {e}", lineno + 2))?);
        }
    }
    Ok((header, columns))
}
