//! File formats: triplet and dense CSV, JSON, and allocation exports.
//!
//! * Triplet CSV: header `entry,exit,toll`, 1-based indices.
//! * Dense CSV: `n` rows of `n` numbers, row `h` column `k` holding `t_hk`.
//! * JSON: `{"n": 3, "trips": [{"entry": 1, "exit": 2, "toll": 1.0}]}`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::equity::{Correlations, LorenzCurve};
use crate::error::{Result, TollError};
use crate::toll::{Allocation, TollMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub entry: usize,
    pub exit: usize,
    pub toll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub trips: Vec<TripRecord>,
}

impl From<&TollMatrix> for MatrixJson {
    fn from(t: &TollMatrix) -> Self {
        MatrixJson {
            n: t.n(),
            trips: t.trips().map(|(trip, toll)| TripRecord { entry: trip.entry, exit: trip.exit, toll }).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for TollMatrix {
    type Error = TollError;
    fn try_from(m: MatrixJson) -> Result<Self> {
        TollMatrix::from_triplets(m.trips.into_iter().map(|r| (r.entry, r.exit, r.toll)), Some(m.n))
    }
}

/// Reads triplet CSV. `segments` overrides the inferred segment count.
pub fn read_triplets<R: Read>(reader: R, segments: Option<usize>) -> Result<TollMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let mut rows = Vec::new();
    for (idx, rec) in rdr.deserialize::<TripRecord>().enumerate() {
        let rec = rec.map_err(|e| TollError::Parse { line: idx + 2, message: e.to_string() })?;
        rows.push((rec.entry, rec.exit, rec.toll));
    }
    TollMatrix::from_triplets(rows, segments)
}

pub fn write_triplets<W: Write>(toll: &TollMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(["entry", "exit", "toll"])?;
    for (trip, t) in toll.trips() {
        wtr.serialize(TripRecord { entry: trip.entry, exit: trip.exit, toll: t })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_dense<R: Read>(reader: R) -> Result<TollMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut grid = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| TollError::Parse { line: idx + 1, message: format!("`{s}`: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        grid.push(row);
    }
    TollMatrix::from_dense(&grid)
}

pub fn write_dense<W: Write>(toll: &TollMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in toll.dense() {
        wtr.write_record(row.iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<TollMatrix> {
    let m: MatrixJson = serde_json::from_reader(reader)?;
    m.try_into()
}

pub fn to_json(toll: &TollMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixJson::from(toll))?)
}

/// Loads a matrix, picking the format from the extension and header:
/// `.json` is JSON, a CSV starting with `entry,exit,toll` is triplets and any
/// other CSV is dense.
pub fn load_matrix(path: &Path, segments: Option<usize>) -> Result<TollMatrix> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let t = read_json(text.as_bytes())?;
        return match segments {
            Some(n) if n != t.n() => {
                TollMatrix::from_triplets(t.trips().map(|(tr, v)| (tr.entry, tr.exit, v)), Some(n))
            }
            _ => Ok(t),
        };
    }
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    if first.to_ascii_lowercase().replace(' ', "").starts_with("entry,exit,toll") {
        read_triplets(text.as_bytes(), segments)
    } else {
        read_dense(text.as_bytes())
    }
}

/// Rounds to `digits` decimals, resolving exact ties to even.
pub fn round_half_even(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    let y = x * scale;
    let r = y.round();
    let r = if (y - y.trunc()).abs() == 0.5 && r % 2.0 != 0.0 { r - y.signum() } else { r };
    r / scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRow {
    pub segment: usize,
    pub share: f64,
    pub percent: f64,
}

/// Per-segment rows with the percentage of `total` rounded half-even to two
/// decimals. A zero total yields zero percentages.
pub fn allocation_rows(x: &Allocation, total: f64) -> Vec<AllocationRow> {
    x.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &share)| AllocationRow {
            segment: i + 1,
            share,
            percent: if total > 0.0 { round_half_even(100.0 * share / total, 2) } else { 0.0 },
        })
        .collect()
}

pub fn write_allocation_csv<W: Write>(x: &Allocation, total: f64, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in allocation_rows(x, total) {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn allocation_json(x: &Allocation, total: f64) -> Result<String> {
    Ok(serde_json::to_string_pretty(&allocation_rows(x, total))?)
}

/// Reads named allocation columns from a CSV with a `segment` column
/// followed by one column per method.
pub fn read_allocation_table<R: Read>(reader: R) -> Result<Vec<(String, Allocation)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let names: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, field) in rec.iter().skip(1).enumerate() {
            let v = field
                .parse::<f64>()
                .map_err(|e| TollError::Parse { line: idx + 2, message: format!("`{field}`: {e}") })?;
            cols.get_mut(c)
                .ok_or_else(|| TollError::Parse { line: idx + 2, message: "too many columns".into() })?
                .push(v);
        }
    }
    names.into_iter().zip(cols).map(|(n, c)| Ok((n, Allocation::new(c)?))).collect()
}

pub fn write_lorenz_csv<W: Write>(curve: &LorenzCurve, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["p", "L"])?;
    for (p, l) in &curve.points {
        wtr.write_record([p.to_string(), l.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Square correlation table: Spearman below the diagonal, Pearson above.
pub fn write_correlation_csv<W: Write>(
    names: &[String],
    pairs: &dyn Fn(usize, usize) -> Correlations,
    writer: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header)?;
    for (r, name) in names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for c in 0..names.len() {
            row.push(match r.cmp(&c) {
                std::cmp::Ordering::Equal => "-".to_string(),
                std::cmp::Ordering::Greater => format!("{:.3}", pairs(c, r).spearman),
                std::cmp::Ordering::Less => format!("{:.3}", pairs(r, c).pearson),
            });
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
