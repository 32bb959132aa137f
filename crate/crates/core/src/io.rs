//! File formats for signals, period-cell samples and symbols.
//!
//! Signal CSV: header `x,re,im` (`x1,…,xd,re,im` for `d > 1`), one row per
//! grid node in row-major order, floats as `{:.16e}`. The grid is recovered
//! from the rows: `N` from the row count, `T` from the first node `−T/2`.
//!
//! Signal binary, little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `PDOSIG1\0` |
//! | 4     | `u32` dimension `d` |
//! | 4     | `u32` points per axis `N` |
//! | 8     | `f64` extent `T` |
//! | 16·N^d | `(re, im)` `f64` pairs, row-major |
//!
//! Period-cell samples use the same CSV layout with physical coordinates
//! `L y_j` in the `x` columns; the lattice travels separately.
//!
//! Symbol JSON:
//! `{"schema": 1, "period_matrix": [[..], ..], "coefficients": [{"index": [..], "re": .., "im": ..}, ..]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, PeriodMatrix};
use crate::signal::{GridSignal, GridSpec};
use crate::symbol::{PeriodCellSamples, PeriodicSymbol};

pub const SIGNAL_MAGIC: &[u8; 8] = b"PDOSIG1\0";
pub const SCHEMA_VERSION: u32 = 1;

/// Float formatting shared by every text output: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn coordinate_header(dim: usize) -> String {
    if dim == 1 {
        "x,re,im".to_string()
    } else {
        let mut cols: Vec<String> = (1..=dim).map(|a| format!("x{a}")).collect();
        cols.push("re".into());
        cols.push("im".into());
        cols.join(",")
    }
}

fn write_rows<W: Write>(mut w: W, dim: usize, rows: impl Iterator<Item = (Vec<f64>, Complex64)>) -> Result<()> {
    writeln!(w, "{}", coordinate_header(dim))?;
    for (x, v) in rows {
        let mut line: Vec<String> = x.into_iter().map(fmt_f64).collect();
        line.push(fmt_f64(v.re));
        line.push(fmt_f64(v.im));
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: BufRead>(r: R) -> Result<(usize, Vec<(Vec<f64>, Complex64)>)> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))??;
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[cols.len() - 2] != "re" || cols[cols.len() - 1] != "im" {
        return Err(Error::Parse(format!("unexpected CSV header `{header}`")));
    }
    let dim = cols.len() - 2;
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        if fields.len() != dim + 2 {
            return Err(Error::Parse(format!("line {}: expected {} fields, found {}", lineno + 2, dim + 2, fields.len())));
        }
        rows.push((fields[..dim].to_vec(), Complex64::new(fields[dim], fields[dim + 1])));
    }
    Ok((dim, rows))
}

fn points_per_axis(rows: usize, dim: usize) -> Result<usize> {
    let n = (rows as f64).powf(1.0 / dim as f64).round() as usize;
    if n.checked_pow(dim as u32) != Some(rows) {
        return Err(Error::Parse(format!("{rows} rows do not form a {dim}-dimensional square grid")));
    }
    Ok(n)
}

fn coordinates_match(expected: &[f64], found: &[f64], scale: f64) -> bool {
    expected.iter().zip(found).all(|(a, b)| (a - b).abs() <= 1e-9 * scale)
}

pub fn write_signal_csv<W: Write>(w: W, f: &GridSignal) -> Result<()> {
    let spec = *f.spec();
    write_rows(w, spec.dim, f.values().iter().enumerate().map(|(i, v)| (spec.coords(i), *v)))
}

pub fn read_signal_csv<R: BufRead>(r: R) -> Result<GridSignal> {
    let (dim, rows) = read_rows(r)?;
    let points = points_per_axis(rows.len(), dim)?;
    let extent = -2.0 * rows.first().map(|r| r.0[0]).unwrap_or(0.0);
    let spec = GridSpec::new(dim, extent, points).map_err(|e| Error::Parse(format!("grid: {e}")))?;
    for (i, (x, _)) in rows.iter().enumerate() {
        if !coordinates_match(&spec.coords(i), x, extent) {
            return Err(Error::Parse(format!("row {} is not node {:?} of the grid", i + 1, spec.coords(i))));
        }
    }
    GridSignal::new(spec, rows.into_iter().map(|r| r.1).collect())
}

pub fn write_signal_binary<W: Write>(mut w: W, f: &GridSignal) -> Result<()> {
    let spec = f.spec();
    w.write_all(SIGNAL_MAGIC)?;
    w.write_all(&(spec.dim as u32).to_le_bytes())?;
    w.write_all(&(spec.points as u32).to_le_bytes())?;
    w.write_all(&spec.extent.to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_signal_binary<R: Read>(mut r: R) -> Result<GridSignal> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SIGNAL_MAGIC {
        return Err(Error::Parse("not a signal file (bad magic)".into()));
    }
    let mut u = [0u8; 4];
    r.read_exact(&mut u)?;
    let dim = u32::from_le_bytes(u) as usize;
    r.read_exact(&mut u)?;
    let points = u32::from_le_bytes(u) as usize;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let extent = f64::from_le_bytes(b);
    let spec = GridSpec::new(dim, extent, points).map_err(|e| Error::Parse(format!("grid: {e}")))?;
    let mut values = Vec::with_capacity(spec.len());
    for _ in 0..spec.len() {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        values.push(Complex64::new(re, f64::from_le_bytes(b)));
    }
    GridSignal::new(spec, values)
}

pub fn write_cell_samples_csv<W: Write>(w: W, s: &PeriodCellSamples) -> Result<()> {
    write_rows(w, s.lattice().dim(), s.values().iter().enumerate().map(|(i, v)| (s.node(i), *v)))
}

pub fn read_cell_samples_csv<R: BufRead>(r: R, lattice: PeriodMatrix) -> Result<PeriodCellSamples> {
    let (dim, rows) = read_rows(r)?;
    if dim != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), found: dim });
    }
    let points = points_per_axis(rows.len(), dim)?;
    let scale = lattice.entries().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let samples = PeriodCellSamples::new(lattice, points, rows.iter().map(|r| r.1).collect())?;
    for (i, (x, _)) in rows.iter().enumerate() {
        if !coordinates_match(&samples.node(i), x, scale) {
            return Err(Error::Parse(format!("row {} is not period-cell node {i}", i + 1)));
        }
    }
    Ok(samples)
}

#[derive(Serialize, Deserialize)]
struct CoefficientRecord {
    index: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SymbolFile {
    schema: u32,
    period_matrix: Vec<Vec<f64>>,
    coefficients: Vec<CoefficientRecord>,
}

/// The JSON value written by [`write_symbol_json`].
pub fn symbol_to_json(p: &PeriodicSymbol) -> serde_json::Value {
    let file = SymbolFile {
        schema: SCHEMA_VERSION,
        period_matrix: p.lattice().rows(),
        coefficients: p.iter().map(|(k, c)| CoefficientRecord { index: k.0.clone(), re: c.re, im: c.im }).collect(),
    };
    serde_json::to_value(file).expect("symbol serializes")
}

pub fn write_symbol_json<W: Write>(mut w: W, p: &PeriodicSymbol) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &symbol_to_json(p))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_symbol_json<R: Read>(r: R) -> Result<PeriodicSymbol> {
    let file: SymbolFile = serde_json::from_reader(r)?;
    if file.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported symbol schema {}", file.schema)));
    }
    let lattice = PeriodMatrix::from_rows(&file.period_matrix)?;
    let mut p = PeriodicSymbol::new(lattice);
    for rec in file.coefficients {
        if !(rec.re.is_finite() && rec.im.is_finite()) {
            return Err(Error::NonFinite("symbol coefficient"));
        }
        p.insert(MultiIndex(rec.index), Complex64::new(rec.re, rec.im))?;
    }
    Ok(p)
}

/// On-disk signal layout, chosen by file extension (`.bin` is binary).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalFormat {
    Csv,
    Binary,
}

impl SignalFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => Self::Binary,
            _ => Self::Csv,
        }
    }
}

pub fn load_signal(path: &Path) -> Result<GridSignal> {
    let file = BufReader::new(File::open(path)?);
    match SignalFormat::from_path(path) {
        SignalFormat::Csv => read_signal_csv(file),
        SignalFormat::Binary => read_signal_binary(file),
    }
}

pub fn save_signal(path: &Path, f: &GridSignal) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match SignalFormat::from_path(path) {
        SignalFormat::Csv => write_signal_csv(file, f),
        SignalFormat::Binary => write_signal_binary(file, f),
    }
}

pub fn load_symbol(path: &Path) -> Result<PeriodicSymbol> {
    read_symbol_json(BufReader::new(File::open(path)?))
}

pub fn save_symbol(path: &Path, p: &PeriodicSymbol) -> Result<()> {
    write_symbol_json(BufWriter::new(File::create(path)?), p)
}
