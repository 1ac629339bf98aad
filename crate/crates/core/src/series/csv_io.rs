//! CSV schema shared by series and mask files.
//!
//! ```text
//! t,<channel_1>,...,<channel_L>
//! 0,1.25,...
//! 60,1.31,...
//! ```
//!
//! `t` is the sample time in seconds (`index · dt`). Values are written with
//! the shortest decimal form that parses back to the same `f64`. Mask files
//! use the same grid with `0`/`1` entries.

use std::path::Path;

use super::{CorruptedSeries, CorruptionMask, TimeSeries};
use crate::error::{Error, Result};
use crate::io::write_atomic;

fn csv_err(path: &Path, message: impl ToString) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

struct Grid {
    names: Vec<String>,
    times: Vec<f64>,
    cells: Vec<String>,
}

fn read_grid(path: &Path) -> Result<Grid> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(csv_err(path, "header must be `t,<channel_1>,...`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut times = Vec::new();
    let mut cells = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() != names.len() + 1 {
            return Err(csv_err(path, format!("row {} has {} fields, expected {}", i + 1, record.len(), names.len() + 1)));
        }
        let t: f64 = record[0]
            .parse()
            .map_err(|_| csv_err(path, format!("row {}: bad time `{}`", i + 1, &record[0])))?;
        times.push(t);
        cells.extend(record.iter().skip(1).map(str::to_string));
    }
    if times.is_empty() {
        return Err(csv_err(path, "no data rows"));
    }
    Ok(Grid { names, times, cells })
}

fn infer_dt(times: &[f64]) -> f64 {
    match times {
        [a, b, ..] if b - a > 0.0 => b - a,
        _ => 1.0,
    }
}

pub fn read_series(path: &Path) -> Result<TimeSeries> {
    let grid = read_grid(path)?;
    let values = grid
        .cells
        .iter()
        .map(|c| c.parse::<f64>().map_err(|_| csv_err(path, format!("bad value `{c}`"))))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(values, grid.names, infer_dt(&grid.times))
}

pub fn read_mask(path: &Path) -> Result<CorruptionMask> {
    let grid = read_grid(path)?;
    let flags = grid
        .cells
        .iter()
        .map(|c| match c.as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(csv_err(path, format!("mask entries must be 0 or 1, found `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    CorruptionMask::new(flags, grid.times.len(), grid.names.len())
}

/// Reads a corrupted series and its mask; masked entries are forced to 0.
pub fn read_corrupted(series_path: &Path, mask_path: &Path) -> Result<CorruptedSeries> {
    CorruptedSeries::from_parts(read_series(series_path)?, read_mask(mask_path)?)
}

fn render<F: Fn(usize, usize) -> String>(names: &[String], len: usize, dt: f64, cell: F) -> Vec<u8> {
    let mut out = String::new();
    out.push('t');
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for t in 0..len {
        out.push_str(&format!("{}", t as f64 * dt));
        for c in 0..names.len() {
            out.push(',');
            out.push_str(&cell(t, c));
        }
        out.push('\n');
    }
    out.into_bytes()
}

pub fn series_to_csv(series: &TimeSeries) -> Vec<u8> {
    render(series.channel_names(), series.len(), series.dt(), |t, c| {
        format!("{}", series.get(t, c))
    })
}

pub fn mask_to_csv(mask: &CorruptionMask, like: &TimeSeries) -> Vec<u8> {
    render(like.channel_names(), mask.len(), like.dt(), |t, c| {
        if mask.is_masked(t, c) { "1" } else { "0" }.to_string()
    })
}

pub fn write_series(path: &Path, series: &TimeSeries) -> Result<()> {
    write_atomic(path, &series_to_csv(series))
}

pub fn write_mask(path: &Path, mask: &CorruptionMask, like: &TimeSeries) -> Result<()> {
    mask.matches(like)?;
    write_atomic(path, &mask_to_csv(mask, like))
}
