//! Time-series table ingestion.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Shortest series accepted after power-of-two truncation.
pub const MIN_LENGTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// One series per column, one time point per row.
    #[default]
    Columns,
    /// One series per row.
    Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HeaderMode {
    /// The first record is a header if any of its cells is not a number.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IngestOptions {
    pub delimiter: u8,
    pub orientation: Orientation,
    pub header: HeaderMode,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            orientation: Orientation::Columns,
            header: HeaderMode::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub source: String,
    pub options: IngestOptions,
    /// Time points read before any filtering.
    pub original_length: usize,
    /// 1-based time indices dropped for holding non-finite values.
    pub dropped_time_points: Vec<usize>,
    /// Trailing samples discarded to reach a power of two.
    pub truncated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub labels: Vec<String>,
    #[serde(skip)]
    pub series: Vec<Vec<f64>>,
    /// Seconds between samples, if known.
    pub sampling_interval: Option<f64>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.series.len()
    }
}

pub fn ingest_csv(path: &Path, options: IngestOptions) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text, &path.display().to_string(), options)
}

enum Cell {
    Value(f64),
    Missing,
}

/// Parses a delimited table held in memory. `source` names it in messages.
pub fn parse_table(text: &str, source: &str, options: IngestOptions) -> Result<Dataset> {
    let bad = |msg: String| Error::InvalidInput(format!("{source}: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(options.delimiter)
        .from_reader(text.as_bytes());
    let mut grid: Vec<Vec<String>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        grid.push(rec.iter().map(|c| c.trim().to_string()).collect());
    }
    if grid.is_empty() {
        return Err(bad("no data".into()));
    }
    let width = grid[0].len();
    if let Some(i) = grid.iter().position(|r| r.len() != width) {
        return Err(bad(format!(
            "ragged table: line {} has {} fields, line 1 has {width}",
            i + 1,
            grid[i].len()
        )));
    }
    // Coordinates in messages refer to the file as written.
    let file_pos = |r: usize, c: usize| match options.orientation {
        Orientation::Columns => (r + 1, c + 1),
        Orientation::Rows => (c + 1, r + 1),
    };
    if options.orientation == Orientation::Rows {
        grid = (0..width)
            .map(|c| grid.iter().map(|row| row[c].clone()).collect())
            .collect();
    }

    let has_header = match options.header {
        HeaderMode::Present => true,
        HeaderMode::Absent => false,
        HeaderMode::Auto => grid[0].iter().any(|c| parse_cell(c).is_none()),
    };
    let q = grid[0].len();
    let labels: Vec<String> = if has_header {
        grid[0].clone()
    } else {
        (1..=q).map(|k| format!("S{k}")).collect()
    };
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &labels {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    let dups: Vec<&str> = counts.iter().filter(|(_, &c)| c > 1).map(|(l, _)| *l).collect();
    if !dups.is_empty() {
        return Err(bad(format!("duplicate series labels: {}", dups.join(", "))));
    }
    if q < 2 {
        return Err(bad(format!("need at least 2 series, found {q}")));
    }

    let body = &grid[usize::from(has_header)..];
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(body.len()); q];
    let mut dropped = Vec::new();
    for (t, row) in body.iter().enumerate() {
        let r = t + usize::from(has_header);
        let mut values = Vec::with_capacity(q);
        for (c, cell) in row.iter().enumerate() {
            match parse_cell(cell) {
                Some(Cell::Value(v)) => values.push(v),
                Some(Cell::Missing) => values.push(f64::NAN),
                None => {
                    let (line, col) = file_pos(r, c);
                    return Err(bad(format!("line {line}, column {col}: `{cell}` is not a number")));
                }
            }
        }
        if values.iter().all(|v| v.is_finite()) {
            for (s, v) in series.iter_mut().zip(values) {
                s.push(v);
            }
        } else {
            dropped.push(t + 1);
        }
    }

    let mut warnings = Vec::new();
    if !dropped.is_empty() {
        warnings.push(format!(
            "dropped {} time point(s) with missing or non-finite values",
            dropped.len()
        ));
    }
    let available = series[0].len();
    let kept = if available == 0 { 0 } else { 1 << available.ilog2() };
    if kept < MIN_LENGTH {
        return Err(bad(format!(
            "{available} usable time points leave {kept} after power-of-two truncation; at least {MIN_LENGTH} are required"
        )));
    }
    let truncated = available - kept;
    if truncated > 0 {
        warnings.push(format!(
            "truncated {available} time points to {kept}, discarding the last {truncated}"
        ));
        for s in &mut series {
            s.truncate(kept);
        }
    }
    Ok(Dataset {
        labels,
        series,
        sampling_interval: None,
        provenance: Provenance {
            source: source.to_string(),
            options,
            original_length: body.len(),
            dropped_time_points: dropped,
            truncated,
        },
        warnings,
    })
}

fn parse_cell(cell: &str) -> Option<Cell> {
    if cell.is_empty() {
        return Some(Cell::Missing);
    }
    cell.parse::<f64>().ok().map(|v| {
        if v.is_finite() {
            Cell::Value(v)
        } else {
            Cell::Missing
        }
    })
}

/// Columns-as-series CSV with a header row of labels.
pub fn series_to_csv(labels: &[String], series: &[Vec<f64>]) -> String {
    let mut out = labels.join(",");
    out.push('\n');
    let n = series.first().map_or(0, Vec::len);
    for t in 0..n {
        let row: Vec<String> = series.iter().map(|s| super::io::format_value(s[t])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
