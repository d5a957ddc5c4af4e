//! Matrix CSV interchange and atomic output writing.
//!
//! A matrix file has a header row `"",label_1,...,label_q` followed by one row
//! per label, `label_i,v_i1,...,v_iq`. Values use `{:.16e}` (17 significant
//! digits), so parsing a written file reproduces every entry bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote(label: &str) -> String {
    if label.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_string()
    }
}

pub fn matrix_to_csv(labels: &[String], m: &Matrix) -> String {
    let mut out = String::new();
    out.push_str("\"\"");
    for l in labels {
        out.push(',');
        out.push_str(&quote(l));
    }
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&quote(l));
        for j in 0..m.ncols() {
            out.push(',');
            out.push_str(&format_value(m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// `series,value` table, one row per label.
pub fn vector_to_csv(header: &str, labels: &[String], values: &[f64]) -> String {
    let mut out = format!("series,{header}\n");
    for (l, v) in labels.iter().zip(values) {
        out.push_str(&format!("{},{}\n", quote(l), format_value(*v)));
    }
    out
}

/// A labeled square matrix read back from [`matrix_to_csv`] format.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub labels: Vec<String>,
    pub matrix: Matrix,
}

pub fn parse_matrix_csv(text: &str, source: &str) -> Result<LabeledMatrix> {
    let bad = |msg: String| Error::InvalidInput(format!("{source}: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec.map_err(|e| bad(e.to_string()))?);
    }
    let header = records.first().ok_or_else(|| bad("empty matrix file".into()))?;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let q = labels.len();
    if q == 0 {
        return Err(bad("header row has no labels".into()));
    }
    if records.len() != q + 1 {
        return Err(bad(format!("{q} column labels but {} data rows", records.len() - 1)));
    }
    let mut m = DMatrix::zeros(q, q);
    for (i, rec) in records.iter().skip(1).enumerate() {
        let line = i + 2;
        if rec.len() != q + 1 {
            return Err(bad(format!("line {line} has {} fields, expected {}", rec.len(), q + 1)));
        }
        if rec[0] != labels[i] {
            return Err(bad(format!(
                "line {line} is labeled `{}` but column {} is `{}`",
                &rec[0],
                i + 1,
                labels[i]
            )));
        }
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                bad(format!("line {line}, column {}: `{cell}` is not a number", j + 2))
            })?;
            if !v.is_finite() {
                return Err(bad(format!("line {line}, column {}: non-finite value", j + 2)));
            }
            m[(i, j)] = v;
        }
    }
    Ok(LabeledMatrix { labels, matrix: m })
}

pub fn read_matrix_csv(path: &Path) -> Result<LabeledMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_csv(&text, &path.display().to_string())
}

/// Files produced by one command, written together by [`write_all`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputSet {
    pub files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
    }
}

/// Writes every file to a temporary sibling first and renames them into place
/// only once all writes succeeded.
pub fn write_all(dir: &Path, outputs: &OutputSet) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, contents) in &outputs.files {
        let target = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, contents) {
            cleanup(&staged);
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(&tmp, e));
        }
        staged.push((tmp, target));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (i, (tmp, target)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, target) {
            cleanup(&staged[i..]);
            return Err(Error::io(target, e));
        }
        written.push(target.clone());
    }
    Ok(written)
}
