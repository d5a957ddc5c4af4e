//! Small dense-matrix helpers shared by the model and estimator layers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Serializes a matrix as a list of rows.
pub fn serialize_rows<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    to_rows(m).serialize(s)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != n_cols) {
        return Err(Error::InvalidInput(format!(
            "row {i} has {} entries, expected {n_cols}",
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]))
}

/// Largest absolute difference between `m` and its transpose.
pub fn asymmetry(m: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `(m + m^T) / 2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Normalizes a covariance-like matrix to unit diagonal. Off-diagonal entries
/// are clamped to `[-1, 1]`.
pub fn correlation_from_covariance(cov: &Matrix) -> Result<Matrix> {
    let q = cov.nrows();
    if let Some(k) = (0..q).find(|&k| !(cov[(k, k)] > 0.0)) {
        return Err(Error::DegenerateSeries {
            index: k,
            reason: format!("non-positive variance {}", cov[(k, k)]),
        });
    }
    Ok(DMatrix::from_fn(q, q, |i, j| {
        if i == j {
            1.0
        } else {
            (cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()).clamp(-1.0, 1.0)
        }
    }))
}
