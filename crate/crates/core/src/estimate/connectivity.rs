use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{correlation_from_covariance, Matrix};
use crate::model::upsilon;

/// Nonfractal connectivity `D = gamma_mn / sqrt(gamma_mm gamma_nn)` and fractal
/// connectivity `rho_inf = D * Upsilon(d_m, d_n)`, both with unit diagonal.
pub fn connectivity(gamma_hat: &Matrix, d_hat: &[f64]) -> Result<(Matrix, Matrix)> {
    let q = gamma_hat.nrows();
    if gamma_hat.ncols() != q || d_hat.len() != q {
        return Err(Error::InvalidInput(format!(
            "{}x{} covariance with {} memory estimates",
            gamma_hat.nrows(),
            gamma_hat.ncols(),
            d_hat.len()
        )));
    }
    let d = correlation_from_covariance(gamma_hat)?;
    let rho = DMatrix::from_fn(q, q, |i, k| {
        if i == k {
            1.0
        } else {
            d[(i, k)] * upsilon(d_hat[i], d_hat[k])
        }
    });
    Ok((d, rho))
}

/// Sample correlation matrix of `series` (one inner vector per series).
pub fn pearson_correlation(series: &[Vec<f64>]) -> Result<Matrix> {
    let q = series.len();
    let n = series.first().map_or(0, Vec::len);
    if q == 0 || n < 2 {
        return Err(Error::InsufficientData(
            "Pearson correlation needs at least one series of length 2".into(),
        ));
    }
    if let Some(k) = series.iter().position(|s| s.len() != n) {
        return Err(Error::InvalidInput(format!(
            "series {k} has length {}, expected {n}",
            series[k].len()
        )));
    }
    let centered: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            let mean = s.iter().sum::<f64>() / n as f64;
            s.iter().map(|v| v - mean).collect()
        })
        .collect();
    let mut cov = DMatrix::zeros(q, q);
    for m in 0..q {
        for k in m..q {
            let v: f64 = centered[m].iter().zip(&centered[k]).map(|(a, b)| a * b).sum();
            cov[(m, k)] = v;
            cov[(k, m)] = v;
        }
    }
    correlation_from_covariance(&cov).map_err(|e| match e {
        Error::DegenerateSeries { index, .. } => Error::DegenerateSeries {
            index,
            reason: "zero variance".into(),
        },
        other => other,
    })
}
