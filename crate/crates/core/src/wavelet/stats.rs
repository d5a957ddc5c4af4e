//! Wavelet variance, covariance and correlation estimators.
//!
//! The estimator is the plain mean of coefficient products at a scale,
//! `nu(j) = (1/n'_j) sum_t W_a(j,t) W_b(j,t)`, with no `2^j` factor. Under
//! this convention unit white noise has `nu(j) = 1` at every scale.

use crate::error::{Error, Result};

use super::transform::WaveletDecomposition;

fn check_pair(a: &WaveletDecomposition, b: &WaveletDecomposition, j: usize) -> Result<()> {
    if !a.is_compatible(b) {
        return Err(Error::InvalidInput(format!(
            "decompositions differ (filters {}/{}, lengths {}/{}, levels {}/{})",
            a.filter(),
            b.filter(),
            a.len(),
            b.len(),
            a.levels(),
            b.levels()
        )));
    }
    if j == 0 || j > a.levels() {
        return Err(Error::InvalidInput(format!(
            "scale {j} outside 1..={}",
            a.levels()
        )));
    }
    Ok(())
}

/// Wavelet covariance of two series at scale `j`.
pub fn wavelet_covariance(
    a: &WaveletDecomposition,
    b: &WaveletDecomposition,
    j: usize,
    exclude_boundary: bool,
) -> Result<f64> {
    check_pair(a, b, j)?;
    let (wa, wb) = if exclude_boundary {
        (a.interior_detail(j), b.interior_detail(j))
    } else {
        (a.detail(j), b.detail(j))
    };
    if wa.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no interior coefficients remain at scale {j}"
        )));
    }
    let sum: f64 = wa.iter().zip(wb).map(|(x, y)| x * y).sum();
    Ok(sum / wa.len() as f64)
}

/// Wavelet variance at scale `j`: the covariance of a series with itself.
pub fn wavelet_variance(a: &WaveletDecomposition, j: usize, exclude_boundary: bool) -> Result<f64> {
    wavelet_covariance(a, a, j, exclude_boundary)
}

/// Wavelet correlation at scale `j`, clamped to `[-1, 1]`.
pub fn wavelet_correlation(
    a: &WaveletDecomposition,
    b: &WaveletDecomposition,
    j: usize,
    exclude_boundary: bool,
) -> Result<f64> {
    let cov = wavelet_covariance(a, b, j, exclude_boundary)?;
    let var_a = wavelet_variance(a, j, exclude_boundary)?;
    let var_b = wavelet_variance(b, j, exclude_boundary)?;
    if var_a <= 0.0 || var_b <= 0.0 {
        return Err(Error::DegenerateScale { scale: j });
    }
    Ok((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Sum of coefficient products at scale `j` over all coefficients,
/// boundary included. This is the per-scale term of the energy
/// decomposition of the sample cross-product.
pub(crate) fn cross_energy(a: &WaveletDecomposition, b: &WaveletDecomposition, j: usize) -> f64 {
    a.detail(j).iter().zip(b.detail(j)).map(|(x, y)| x * y).sum()
}
