//! Short-memory covariance estimators: SDF, COV and LIN.
//!
//! All three invert the unit-`gamma` band model
//! `nu_mn(j) ~ gamma_mn beta(d_m, d_n) 2^{(d_m + d_n) j}` at the estimated
//! memory parameters. Outputs are symmetric but not forced to be positive
//! semidefinite.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{beta, memory_sum_factor};
use crate::wavelet::{cross_energy, WaveletDecomposition};

use super::GammaMethod;

/// Smallest `cos(pi (d_m - d_n) / 2)` accepted before a pair is declared
/// ill-conditioned.
pub const MIN_PHASE_FACTOR: f64 = 1e-6;
/// LIN ignores scales with fewer boundary-free coefficients than this.
pub const LIN_MIN_COEFFICIENTS: usize = 16;

fn check_inputs(decomps: &[WaveletDecomposition], d_hat: &[f64]) -> Result<()> {
    let first = decomps
        .first()
        .ok_or_else(|| Error::InvalidInput("no series to estimate".into()))?;
    if decomps.len() != d_hat.len() {
        return Err(Error::InvalidInput(format!(
            "{} decompositions but {} memory estimates",
            decomps.len(),
            d_hat.len()
        )));
    }
    if let Some(k) = d_hat.iter().position(|d| !d.is_finite()) {
        return Err(Error::InvalidInput(format!("memory estimate {k} is not finite")));
    }
    if let Some(k) = decomps.iter().position(|d| !d.is_compatible(first)) {
        return Err(Error::InvalidInput(format!(
            "series {k} was decomposed with different filter, length or levels"
        )));
    }
    Ok(())
}

fn phase_factor(m: usize, n: usize, dm: f64, dn: f64) -> Result<f64> {
    let c = (0.5 * PI * (dm - dn)).cos();
    if c < MIN_PHASE_FACTOR {
        return Err(Error::IllConditioned {
            m,
            n,
            reason: format!("cos(pi (d_m - d_n) / 2) = {c:e} for d = ({dm}, {dn})"),
        });
    }
    Ok(c)
}

fn pairwise<F>(q: usize, mut entry: F) -> Result<Matrix>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let mut out = DMatrix::zeros(q, q);
    for m in 0..q {
        for n in m..q {
            let v = entry(m, n)?;
            out[(m, n)] = v;
            out[(n, m)] = v;
        }
    }
    Ok(out)
}

/// `gamma_mn = (1/N) sum_j sum_t W_m(j,t) W_n(j,t) / Lambda_mn(j)` with
/// `Lambda_mn(j) = beta(d_m, d_n) 2^{(d_m + d_n) j}`.
pub fn estimate_gamma_sdf(decomps: &[WaveletDecomposition], d_hat: &[f64]) -> Result<Matrix> {
    check_inputs(decomps, d_hat)?;
    let levels = decomps[0].levels();
    let len = decomps[0].len() as f64;
    pairwise(decomps.len(), |m, n| {
        let (dm, dn) = (d_hat[m], d_hat[n]);
        phase_factor(m, n, dm, dn)?;
        let b = beta(dm, dn);
        let mut total = 0.0;
        for j in 1..=levels {
            let lambda = b * (j as f64 * (dm + dn)).exp2();
            if !lambda.is_finite() || lambda < f64::MIN_POSITIVE {
                return Err(Error::NumericalRange {
                    m,
                    n,
                    reason: format!("band model {lambda:e} at scale {j}"),
                });
            }
            total += cross_energy(&decomps[m], &decomps[n], j) / lambda;
        }
        Ok(total / len)
    })
}

/// Total covariance carried by scales `1..=J` divided by its band-model sum,
/// `2 cos(pi (d_m - d_n)/2) B(s) (2 pi)^{-s} sum_j 2^{(s - 1) j}`.
pub fn estimate_gamma_cov(decomps: &[WaveletDecomposition], d_hat: &[f64]) -> Result<Matrix> {
    check_inputs(decomps, d_hat)?;
    let levels = decomps[0].levels();
    let len = decomps[0].len() as f64;
    pairwise(decomps.len(), |m, n| {
        let (dm, dn) = (d_hat[m], d_hat[n]);
        let c = phase_factor(m, n, dm, dn)?;
        let s = dm + dn;
        let scale_sum: f64 = (1..=levels).map(|j| ((s - 1.0) * j as f64).exp2()).sum();
        let denom = 2.0 * c * memory_sum_factor(s) * scale_sum * TAU.powf(-s);
        if !denom.is_finite() || denom < f64::MIN_POSITIVE {
            return Err(Error::NumericalRange {
                m,
                n,
                reason: format!("band-model sum {denom:e}"),
            });
        }
        let energy: f64 = (1..=levels)
            .map(|j| cross_energy(&decomps[m], &decomps[n], j))
            .sum();
        Ok(energy / len / denom)
    })
}

/// LIN inversion for one pair from its wavelet covariances,
/// `nu[j - 1] = nu_mn(j)`, where `None` marks an unusable scale.
///
/// With `s_j = nu(j) 2^{-(d_m + d_n) j}` the estimate is
/// `sign * 2^{mean log2 |s_j| - 1} (2 pi)^{d_m + d_n} / (B cos)`, where the sign
/// is that of the mean of `s_j` (zero counts as positive). Returns `None` when
/// no scale has `|s_j| > 1e-12`.
pub fn lin_gamma_from_covariances(nu: &[Option<f64>], dm: f64, dn: f64) -> Option<f64> {
    let s = dm + dn;
    let scaled: Vec<f64> = nu
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| v * (-s * (i + 1) as f64).exp2()))
        .filter(|v| v.abs() > 1e-12 && v.is_finite())
        .collect();
    if scaled.is_empty() {
        return None;
    }
    let k = scaled.len() as f64;
    let sign = if scaled.iter().sum::<f64>() / k < 0.0 { -1.0 } else { 1.0 };
    let c_hat = scaled.iter().map(|v| v.abs().log2()).sum::<f64>() / k;
    let phase = (0.5 * PI * (dm - dn)).cos();
    Some(sign * (c_hat - 1.0).exp2() * TAU.powf(s) / (memory_sum_factor(s) * phase))
}

/// LIN: averages `log2` of the scale-normalized wavelet covariance over
/// scales that keep at least [`LIN_MIN_COEFFICIENTS`] boundary-free
/// coefficients.
pub fn estimate_gamma_lin(decomps: &[WaveletDecomposition], d_hat: &[f64]) -> Result<Matrix> {
    check_inputs(decomps, d_hat)?;
    let levels = decomps[0].levels();
    pairwise(decomps.len(), |m, n| {
        let (dm, dn) = (d_hat[m], d_hat[n]);
        phase_factor(m, n, dm, dn)?;
        let nu: Vec<Option<f64>> = (1..=levels)
            .map(|j| {
                let (a, b) = (decomps[m].interior_detail(j), decomps[n].interior_detail(j));
                (a.len() >= LIN_MIN_COEFFICIENTS)
                    .then(|| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64)
            })
            .collect();
        let value = lin_gamma_from_covariances(&nu, dm, dn).ok_or_else(|| {
            Error::EstimationFailed(format!("LIN found no usable scale for pair ({m}, {n})"))
        })?;
        if !value.is_finite() {
            return Err(Error::NumericalRange {
                m,
                n,
                reason: format!("LIN estimate {value}"),
            });
        }
        Ok(value)
    })
}

pub fn estimate_gamma(
    decomps: &[WaveletDecomposition],
    d_hat: &[f64],
    method: GammaMethod,
) -> Result<Matrix> {
    match method {
        GammaMethod::Sdf => estimate_gamma_sdf(decomps, d_hat),
        GammaMethod::Cov => estimate_gamma_cov(decomps, d_hat),
        GammaMethod::Lin => estimate_gamma_lin(decomps, d_hat),
    }
}
