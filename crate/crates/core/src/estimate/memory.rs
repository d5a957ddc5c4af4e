//! Memory-parameter estimators: log-scale regression (LMS) and the
//! wavelet-domain maximum likelihood (ML).

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::beta;
use crate::wavelet::{cross_energy, wavelet_variance, WaveletDecomposition};

use super::golden::golden_section_min;
use super::MemoryMethod;

/// Search box for the ML estimate.
pub const ML_BOUND: f64 = 0.499;
/// Golden-section stopping width.
pub const ML_TOLERANCE: f64 = 1e-6;
/// Narrowest scale interval considered by LMS.
pub const LMS_MIN_WIDTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryEstimate {
    pub d_hat: Vec<f64>,
    pub method: MemoryMethod,
    /// Scales used: the selected regression interval for LMS, `(1, J)` for ML.
    pub scale_interval: (usize, usize),
    /// `sigma^2_LS` of the selected interval (LMS) or the summed reduced
    /// log-likelihood at the optimum (ML).
    pub fit_diagnostic: f64,
    /// Per-series residual sum of squares (LMS) or log-likelihood (ML).
    pub series_diagnostics: Vec<f64>,
    /// Indices whose estimate falls outside the stationary range.
    pub out_of_range: Vec<usize>,
}

fn check_decompositions(decomps: &[WaveletDecomposition], min_levels: usize) -> Result<usize> {
    let first = decomps
        .first()
        .ok_or_else(|| Error::InvalidInput("no series to estimate".into()))?;
    if let Some(k) = decomps.iter().position(|d| !d.is_compatible(first)) {
        return Err(Error::InvalidInput(format!(
            "series {k} was decomposed with different filter, length or levels"
        )));
    }
    let levels = first.levels();
    if levels < min_levels {
        return Err(Error::InvalidInput(format!(
            "at least {min_levels} wavelet levels are required, got {levels}"
        )));
    }
    Ok(levels)
}

/// LMS estimate from wavelet decompositions, using boundary-free wavelet
/// variances.
pub fn estimate_memory_lms(decomps: &[WaveletDecomposition]) -> Result<MemoryEstimate> {
    let levels = check_decompositions(decomps, 4)?;
    let variances: Vec<Vec<f64>> = decomps
        .iter()
        .map(|d| {
            (1..=levels)
                // an empty scale is treated like a non-positive variance
                .map(|j| wavelet_variance(d, j, true).unwrap_or(0.0))
                .collect()
        })
        .collect();
    estimate_memory_lms_from_variances(&variances)
}

/// LMS on a precomputed table `variances[m][j - 1] = nu_m(j)`.
///
/// Every interval of at least [`LMS_MIN_WIDTH`] consecutive scales is fitted
/// per series by ordinary least squares of `log2 nu_m(j)` on `j`; the interval
/// with the smallest pooled residual variance `sigma^2_LS` wins. Ties go to
/// the widest interval, then to the lowest starting scale. Intervals that
/// contain a non-positive variance for any series are skipped.
pub fn estimate_memory_lms_from_variances(variances: &[Vec<f64>]) -> Result<MemoryEstimate> {
    let levels = variances.first().map_or(0, Vec::len);
    if levels < LMS_MIN_WIDTH || variances.iter().any(|v| v.len() != levels) {
        return Err(Error::InvalidInput(format!(
            "need a rectangular variance table with at least {LMS_MIN_WIDTH} scales"
        )));
    }
    // Normalizing by the largest variance only shifts each line, and keeps
    // rescaling by a power of two bit-exact.
    let logs: Vec<Vec<Option<f64>>> = variances
        .iter()
        .map(|v| {
            let top = v.iter().copied().filter(|nu| nu.is_finite()).fold(0.0, f64::max);
            v.iter()
                .map(|&nu| (nu > 0.0 && nu.is_finite()).then(|| (nu / top).log2()))
                .collect()
        })
        .collect();

    struct Candidate {
        lo: usize,
        hi: usize,
        sigma2: f64,
        slopes: Vec<f64>,
        residuals: Vec<f64>,
    }
    let mut best: Option<Candidate> = None;

    for lo in 1..=levels {
        for hi in (lo + LMS_MIN_WIDTH - 1)..=levels {
            let mut slopes = Vec::with_capacity(logs.len());
            let mut residuals = Vec::with_capacity(logs.len());
            let mut usable = true;
            for series in &logs {
                let ys: Option<Vec<f64>> = series[lo - 1..hi].iter().copied().collect();
                let Some(ys) = ys else {
                    usable = false;
                    break;
                };
                let (slope, rss) = least_squares(lo, &ys);
                slopes.push(slope);
                residuals.push(rss);
            }
            if !usable {
                continue;
            }
            let width = hi - lo + 1;
            let sigma2 = residuals.iter().sum::<f64>() / width as f64;
            let replace = match &best {
                None => true,
                Some(b) => {
                    let tol = 1e-12 * sigma2.max(b.sigma2) + 1e-20;
                    if sigma2 < b.sigma2 - tol {
                        true
                    } else if sigma2 <= b.sigma2 + tol {
                        width > b.hi - b.lo + 1
                    } else {
                        false
                    }
                }
            };
            if replace {
                best = Some(Candidate {
                    lo,
                    hi,
                    sigma2,
                    slopes,
                    residuals,
                });
            }
        }
    }

    let best = best.ok_or_else(|| {
        Error::EstimationFailed(
            "every LMS scale interval contains a non-positive wavelet variance".into(),
        )
    })?;
    let d_hat: Vec<f64> = best.slopes.iter().map(|s| s / 2.0).collect();
    Ok(MemoryEstimate {
        out_of_range: out_of_range(&d_hat),
        d_hat,
        method: MemoryMethod::Lms,
        scale_interval: (best.lo, best.hi),
        fit_diagnostic: best.sigma2,
        series_diagnostics: best.residuals,
    })
}

/// Slope and residual sum of squares of `ys[i]` regressed on `first + i`.
fn least_squares(first: usize, ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    let x_mean = first as f64 + (n - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let dx = first as f64 + i as f64 - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    let slope = sxy / sxx;
    let rss = ys
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let fit = y_mean + slope * (first as f64 + i as f64 - x_mean);
            (y - fit).powi(2)
        })
        .sum();
    (slope, rss)
}

fn out_of_range(d_hat: &[f64]) -> Vec<usize> {
    d_hat
        .iter()
        .enumerate()
        .filter(|(_, d)| !(d.abs() < 0.5))
        .map(|(k, _)| k)
        .collect()
}

/// Maximum-likelihood fit of one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlFit {
    pub d: f64,
    /// Innovation variance `gamma_hat(d_hat)`.
    pub gamma: f64,
    /// Reduced log-likelihood `l(d_hat)`.
    pub log_likelihood: f64,
}

/// Wavelet-domain profile likelihood for a single series.
struct Likelihood {
    n: f64,
    /// `S_j = sum_t W(j,t)^2`, index `j - 1`.
    energy: Vec<f64>,
    counts: Vec<f64>,
    total: f64,
}

impl Likelihood {
    fn new(decomp: &WaveletDecomposition) -> Self {
        let levels = decomp.levels();
        let energy: Vec<f64> = (1..=levels).map(|j| cross_energy(decomp, decomp, j)).collect();
        let counts = (1..=levels).map(|j| decomp.detail(j).len() as f64).collect();
        let total = energy.iter().sum();
        Self {
            n: decomp.len() as f64,
            energy,
            counts,
            total,
        }
    }

    /// `ln Lambda(j; d) = ln beta(d, d) + 2 d j ln 2`.
    fn log_band(d: f64, j: usize) -> f64 {
        beta(d, d).ln() + 2.0 * d * j as f64 * LN_2
    }

    /// `gamma_hat(d) / gamma_hat_ref` with `gamma_hat_ref = total / N`. The
    /// ratio is unchanged when the data are rescaled.
    fn gamma_ratio(&self, d: f64) -> f64 {
        let weighted: f64 = self
            .energy
            .iter()
            .enumerate()
            .map(|(i, s)| s * (-Self::log_band(d, i + 1)).exp())
            .sum();
        weighted / self.total
    }

    /// Objective up to the d-independent constant `N ln(total / N)`.
    fn relative(&self, d: f64) -> f64 {
        let bands: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, n_j)| n_j * Self::log_band(d, i + 1))
            .sum();
        self.n * self.gamma_ratio(d).ln() + bands
    }

    fn offset(&self) -> f64 {
        self.n * (self.total / self.n).ln()
    }
}

/// Minimizes `l(d) = N ln gamma_hat(d) + sum_j N_j ln Lambda(j; d)` over
/// `[-0.499, 0.499]`, where `Lambda(j; d) = beta(d, d) 2^{2dj}` and
/// `gamma_hat(d) = (1/N) sum_j S_j / Lambda(j; d)`. The scaling coefficients
/// are left out of both terms.
pub fn estimate_memory_ml(decomp: &WaveletDecomposition) -> Result<MlFit> {
    check_decompositions(std::slice::from_ref(decomp), 4)?;
    let lik = Likelihood::new(decomp);
    if !(lik.total > 0.0) || !lik.total.is_finite() {
        return Err(Error::EstimationFailed(
            "wavelet coefficients are all zero; the likelihood is degenerate".into(),
        ));
    }
    let d = golden_section_min(|d| lik.relative(d), -ML_BOUND, ML_BOUND, ML_TOLERANCE, 64);
    let gamma = lik.gamma_ratio(d) * lik.total / lik.n;
    Ok(MlFit {
        d,
        gamma,
        log_likelihood: lik.relative(d) + lik.offset(),
    })
}

/// ML estimate for every series independently.
pub fn estimate_memory_ml_all(decomps: &[WaveletDecomposition]) -> Result<MemoryEstimate> {
    let levels = check_decompositions(decomps, 4)?;
    let fits = decomps
        .iter()
        .enumerate()
        .map(|(k, d)| {
            estimate_memory_ml(d).map_err(|e| match e {
                Error::EstimationFailed(msg) => Error::EstimationFailed(format!("series {k}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d_hat: Vec<f64> = fits.iter().map(|f| f.d).collect();
    let series_diagnostics: Vec<f64> = fits.iter().map(|f| f.log_likelihood).collect();
    Ok(MemoryEstimate {
        out_of_range: out_of_range(&d_hat),
        d_hat,
        method: MemoryMethod::Ml,
        scale_interval: (1, levels),
        fit_diagnostic: series_diagnostics.iter().sum(),
        series_diagnostics,
    })
}

pub fn estimate_memory(decomps: &[WaveletDecomposition], method: MemoryMethod) -> Result<MemoryEstimate> {
    match method {
        MemoryMethod::Lms => estimate_memory_lms(decomps),
        MemoryMethod::Ml => estimate_memory_ml_all(decomps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate_arfima, ArfimaSpec, SimulationOptions};
    use crate::wavelet::{default_levels, dwt, WaveletFilter};

    fn decompose(series: &[Vec<f64>]) -> Vec<WaveletDecomposition> {
        let f = WaveletFilter::la8();
        let levels = default_levels(series[0].len());
        series.iter().map(|x| dwt(x, &f, levels).unwrap()).collect()
    }

    #[test]
    fn lms_recovers_exact_power_law() {
        let table: Vec<Vec<f64>> = vec![
            (1..=9).map(|j| (0.6 * j as f64 + 1.0).exp2()).collect(),
            (1..=9).map(|j| (-0.4 * j as f64 + 3.0).exp2()).collect(),
        ];
        let est = estimate_memory_lms_from_variances(&table).unwrap();
        assert!((est.d_hat[0] - 0.3).abs() < 1e-12);
        assert!((est.d_hat[1] + 0.2).abs() < 1e-12);
        // exact lines tie everywhere: widest interval wins
        assert_eq!(est.scale_interval, (1, 9));
    }

    #[test]
    fn lms_skips_non_positive_scales() {
        let mut row: Vec<f64> = (1..=8).map(|j| (0.2 * j as f64).exp2()).collect();
        row[0] = 0.0;
        let est = estimate_memory_lms_from_variances(&[row]).unwrap();
        assert_eq!(est.scale_interval, (2, 8));
        let dead = vec![vec![1.0, -1.0, 1.0, -1.0, 1.0]];
        assert!(matches!(
            estimate_memory_lms_from_variances(&dead),
            Err(Error::EstimationFailed(_))
        ));
    }

    #[test]
    fn lms_picks_the_tightest_interval() {
        // a kink at scale 5 makes the full-range fit worse than either leg
        let row: Vec<f64> = (1..=10)
            .map(|j| if j <= 5 { 0.4 * j as f64 } else { 2.0 + 1.5 * (j - 5) as f64 })
            .map(f64::exp2)
            .collect();
        let est = estimate_memory_lms_from_variances(&[row]).unwrap();
        assert!(est.fit_diagnostic < 1e-20);
        assert!(est.scale_interval == (1, 5) || est.scale_interval == (5, 10));
    }

    #[test]
    fn lms_flags_nonstationary_slopes() {
        let row: Vec<f64> = (1..=6).map(|j| (1.4 * j as f64).exp2()).collect();
        let est = estimate_memory_lms_from_variances(&[row]).unwrap();
        assert!((est.d_hat[0] - 0.7).abs() < 1e-12);
        assert_eq!(est.out_of_range, vec![0]);
    }

    #[test]
    fn scaling_leaves_estimates_unchanged() {
        let spec = ArfimaSpec::white(&[0.3, -0.1], 4).unwrap();
        let out = simulate_arfima(&spec, 4096, SimulationOptions::default()).unwrap();
        let base = decompose(&out.series);
        for c in [4.0, 0.125, 1024.0] {
            let scaled: Vec<Vec<f64>> = out
                .series
                .iter()
                .map(|x| x.iter().map(|v| v * c).collect())
                .collect();
            let dec = decompose(&scaled);
            let a = estimate_memory_lms(&base).unwrap();
            let b = estimate_memory_lms(&dec).unwrap();
            assert_eq!(a.scale_interval, b.scale_interval);
            assert_eq!(a.d_hat, b.d_hat);
            for (x, y) in base.iter().zip(&dec) {
                assert_eq!(estimate_memory_ml(x).unwrap().d, estimate_memory_ml(y).unwrap().d);
            }
        }
        let scaled: Vec<Vec<f64>> = out
            .series
            .iter()
            .map(|x| x.iter().map(|v| v * 10.0).collect())
            .collect();
        let dec = decompose(&scaled);
        let a = estimate_memory_lms(&base).unwrap();
        let b = estimate_memory_lms(&dec).unwrap();
        assert_eq!(a.scale_interval, b.scale_interval);
        for (x, y) in a.d_hat.iter().zip(&b.d_hat) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in base.iter().zip(&dec) {
            let fx = estimate_memory_ml(x).unwrap();
            let fy = estimate_memory_ml(y).unwrap();
            assert!((fx.d - fy.d).abs() <= ML_TOLERANCE);
            assert!((fy.gamma / fx.gamma - 100.0).abs() < 1e-6);
        }
    }

    #[test]
    fn ml_rejects_degenerate_input() {
        let d = dwt(&[0.0; 256], &WaveletFilter::la8(), 5).unwrap();
        assert!(matches!(estimate_memory_ml(&d), Err(Error::EstimationFailed(_))));
        let short = dwt(&[1.0, 2.0, 0.5, 0.1, 3.0, 1.0, 0.0, 2.0], &WaveletFilter::haar(), 3).unwrap();
        assert!(matches!(estimate_memory_ml(&short), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn ml_and_lms_track_memory_on_average() {
        let mut lms = 0.0;
        let mut ml = 0.0;
        let reps = 40;
        for seed in 0..reps {
            let spec = ArfimaSpec::white(&[0.3], seed).unwrap();
            let out = simulate_arfima(&spec, 4096, SimulationOptions::default()).unwrap();
            let dec = decompose(&out.series);
            lms += estimate_memory_lms(&dec).unwrap().d_hat[0];
            ml += estimate_memory_ml(&dec[0]).unwrap().d;
        }
        let (lms, ml) = (lms / reps as f64, ml / reps as f64);
        assert!((lms - 0.3).abs() <= 0.1, "LMS mean {lms}");
        assert!((ml - 0.3).abs() <= 0.1, "ML mean {ml}");
    }

    #[test]
    fn rejects_mixed_decompositions() {
        let a = dwt(&vec![1.0; 256], &WaveletFilter::la8(), 5).unwrap();
        let b = dwt(&vec![1.0; 256], &WaveletFilter::haar(), 5).unwrap();
        assert!(estimate_memory_lms(&[a.clone(), b]).is_err());
        let shallow = dwt(&vec![1.0; 256], &WaveletFilter::la8(), 3).unwrap();
        assert!(estimate_memory_lms(&[shallow]).is_err());
        assert!(estimate_memory_lms(&[]).is_err());
        let _ = a;
    }
}
