//! Multivariate ARFIMA(p, d, 0) simulation with known ground truth.
//!
//! Innovations `e(t)` are iid standard normal. The short memory is
//! `U = (1 - phi L)^{-1} A e` per series, and each `U_k` is passed through the
//! truncated fractional integration filter of memory `d_k`. The first
//! `burnin` samples are discarded.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::model::{lm_filter_coefficients, MemoryParams, ShortMemoryCovariance};

pub const DEFAULT_BURNIN: usize = 4096;

/// The four short-memory designs of the bias study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Independent iid innovations.
    #[serde(rename = "1A")]
    IndependentWhite,
    /// Independent AR(1) innovations with `phi = 0.9`.
    #[serde(rename = "1B")]
    IndependentAr,
    /// Correlated iid innovations through the mixing matrix `A_0(rho)`.
    #[serde(rename = "2A")]
    CorrelatedWhite,
    /// Correlated AR(1) innovations.
    #[serde(rename = "2B")]
    CorrelatedAr,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::IndependentWhite,
        Condition::IndependentAr,
        Condition::CorrelatedWhite,
        Condition::CorrelatedAr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Condition::IndependentWhite => "1A",
            Condition::IndependentAr => "1B",
            Condition::CorrelatedWhite => "2A",
            Condition::CorrelatedAr => "2B",
        }
    }

    /// Whether the condition forces correlation among series 2..q only.
    pub fn is_correlated(self) -> bool {
        matches!(self, Condition::CorrelatedWhite | Condition::CorrelatedAr)
    }

    pub fn is_autoregressive(self) -> bool {
        matches!(self, Condition::IndependentAr | Condition::CorrelatedAr)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown short-memory condition `{s}`")))
    }
}

/// AR(1) coefficient used by the autoregressive conditions.
pub const CONDITION_AR_COEFF: f64 = 0.9;

/// Mixing matrix with unit diagonal, an isolated first series and a common
/// off-diagonal weight `a` among series 2..q, chosen so the rows 2..q of
/// `A A^T` have correlation exactly `rho`.
///
/// `a` is the smaller root of `b a^2 - 2a + rho = 0` with
/// `b = rho (q - 2) - (q - 3)`, written as `rho / (1 + sqrt(1 - b rho))` so the
/// `b = 0` case needs no special branch.
pub fn build_innovation_matrix(q: usize, rho: f64) -> Result<Matrix> {
    if q < 3 {
        return Err(Error::InvalidInput(format!(
            "the correlated mixing design needs q >= 3, got {q}"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::UnreachableCorrelation { rho, q, max: 1.0 });
    }
    let qf = q as f64;
    let b = rho * (qf - 2.0) - (qf - 3.0);
    let disc = 1.0 - b * rho;
    if disc < 0.0 {
        return Err(Error::UnreachableCorrelation { rho, q, max: 1.0 });
    }
    let a = rho / (1.0 + disc.sqrt());
    Ok(DMatrix::from_fn(q, q, |i, j| {
        if i == j {
            1.0
        } else if i == 0 || j == 0 {
            0.0
        } else {
            a
        }
    }))
}

/// Mixing matrix and per-series AR(1) coefficients of a short-memory design.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortMemoryDesign {
    pub mixing: Matrix,
    pub ar: Vec<f64>,
}

pub fn short_memory_condition(
    condition: Condition,
    q: usize,
    rho: Option<f64>,
) -> Result<ShortMemoryDesign> {
    if q == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mixing = if condition.is_correlated() {
        let rho = rho.ok_or_else(|| {
            Error::InvalidInput(format!("condition {condition} requires a correlation rho"))
        })?;
        build_innovation_matrix(q, rho)?
    } else {
        DMatrix::identity(q, q)
    };
    let phi = if condition.is_autoregressive() {
        CONDITION_AR_COEFF
    } else {
        0.0
    };
    Ok(ShortMemoryDesign {
        mixing,
        ar: vec![phi; q],
    })
}

/// Covariance of `U` implied by the mixing matrix and AR(1) coefficients:
/// `Gamma_mn = (A A^T)_mn / (1 - phi_m phi_n)`.
pub fn analytic_short_memory_covariance(
    mixing: &Matrix,
    ar: &[f64],
) -> Result<ShortMemoryCovariance> {
    let q = mixing.nrows();
    if !mixing.is_square() || ar.len() != q {
        return Err(Error::InvalidInput(format!(
            "mixing matrix is {}x{} but {} AR coefficients were given",
            mixing.nrows(),
            mixing.ncols(),
            ar.len()
        )));
    }
    check_ar(ar)?;
    let aat = mixing * mixing.transpose();
    let gamma = DMatrix::from_fn(q, q, |m, n| aat[(m, n)] / (1.0 - ar[m] * ar[n]));
    ShortMemoryCovariance::new(matrix::symmetrize(&gamma))
}

fn check_ar(ar: &[f64]) -> Result<()> {
    match ar.iter().find(|phi| !(phi.abs() < 1.0)) {
        Some(&phi) => Err(Error::OutOfRange {
            what: "AR(1) coefficient",
            value: phi,
            allowed: "|phi| < 1",
        }),
        None => Ok(()),
    }
}

/// Generative description of a multivariate ARFIMA(p, d, 0), `p <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArfimaSpec {
    pub params: MemoryParams,
    /// Per-series AR(1) coefficient; zero means no autoregression.
    pub ar: Vec<f64>,
    pub mixing: Matrix,
    pub seed: u64,
}

impl ArfimaSpec {
    pub fn new(params: MemoryParams, ar: Vec<f64>, mixing: Matrix, seed: u64) -> Result<Self> {
        let q = params.len();
        if mixing.nrows() != q || mixing.ncols() != q || ar.len() != q {
            return Err(Error::InvalidInput(format!(
                "{q} memory parameters need a {q}x{q} mixing matrix and {q} AR coefficients, \
                 got {}x{} and {}",
                mixing.nrows(),
                mixing.ncols(),
                ar.len()
            )));
        }
        if mixing.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("mixing matrix has non-finite entries".into()));
        }
        check_ar(&ar)?;
        Ok(Self {
            params,
            ar,
            mixing,
            seed,
        })
    }

    /// FIN with iid standard-normal short memory, one series per entry of `d`.
    pub fn white(d: &[f64], seed: u64) -> Result<Self> {
        let q = d.len();
        Self::new(
            MemoryParams::new(d.to_vec())?,
            vec![0.0; q],
            DMatrix::identity(q, q),
            seed,
        )
    }

    /// One of the four bias-study designs with memory parameters `d`.
    pub fn from_condition(condition: Condition, d: &[f64], rho: Option<f64>, seed: u64) -> Result<Self> {
        let design = short_memory_condition(condition, d.len(), rho)?;
        Self::new(MemoryParams::new(d.to_vec())?, design.ar, design.mixing, seed)
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn short_memory_covariance(&self) -> Result<ShortMemoryCovariance> {
        analytic_short_memory_covariance(&self.mixing, &self.ar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOptions {
    pub burnin: usize,
    /// Keep the post-burn-in short memory `U(t)` for diagnostics.
    pub keep_short_memory: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            burnin: DEFAULT_BURNIN,
            keep_short_memory: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub d: Vec<f64>,
    pub gamma: ShortMemoryCovariance,
    /// Nonfractal connectivity implied by `gamma`.
    pub nonfractal: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationMeta {
    pub burnin: usize,
    pub filter_len: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    /// `series[k]` is the length-`n` path of series `k`.
    pub series: Vec<Vec<f64>>,
    pub truth: GroundTruth,
    pub meta: SimulationMeta,
    pub short_memory: Option<Vec<Vec<f64>>>,
}

/// Simulates `n` samples (a power of two) of every series in `spec`.
pub fn simulate_arfima(spec: &ArfimaSpec, n: usize, options: SimulationOptions) -> Result<SimulationOutput> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "series length {n} must be a power of two >= 2"
        )));
    }
    let q = spec.dim();
    let total = n + options.burnin;
    let gamma = spec.short_memory_covariance()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise = vec![vec![0.0; total]; q];
    for t in 0..total {
        for row in noise.iter_mut() {
            row[t] = StandardNormal.sample(&mut rng);
        }
    }

    let mut short_memory = Vec::with_capacity(q);
    for k in 0..q {
        let mut u = vec![0.0; total];
        for (i, row) in noise.iter().enumerate() {
            let a = spec.mixing[(k, i)];
            if a != 0.0 {
                for (ut, e) in u.iter_mut().zip(row) {
                    *ut += a * e;
                }
            }
        }
        let phi = spec.ar[k];
        if phi != 0.0 {
            for t in 1..total {
                u[t] += phi * u[t - 1];
            }
        }
        short_memory.push(u);
    }

    let mut planner = FftPlanner::new();
    let mut series = Vec::with_capacity(q);
    for (k, u) in short_memory.iter().enumerate() {
        let d = spec.params.as_slice()[k];
        let x = if d == 0.0 {
            u.clone()
        } else {
            let g = lm_filter_coefficients(d, total)?;
            causal_convolution(&mut planner, &g, u)
        };
        series.push(x[options.burnin..].to_vec());
    }

    let short_memory = options
        .keep_short_memory
        .then(|| short_memory.iter().map(|u| u[options.burnin..].to_vec()).collect());

    Ok(SimulationOutput {
        series,
        truth: GroundTruth {
            d: spec.params.as_slice().to_vec(),
            nonfractal: gamma.correlation(),
            gamma,
        },
        meta: SimulationMeta {
            burnin: options.burnin,
            filter_len: total,
            seed: spec.seed,
        },
        short_memory,
    })
}

/// First `x.len()` samples of the linear convolution `g * x`, by zero-padded FFT.
fn causal_convolution(planner: &mut FftPlanner<f64>, g: &[f64], x: &[f64]) -> Vec<f64> {
    let len = x.len();
    let size = (2 * len).next_power_of_two();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let pad = |v: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); size];
        for (b, &s) in buf.iter_mut().zip(v) {
            b.re = s;
        }
        buf
    };
    let mut gf = pad(g);
    let mut xf = pad(x);
    forward.process(&mut gf);
    forward.process(&mut xf);
    for (a, b) in xf.iter_mut().zip(&gf) {
        *a *= b;
    }
    inverse.process(&mut xf);
    let norm = 1.0 / size as f64;
    xf[..len].iter().map(|c| c.re * norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_convolution(g: &[f64], x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|t| (0..=t).map(|tau| g[tau] * x[t - tau]).sum())
            .collect()
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let g = lm_filter_coefficients(0.3, 300).unwrap();
        let x: Vec<f64> = (0..300).map(|t| ((t * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let mut planner = FftPlanner::new();
        let fast = causal_convolution(&mut planner, &g, &x);
        let slow = direct_convolution(&g, &x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn innovation_matrix_reference_values() {
        let a = build_innovation_matrix(4, 0.0).unwrap();
        assert_eq!(a, DMatrix::identity(4, 4));

        let a = build_innovation_matrix(4, 0.3).unwrap();
        assert!((a[(1, 2)] - 0.14575).abs() < 1e-5);
        for (q, rho) in [(4, 0.3), (8, 0.8), (16, 0.8), (5, 0.5), (3, 0.9)] {
            let a = build_innovation_matrix(q, rho).unwrap();
            let cov = &a * a.transpose();
            let corr = matrix::correlation_from_covariance(&cov).unwrap();
            for i in 1..q {
                assert_eq!(corr[(0, i)], 0.0);
                for j in 1..q {
                    if i != j {
                        assert!((corr[(i, j)] - rho).abs() < 1e-10, "q={q} rho={rho}");
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_quadratic_uses_linear_root() {
        // b = 0 when rho = (q - 3) / (q - 2)
        let a = build_innovation_matrix(5, 2.0 / 3.0).unwrap();
        assert!((a[(1, 2)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn innovation_matrix_rejects_bad_input() {
        assert!(build_innovation_matrix(2, 0.3).is_err());
        assert!(matches!(
            build_innovation_matrix(4, 1.0),
            Err(Error::UnreachableCorrelation { .. })
        ));
        assert!(build_innovation_matrix(4, -0.1).is_err());
    }

    #[test]
    fn conditions_follow_the_design_list() {
        let c = short_memory_condition(Condition::IndependentWhite, 4, None).unwrap();
        assert_eq!(c.mixing, DMatrix::identity(4, 4));
        assert!(c.ar.iter().all(|&p| p == 0.0));

        let c = short_memory_condition(Condition::IndependentAr, 4, None).unwrap();
        assert!(c.ar.iter().all(|&p| p == 0.9));

        let c = short_memory_condition(Condition::CorrelatedWhite, 4, Some(0.3)).unwrap();
        assert_eq!(c.mixing, build_innovation_matrix(4, 0.3).unwrap());
        assert!(c.ar.iter().all(|&p| p == 0.0));

        assert!(short_memory_condition(Condition::CorrelatedAr, 4, None).is_err());
        assert!("3C".parse::<Condition>().is_err());
        assert_eq!("2b".parse::<Condition>().unwrap(), Condition::CorrelatedAr);
    }

    #[test]
    fn analytic_covariance() {
        let ident = DMatrix::identity(3, 3);
        let g = analytic_short_memory_covariance(&ident, &[0.0; 3]).unwrap();
        assert_eq!(g.matrix(), &ident);

        let g = analytic_short_memory_covariance(&ident, &[0.9; 3]).unwrap();
        assert!((g.matrix()[(0, 0)] - 1.0 / 0.19).abs() < 1e-12);
        assert_eq!(g.matrix()[(0, 1)], 0.0);

        let design = short_memory_condition(Condition::CorrelatedWhite, 4, Some(0.3)).unwrap();
        let g = analytic_short_memory_covariance(&design.mixing, &design.ar).unwrap();
        let d = g.correlation();
        assert!((d[(1, 3)] - 0.3).abs() < 1e-12);
        assert_eq!(d[(0, 2)], 0.0);

        assert!(analytic_short_memory_covariance(&ident, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn ar1_variance_matches_long_run_sample() {
        let spec = ArfimaSpec::new(
            MemoryParams::new(vec![0.0]).unwrap(),
            vec![0.9],
            DMatrix::identity(1, 1),
            5,
        )
        .unwrap();
        let out = simulate_arfima(&spec, 1 << 17, SimulationOptions::default()).unwrap();
        let x = &out.series[0];
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((var / (1.0 / 0.19) - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn white_noise_output_is_iid_identity() {
        let spec = ArfimaSpec::white(&[0.0; 3], 11).unwrap();
        let out = simulate_arfima(&spec, 1 << 14, SimulationOptions::default()).unwrap();
        let n = out.series[0].len() as f64;
        for i in 0..3 {
            for j in 0..3 {
                let c: f64 = out.series[i]
                    .iter()
                    .zip(&out.series[j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / n;
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((c - expect).abs() < 0.05, "({i},{j}) {c}");
            }
        }
    }

    #[test]
    fn simulation_is_deterministic_per_seed() {
        let spec = ArfimaSpec::from_condition(Condition::CorrelatedAr, &[0.1, -0.3, 0.3, 0.2], Some(0.3), 9)
            .unwrap();
        let a = simulate_arfima(&spec, 512, SimulationOptions::default()).unwrap();
        let b = simulate_arfima(&spec, 512, SimulationOptions::default()).unwrap();
        assert_eq!(a, b);
        let other = ArfimaSpec { seed: 10, ..spec };
        let c = simulate_arfima(&other, 512, SimulationOptions::default()).unwrap();
        assert_ne!(a.series, c.series);
    }

    #[test]
    fn permuting_series_permutes_rows() {
        let d = [0.1, -0.3, 0.25, 0.4];
        let spec = ArfimaSpec::from_condition(Condition::CorrelatedAr, &d, Some(0.5), 3).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted = ArfimaSpec::new(
            MemoryParams::new(perm.iter().map(|&k| d[k]).collect()).unwrap(),
            perm.iter().map(|&k| spec.ar[k]).collect(),
            DMatrix::from_fn(4, 4, |i, j| spec.mixing[(perm[i], j)]),
            3,
        )
        .unwrap();
        let a = simulate_arfima(&spec, 256, SimulationOptions::default()).unwrap();
        let b = simulate_arfima(&permuted, 256, SimulationOptions::default()).unwrap();
        for (i, &k) in perm.iter().enumerate() {
            assert_eq!(b.series[i], a.series[k]);
        }
    }

    fn short_memory_error(condition: Condition, seed: u64) -> f64 {
        let spec = ArfimaSpec::from_condition(condition, &[0.1, 0.2, -0.1, 0.3], Some(0.3), seed).unwrap();
        let options = SimulationOptions {
            keep_short_memory: true,
            ..Default::default()
        };
        let out = simulate_arfima(&spec, 1 << 16, options).unwrap();
        let u = out.short_memory.unwrap();
        let n = u[0].len() as f64;
        let sample = DMatrix::from_fn(4, 4, |i, j| {
            u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum::<f64>() / n
        });
        let truth = out.truth.gamma.matrix();
        (&sample - truth).norm() / truth.norm()
    }

    #[test]
    fn short_memory_sample_covariance_converges() {
        let rel = short_memory_error(Condition::CorrelatedWhite, 21);
        assert!(rel < 0.02, "relative Frobenius error {rel}");
        // AR(1) at phi = 0.9 has ~10x fewer effective samples
        let rel = short_memory_error(Condition::CorrelatedAr, 21);
        assert!(rel < 0.05, "relative Frobenius error {rel}");
    }

    #[test]
    fn rejects_bad_lengths_and_memory() {
        let spec = ArfimaSpec::white(&[0.1], 1).unwrap();
        assert!(simulate_arfima(&spec, 1000, SimulationOptions::default()).is_err());
        assert!(ArfimaSpec::white(&[0.6], 1).is_err());
    }
}
