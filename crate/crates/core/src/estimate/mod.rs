//! Estimation pipeline: memory parameters, short-memory covariance, and the
//! resulting nonfractal and fractal connectivity.

mod connectivity;
mod gamma;
mod golden;
mod memory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{serialize_rows, Matrix};
use crate::wavelet::{default_levels, dwt, FilterKind, WaveletDecomposition};

pub use connectivity::{connectivity, pearson_correlation};
pub use gamma::{
    estimate_gamma, estimate_gamma_cov, estimate_gamma_lin, estimate_gamma_sdf,
    lin_gamma_from_covariances, LIN_MIN_COEFFICIENTS, MIN_PHASE_FACTOR,
};
pub use memory::{
    estimate_memory, estimate_memory_lms, estimate_memory_lms_from_variances, estimate_memory_ml,
    estimate_memory_ml_all, MemoryEstimate, MlFit, LMS_MIN_WIDTH, ML_BOUND, ML_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemoryMethod {
    Lms,
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaMethod {
    Lin,
    Cov,
    Sdf,
}

impl MemoryMethod {
    pub const ALL: [MemoryMethod; 2] = [MemoryMethod::Lms, MemoryMethod::Ml];
}

impl GammaMethod {
    pub const ALL: [GammaMethod; 3] = [GammaMethod::Lin, GammaMethod::Cov, GammaMethod::Sdf];
}

impl fmt::Display for MemoryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemoryMethod::Lms => "LMS",
            MemoryMethod::Ml => "ML",
        })
    }
}

impl fmt::Display for GammaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaMethod::Lin => "LIN",
            GammaMethod::Cov => "COV",
            GammaMethod::Sdf => "SDF",
        })
    }
}

impl FromStr for MemoryMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lms" => Ok(MemoryMethod::Lms),
            "ml" => Ok(MemoryMethod::Ml),
            _ => Err(Error::InvalidInput(format!(
                "unknown memory estimator `{s}` (expected lms or ml)"
            ))),
        }
    }
}

impl FromStr for GammaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lin" => Ok(GammaMethod::Lin),
            "cov" => Ok(GammaMethod::Cov),
            "sdf" => Ok(GammaMethod::Sdf),
            _ => Err(Error::InvalidInput(format!(
                "unknown covariance estimator `{s}` (expected lin, cov or sdf)"
            ))),
        }
    }
}

/// A memory estimator combined with a covariance estimator, written `ML-COV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EstimatorPair {
    pub memory: MemoryMethod,
    pub gamma: GammaMethod,
}

impl EstimatorPair {
    pub fn new(memory: MemoryMethod, gamma: GammaMethod) -> Self {
        Self { memory, gamma }
    }

    /// All six pairs, memory method outermost.
    pub fn all() -> Vec<EstimatorPair> {
        MemoryMethod::ALL
            .iter()
            .flat_map(|&m| GammaMethod::ALL.iter().map(move |&g| EstimatorPair::new(m, g)))
            .collect()
    }
}

impl fmt::Display for EstimatorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.memory, self.gamma)
    }
}

impl FromStr for EstimatorPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, g) = s.split_once('-').ok_or_else(|| {
            Error::InvalidInput(format!("estimator pair `{s}` must look like ML-COV"))
        })?;
        Ok(Self::new(m.parse()?, g.parse()?))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(MemoryMethod);
string_serde!(GammaMethod);
string_serde!(EstimatorPair);

/// Options for [`estimate_connectivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOptions {
    pub memory: MemoryMethod,
    pub gamma: GammaMethod,
    pub filter: FilterKind,
    /// Decomposition depth; `None` uses `log2(N) - 3`.
    pub levels: Option<usize>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            memory: MemoryMethod::Ml,
            gamma: GammaMethod::Cov,
            filter: FilterKind::La8,
            levels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityResult {
    #[serde(serialize_with = "serialize_rows")]
    pub pearson: Matrix,
    #[serde(serialize_with = "serialize_rows")]
    pub gamma_hat: Matrix,
    /// Nonfractal connectivity `D`.
    #[serde(serialize_with = "serialize_rows")]
    pub nonfractal: Matrix,
    /// Fractal connectivity `rho_inf`.
    #[serde(serialize_with = "serialize_rows")]
    pub fractal: Matrix,
    pub d_hat: Vec<f64>,
    pub memory: MemoryEstimate,
    pub gamma_method: GammaMethod,
    pub filter: FilterKind,
    pub levels: usize,
}

/// Decomposes every series with the same filter and depth.
pub fn decompose_all(
    series: &[Vec<f64>],
    filter: FilterKind,
    levels: Option<usize>,
) -> Result<Vec<WaveletDecomposition>> {
    let n = series
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("no series given".into()))?;
    if let Some(k) = series.iter().position(|s| s.len() != n) {
        return Err(Error::InvalidInput(format!(
            "series {k} has length {}, expected {n}",
            series[k].len()
        )));
    }
    let levels = levels.unwrap_or_else(|| default_levels(n));
    let filter = filter.filter();
    series
        .iter()
        .enumerate()
        .map(|(k, s)| {
            dwt(s, &filter, levels).map_err(|e| match e {
                Error::InvalidInput(msg) => Error::InvalidInput(format!("series {k}: {msg}")),
                other => other,
            })
        })
        .collect()
}

/// Full pipeline from raw series to a [`ConnectivityResult`].
pub fn estimate_connectivity(series: &[Vec<f64>], options: EstimateOptions) -> Result<ConnectivityResult> {
    let decomps = decompose_all(series, options.filter, options.levels)?;
    let memory = estimate_memory(&decomps, options.memory)?;
    let gamma_hat = estimate_gamma(&decomps, &memory.d_hat, options.gamma)?;
    let (nonfractal, fractal) = connectivity(&gamma_hat, &memory.d_hat)?;
    let pearson = pearson_correlation(series)?;
    Ok(ConnectivityResult {
        pearson,
        gamma_hat,
        nonfractal,
        fractal,
        d_hat: memory.d_hat.clone(),
        memory,
        gamma_method: options.gamma,
        filter: options.filter,
        levels: decomps[0].levels(),
    })
}
