use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Daubechies least-asymmetric scaling filter of width 8.
const LA8_SCALING: [f64; 8] = [
    -0.07576571478950221,
    -0.029635527646002493,
    0.497618667632775,
    0.8037387518051321,
    0.29785779560530606,
    -0.09921954357663353,
    -0.012603967262031304,
    0.032223100604051466,
];

/// Named orthonormal wavelet families shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Haar,
    #[default]
    La8,
}

impl FilterKind {
    pub fn filter(self) -> WaveletFilter {
        match self {
            FilterKind::Haar => WaveletFilter::haar(),
            FilterKind::La8 => WaveletFilter::la8(),
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Haar => f.write_str("haar"),
            FilterKind::La8 => f.write_str("la8"),
        }
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(FilterKind::Haar),
            "la8" => Ok(FilterKind::La8),
            other => Err(Error::InvalidInput(format!(
                "unknown wavelet filter `{other}` (expected haar or la8)"
            ))),
        }
    }
}

/// An orthonormal quadrature-mirror filter pair.
///
/// `low` is the scaling filter and `high` the wavelet filter, related by
/// `high[l] = (-1)^l * low[L - 1 - l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    kind: FilterKind,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl WaveletFilter {
    pub fn haar() -> Self {
        let v = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_scaling(FilterKind::Haar, vec![v, v])
    }

    pub fn la8() -> Self {
        Self::from_scaling(FilterKind::La8, LA8_SCALING.to_vec())
    }

    fn from_scaling(kind: FilterKind, low: Vec<f64>) -> Self {
        let width = low.len();
        let high = (0..width)
            .map(|l| {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                sign * low[width - 1 - l]
            })
            .collect();
        Self { kind, low, high }
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    /// Filter width `L`.
    pub fn width(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    /// Width of the equivalent level-`j` wavelet filter, `(2^j - 1)(L - 1) + 1`.
    pub fn equivalent_width(&self, level: usize) -> usize {
        ((1usize << level) - 1) * (self.width() - 1) + 1
    }
}
