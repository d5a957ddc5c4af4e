//! Orthonormal discrete wavelet transform and scale-wise second moments.

mod filter;
mod stats;
mod transform;

pub use filter::{FilterKind, WaveletFilter};
pub(crate) use stats::cross_energy;
pub use stats::{wavelet_correlation, wavelet_covariance, wavelet_variance};
pub use transform::{default_levels, dwt, WaveletDecomposition};
