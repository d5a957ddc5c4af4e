//! Fractal and nonfractal connectivity of multivariate long-memory time series.
//!
//! The crate models each channel as fractionally integrated noise,
//! `x_k = (1 - L)^{-d_k} u_k`, and estimates from wavelet coefficients:
//!
//! * the memory parameters `d` ([`estimate::estimate_memory_lms`],
//!   [`estimate::estimate_memory_ml`]),
//! * the innovation covariance `Gamma` ([`estimate::estimate_gamma`]),
//! * the nonfractal connectivity `D` (correlation of the innovations) and the
//!   fractal connectivity `rho_inf = D * Upsilon(d_m, d_n)`.
//!
//! [`simulate`] generates multivariate ARFIMA(p, d, 0) paths with known truth
//! and [`montecarlo`] scores estimator bias over seeded replicates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimate;
pub mod matrix;
pub mod model;
pub mod montecarlo;
pub mod simulate;
pub mod wavelet;

pub use error::{Error, Result};
