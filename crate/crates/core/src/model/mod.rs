//! Closed-form model of multivariate fractionally integrated noise.
//!
//! A q-variate FIN is `x_k = (1 - L)^{-d_k} u_k` where `u` is iid Gaussian with
//! covariance `Gamma`. Everything here is a pure function of `(d, Gamma)`.

mod quadrature;
mod spectral;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

pub(crate) use quadrature::integrate;
pub use spectral::{
    asymptotic_wavelet_covariance, beta, lm_filter_coefficients, memory_sum_factor,
    numerical_wavelet_covariance, theoretical_connectivity, theoretical_cross_sdf, upsilon,
    upsilon_grid, GridCell,
};

/// Per-series memory parameters, each strictly inside `(-1/2, 1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MemoryParams(Vec<f64>);

impl MemoryParams {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidInput("at least one memory parameter is required".into()));
        }
        for &dk in &d {
            check_stationary(dk)?;
        }
        Ok(Self(d))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for MemoryParams {
    type Error = Error;

    fn try_from(d: Vec<f64>) -> Result<Self> {
        Self::new(d)
    }
}

impl From<MemoryParams> for Vec<f64> {
    fn from(p: MemoryParams) -> Self {
        p.0
    }
}

pub(crate) fn check_stationary(d: f64) -> Result<()> {
    if d.is_finite() && d.abs() < 0.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "memory parameter d",
            value: d,
            allowed: "-0.5 < d < 0.5",
        })
    }
}

/// Covariance of the short-memory innovations.
///
/// Symmetric to 1e-12, strictly positive diagonal, and positive semidefinite
/// up to an eigenvalue tolerance of 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortMemoryCovariance(Matrix);

impl ShortMemoryCovariance {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "covariance must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("covariance has non-finite entries".into()));
        }
        let asym = matrix::asymmetry(&m);
        if asym > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "covariance is not symmetric (max deviation {asym:e})"
            )));
        }
        if let Some(k) = (0..m.nrows()).find(|&k| m[(k, k)] <= 0.0) {
            return Err(Error::DegenerateSpec(format!(
                "diagonal entry {k} is {} (must be positive)",
                m[(k, k)]
            )));
        }
        let min_eig = matrix::min_eigenvalue(&m);
        if min_eig < -1e-9 {
            return Err(Error::InvalidInput(format!(
                "covariance is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity(q: usize) -> Self {
        Self(DMatrix::identity(q, q))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Nonfractal connectivity `D`: the correlation matrix of the innovations.
    pub fn correlation(&self) -> Matrix {
        matrix::correlation_from_covariance(&self.0).expect("diagonal checked at construction")
    }
}

impl Serialize for ShortMemoryCovariance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix::to_rows(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShortMemoryCovariance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Self::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// A multivariate FIN: memory parameters plus innovation covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinSpec {
    params: MemoryParams,
    gamma: ShortMemoryCovariance,
}

impl FinSpec {
    pub fn new(params: MemoryParams, gamma: ShortMemoryCovariance) -> Result<Self> {
        if params.len() != gamma.dim() {
            return Err(Error::InvalidInput(format!(
                "{} memory parameters but a {}x{} covariance",
                params.len(),
                gamma.dim(),
                gamma.dim()
            )));
        }
        Ok(Self { params, gamma })
    }

    /// Convenience constructor for tests and examples.
    pub fn from_parts(d: &[f64], gamma_rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            MemoryParams::new(d.to_vec())?,
            ShortMemoryCovariance::from_rows(gamma_rows)?,
        )
    }

    pub fn params(&self) -> &MemoryParams {
        &self.params
    }

    pub fn d(&self) -> &[f64] {
        self.params.as_slice()
    }

    pub fn gamma(&self) -> &ShortMemoryCovariance {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub(crate) fn check_index(&self, m: usize, n: usize) -> Result<()> {
        let q = self.dim();
        if m >= q || n >= q {
            return Err(Error::InvalidInput(format!(
                "series index ({m}, {n}) out of range for q = {q}"
            )));
        }
        Ok(())
    }
}
