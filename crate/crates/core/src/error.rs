use thiserror::Error;

/// Errors raised anywhere in the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate scale {scale}: zero wavelet variance")]
    DegenerateScale { scale: usize },

    #[error("degenerate series {index}: {reason}")]
    DegenerateSeries { index: usize, reason: String },

    #[error("degenerate model: {0}")]
    DegenerateSpec(String),

    #[error("spectral density is singular at f = 0 when the memory sum {memory_sum} is positive")]
    Singularity { memory_sum: f64 },

    #[error("quadrature did not converge: estimated error {estimated_error:e} after {intervals} subintervals on [{lower}, {upper}]")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimated_error: f64,
        intervals: usize,
    },

    #[error("correlation {rho} is unreachable for q = {q}; admissible range is [0, {max})")]
    UnreachableCorrelation { rho: f64, q: usize, max: f64 },

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("ill-conditioned estimate for pair ({m}, {n}): {reason}")]
    IllConditioned { m: usize, n: usize, reason: String },

    #[error("numerical range error for pair ({m}, {n}): {reason}")]
    NumericalRange { m: usize, n: usize, reason: String },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// True for failures of the statistical estimators themselves, as opposed
    /// to bad input or configuration.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(
            self,
            Error::EstimationFailed(_)
                | Error::IllConditioned { .. }
                | Error::NumericalRange { .. }
                | Error::DegenerateScale { .. }
                | Error::DegenerateSeries { .. }
                | Error::Quadrature { .. }
                | Error::InsufficientData(_)
        )
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
