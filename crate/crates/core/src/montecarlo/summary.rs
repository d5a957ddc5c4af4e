use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box-plot statistics of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    /// Smallest sample not below `q1 - 1.5 iqr`.
    pub lower_whisker: f64,
    /// Largest sample not above `q3 + 1.5 iqr`.
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (divisor `n - 1`; zero for a single sample).
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
}

/// Linear-interpolation quantile (type 7) of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(samples: &[f64]) -> Result<BoxSummary> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("cannot summarize an empty sample".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("sample contains non-finite values".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|&v| v >= lo_fence && v <= hi_fence);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let stdev = if sorted.len() > 1 {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BoxSummary {
        count: sorted.len(),
        median: quantile_sorted(&sorted, 0.5),
        q1,
        q3,
        iqr,
        lower_whisker: inside().next().unwrap_or(q1),
        upper_whisker: inside().next_back().unwrap_or(q3),
        outliers: sorted
            .iter()
            .copied()
            .filter(|&v| v < lo_fence || v > hi_fence)
            .collect(),
        mean,
        stdev,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}
