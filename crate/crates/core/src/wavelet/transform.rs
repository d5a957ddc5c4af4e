//! Periodic orthonormal DWT via the pyramid algorithm.

use crate::error::{Error, Result};

use super::filter::{FilterKind, WaveletFilter};

/// Default number of levels for a series of length `n`: `log2(n) - 3`, so the
/// coarsest scale keeps at least eight coefficients.
pub fn default_levels(n: usize) -> usize {
    let log2 = usize::BITS - 1 - n.max(1).leading_zeros();
    (log2 as usize).saturating_sub(3).max(1)
}

/// Wavelet and scaling coefficients of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    filter: FilterKind,
    len: usize,
    /// `details[j - 1]` holds the `N / 2^j` coefficients of scale `j`.
    details: Vec<Vec<f64>>,
    scaling: Vec<f64>,
    boundary: Vec<usize>,
}

impl WaveletDecomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Length of the original series.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn filter(&self) -> FilterKind {
        self.filter
    }

    /// Coefficients at scale `j` (1-based).
    pub fn detail(&self, j: usize) -> &[f64] {
        &self.details[j - 1]
    }

    /// Coefficients at scale `j` that are not touched by circular wraparound.
    pub fn interior_detail(&self, j: usize) -> &[f64] {
        let w = &self.details[j - 1];
        &w[..w.len() - self.boundary[j - 1]]
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    /// Number of boundary coefficients at scale `j` (1-based). They sit at the
    /// end of each coefficient vector.
    pub fn boundary(&self, j: usize) -> usize {
        self.boundary[j - 1]
    }

    /// True when both decompositions came from the same filter, level count
    /// and length, so their coefficients can be paired.
    pub fn is_compatible(&self, other: &Self) -> bool {
        self.filter == other.filter && self.len == other.len && self.levels() == other.levels()
    }

    /// Inverse pyramid: reconstructs the original series.
    pub fn reconstruct(&self) -> Vec<f64> {
        let filter = self.filter.filter();
        let mut approx = self.scaling.clone();
        for detail in self.details.iter().rev() {
            approx = synthesis_step(&filter, &approx, detail);
        }
        approx
    }
}

/// Forward pyramid algorithm with periodic boundary handling.
///
/// `W[j][t] = sum_l h[l] * V[j-1][(2t + l) mod n_{j-1}]`, and likewise for the
/// scaling coefficients with `g`.
pub fn dwt(series: &[f64], filter: &WaveletFilter, levels: usize) -> Result<WaveletDecomposition> {
    let n = series.len();
    if levels == 0 {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    if levels >= usize::BITS as usize || n >> levels == 0 {
        return Err(Error::InvalidInput(format!(
            "{levels} levels leave no coefficients for a series of length {n}"
        )));
    }
    if !n.is_multiple_of(1usize << levels) {
        return Err(Error::InvalidInput(format!(
            "series length {n} must be divisible by 2^{levels} = {}",
            1usize << levels
        )));
    }
    if let Some(t) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite value at index {t}")));
    }

    let mut details = Vec::with_capacity(levels);
    let mut boundary = Vec::with_capacity(levels);
    let mut approx = series.to_vec();
    for j in 1..=levels {
        let (w, v) = analysis_step(filter, &approx);
        boundary.push(boundary_count(n, j, filter));
        details.push(w);
        approx = v;
    }

    Ok(WaveletDecomposition {
        filter: filter.kind(),
        len: n,
        details,
        scaling: approx,
        boundary,
    })
}

/// Coefficients at scale `j` whose level-`j` equivalent filter wraps past the
/// end of a length-`n` series.
fn boundary_count(n: usize, j: usize, filter: &WaveletFilter) -> usize {
    let n_j = n >> j;
    let width = filter.equivalent_width(j);
    if width > n {
        return n_j;
    }
    let clean = (n - width) / (1usize << j) + 1;
    n_j - clean.min(n_j)
}

fn analysis_step(filter: &WaveletFilter, input: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = input.len();
    let half = m / 2;
    let mut w = vec![0.0; half];
    let mut v = vec![0.0; half];
    for t in 0..half {
        let mut acc_w = 0.0;
        let mut acc_v = 0.0;
        for (l, (&h, &g)) in filter.high().iter().zip(filter.low()).enumerate() {
            let x = input[(2 * t + l) % m];
            acc_w += h * x;
            acc_v += g * x;
        }
        w[t] = acc_w;
        v[t] = acc_v;
    }
    (w, v)
}

fn synthesis_step(filter: &WaveletFilter, approx: &[f64], detail: &[f64]) -> Vec<f64> {
    let m = 2 * approx.len();
    let mut out = vec![0.0; m];
    for (t, (&v, &w)) in approx.iter().zip(detail).enumerate() {
        for (l, (&h, &g)) in filter.high().iter().zip(filter.low()).enumerate() {
            out[(2 * t + l) % m] += h * w + g * v;
        }
    }
    out
}
