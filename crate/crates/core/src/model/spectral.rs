use std::f64::consts::{LN_2, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

use super::{check_stationary, integrate, FinSpec};

/// Impulse response of the fractional integration filter `(1 - L)^{-d}`,
/// `g[t] = Gamma(t + d) / (Gamma(d) Gamma(t + 1))`, via `g[t] = g[t-1] (t - 1 + d) / t`.
pub fn lm_filter_coefficients(d: f64, len: usize) -> Result<Vec<f64>> {
    check_stationary(d)?;
    if len == 0 {
        return Err(Error::InvalidInput("filter length must be at least 1".into()));
    }
    let mut g = Vec::with_capacity(len);
    g.push(1.0);
    for t in 1..len {
        let prev = g[t - 1];
        g.push(prev * (t as f64 - 1.0 + d) / t as f64);
    }
    Ok(g)
}

/// `B(s) = (1 - 2^{s-1}) / (1 - s)`, continuous through its removable
/// singularity at `s = 1` where it equals `ln 2`.
pub fn memory_sum_factor(s: f64) -> f64 {
    let u = 1.0 - s;
    if u.abs() < 1e-6 {
        LN_2 * (1.0 - 0.5 * u * LN_2)
    } else {
        -((s - 1.0) * LN_2).exp_m1() / u
    }
}

/// Scale constant of the asymptotic wavelet covariance,
/// `2 cos(pi (dm - dn) / 2) B(dm + dn) (2 pi)^{-(dm + dn)}`.
pub fn beta(dm: f64, dn: f64) -> f64 {
    let s = dm + dn;
    2.0 * (0.5 * PI * (dm - dn)).cos() * memory_sum_factor(s) * TAU.powf(-s)
}

/// Ratio of fractal to nonfractal connectivity for a pair of memory
/// parameters. Symmetric, equal to one on the diagonal.
pub fn upsilon(dm: f64, dn: f64) -> f64 {
    if dm == dn {
        return 1.0;
    }
    let (lo, hi) = if dm < dn { (dm, dn) } else { (dn, dm) };
    beta(lo, hi) / (beta(lo, lo) * beta(hi, hi)).sqrt()
}

/// `(1 - e^{if})^{-dm} (1 - e^{-if})^{-dn}` on the principal branch.
fn fin_transfer(dm: f64, dn: f64, f: f64) -> Complex64 {
    let z = Complex64::new(1.0, 0.0) - Complex64::new(0.0, f).exp();
    z.powf(-dm) * z.conj().powf(-dn)
}

/// Cross-spectral density `S_mn(f) = gamma_mn (1 - e^{if})^{-dm} (1 - e^{-if})^{-dn}`.
pub fn theoretical_cross_sdf(spec: &FinSpec, m: usize, n: usize, f: f64) -> Result<Complex64> {
    spec.check_index(m, n)?;
    if !f.is_finite() || f.abs() > PI {
        return Err(Error::OutOfRange {
            what: "angular frequency",
            value: f,
            allowed: "-pi <= f <= pi",
        });
    }
    let (dm, dn) = (spec.d()[m], spec.d()[n]);
    let gamma = spec.gamma().matrix()[(m, n)];
    if f == 0.0 {
        let s = dm + dn;
        return if dm == 0.0 && dn == 0.0 {
            Ok(Complex64::new(gamma, 0.0))
        } else if s < 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Singularity { memory_sum: s })
        };
    }
    Ok(gamma * fin_transfer(dm, dn, f))
}

/// Large-scale approximation `gamma_mn beta_mn 2^{j (dm + dn)}`.
pub fn asymptotic_wavelet_covariance(spec: &FinSpec, m: usize, n: usize, j: usize) -> Result<f64> {
    spec.check_index(m, n)?;
    check_scale(j)?;
    let (dm, dn) = (spec.d()[m], spec.d()[n]);
    let gamma = spec.gamma().matrix()[(m, n)];
    Ok(gamma * beta(dm, dn) * (j as f64 * (dm + dn)).exp2())
}

/// Wavelet covariance at scale `j` from adaptive quadrature of the cross
/// spectrum against an ideal octave band-pass of gain `2^j` on
/// `pi / 2^j <= |f| <= 2 pi / 2^j`.
///
/// The band has total measure `2 pi / 2^j`, so unit white noise gives exactly 1.
pub fn numerical_wavelet_covariance(spec: &FinSpec, m: usize, n: usize, j: usize) -> Result<f64> {
    spec.check_index(m, n)?;
    check_scale(j)?;
    let (dm, dn) = (spec.d()[m], spec.d()[n]);
    let gamma = spec.gamma().matrix()[(m, n)];
    let scale = (j as f64).exp2();
    let lower = PI / scale;
    let upper = TAU / scale;
    // Re S is even in f, so integrate the positive half and double it.
    let half = integrate(|f| fin_transfer(dm, dn, f).re, lower, upper, 1e-15, 1e-12, 400)?;
    Ok(gamma * 2.0 * scale * half / TAU)
}

fn check_scale(j: usize) -> Result<()> {
    if j == 0 || j > 60 {
        return Err(Error::InvalidInput(format!("scale {j} outside 1..=60")));
    }
    Ok(())
}

/// Theoretical nonfractal connectivity `D` and fractal connectivity
/// `rho_inf = D * Upsilon(d_m, d_n)`.
pub fn theoretical_connectivity(spec: &FinSpec) -> Result<(Matrix, Matrix)> {
    let d_mat = matrix::correlation_from_covariance(spec.gamma().matrix())
        .map_err(|e| Error::DegenerateSpec(e.to_string()))?;
    let d = spec.d();
    let q = spec.dim();
    let rho_inf = DMatrix::from_fn(q, q, |i, k| {
        if i == k {
            1.0
        } else {
            d_mat[(i, k)] * upsilon(d[i], d[k])
        }
    });
    Ok((d_mat, rho_inf))
}

/// One cell of the Upsilon surface, indexed by Hurst exponents `H = d + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub h1: f64,
    pub h2: f64,
    pub upsilon: f64,
}

/// Upsilon over a square grid of Hurst exponents from `h_min` to `h_max`
/// inclusive with spacing `step`. Row-major in `h1`.
pub fn upsilon_grid(h_min: f64, h_max: f64, step: f64) -> Result<Vec<GridCell>> {
    if !(step > 0.0) || !(h_min < h_max) || h_min <= 0.0 || h_max >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "grid [{h_min}, {h_max}] with step {step} must lie inside (0, 1)"
        )));
    }
    let count = ((h_max - h_min) / step).round() as usize + 1;
    let hs: Vec<f64> = (0..count).map(|i| h_min + i as f64 * step).collect();
    let mut cells = Vec::with_capacity(count * count);
    for &h1 in &hs {
        for &h2 in &hs {
            cells.push(GridCell {
                h1,
                h2,
                upsilon: upsilon(h1 - 0.5, h2 - 0.5),
            });
        }
    }
    Ok(cells)
}
