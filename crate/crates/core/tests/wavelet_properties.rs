use fracconn::wavelet::{dwt, wavelet_covariance, FilterKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn filters() -> impl Strategy<Value = FilterKind> {
    prop_oneof![Just(FilterKind::Haar), Just(FilterKind::La8)]
}

/// Length `2^k` with enough room for `levels` octaves, plus two random series.
fn inputs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (5u32..=11).prop_flat_map(|k| {
        let n = 1usize << k;
        (
            prop::collection::vec(-1e3f64..1e3, n),
            prop::collection::vec(-1e3f64..1e3, n),
            1..=(k as usize - 3),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_and_energy((x, _, levels) in inputs(), kind in filters()) {
        let d = dwt(&x, &kind.filter(), levels).unwrap();
        let energy = dot(&x, &x);
        let kept: f64 = (1..=levels).map(|j| dot(d.detail(j), d.detail(j))).sum::<f64>() + dot(d.scaling(), d.scaling());
        prop_assert!((kept - energy).abs() <= 1e-9 * energy);
        let back = d.reconstruct();
        let err: f64 = x.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-9 * energy.sqrt());
    }

    #[test]
    fn scale_additivity((x, y, levels) in inputs(), kind in filters()) {
        let n = x.len() as f64;
        let center = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / n;
            v.iter().map(|a| a - mean).collect::<Vec<f64>>()
        };
        let (x, y) = (center(&x), center(&y));
        let filter = kind.filter();
        let (a, b) = (dwt(&x, &filter, levels).unwrap(), dwt(&y, &filter, levels).unwrap());
        let by_scale: f64 = (1..=levels).map(|j| dot(a.detail(j), b.detail(j))).sum::<f64>()
            + dot(a.scaling(), b.scaling());
        let sample_cov = dot(&x, &y) / n;
        let scale = (dot(&x, &x) * dot(&y, &y)).sqrt() / n;
        prop_assert!((by_scale / n - sample_cov).abs() <= 1e-9 * scale);
    }

    #[test]
    fn covariance_is_symmetric_and_bilinear(
        (x, y, levels) in inputs(),
        kind in filters(),
        c in -10.0f64..10.0,
        exclude in any::<bool>(),
    ) {
        let filter = kind.filter();
        let a = dwt(&x, &filter, levels).unwrap();
        let b = dwt(&y, &filter, levels).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let ca = dwt(&scaled, &filter, levels).unwrap();
        for j in 1..=levels {
            let Ok(ab) = wavelet_covariance(&a, &b, j, exclude) else { continue };
            prop_assert_eq!(ab, wavelet_covariance(&b, &a, j, exclude).unwrap());
            let cab = wavelet_covariance(&ca, &b, j, exclude).unwrap();
            let tol = 1e-9 * c.abs().max(1.0) * (dot(&x, &x) * dot(&y, &y)).sqrt() / x.len() as f64;
            prop_assert!((cab - c * ab).abs() <= tol, "j={} {} vs {}", j, cab, c * ab);
        }
    }
}

#[test]
fn white_noise_variance_is_flat_across_scales() {
    let n = 1 << 14;
    let filter = FilterKind::La8.filter();
    let levels = 10;
    let mut mean_slope = 0.0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let d = dwt(&x, &filter, levels).unwrap();
        let points: Vec<(f64, f64)> = (1..=levels)
            .map(|j| {
                let w = d.interior_detail(j);
                (j as f64, (dot(w, w) / w.len() as f64).log2())
            })
            .collect();
        let mj = points.iter().map(|p| p.0).sum::<f64>() / levels as f64;
        let my = points.iter().map(|p| p.1).sum::<f64>() / levels as f64;
        let sxy: f64 = points.iter().map(|p| (p.0 - mj) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mj).powi(2)).sum();
        mean_slope += sxy / sxx / 100.0;
    }
    assert!(mean_slope.abs() <= 0.05, "mean slope {mean_slope}");
}
