/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[lower, upper]`.
///
/// A uniform scan over `scan_points` nodes first brackets the best node, which
/// guards against secondary minima; golden-section search then shrinks the
/// bracket until it is narrower than `tolerance`. Returns the bracket midpoint.
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    tolerance: f64,
    scan_points: usize,
) -> f64 {
    let (mut a, mut b) = (lower, upper);
    if scan_points >= 3 {
        let step = (upper - lower) / (scan_points - 1) as f64;
        let best = (0..scan_points)
            .map(|i| (i, f(lower + i as f64 * step)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        a = lower + best.saturating_sub(1) as f64 * step;
        b = (lower + (best + 1) as f64 * step).min(upper);
    }

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
