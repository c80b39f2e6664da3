//! Least-squares helpers for the rate regressions used throughout the
//! diagnostics: decay exponents are measured as log-log slopes, logarithmic
//! growth as a slope against `ln N`.

/// Slope of the least-squares line through `(x_i, y_i)`.
///
/// Returns `None` when fewer than two distinct abscissae are supplied.
pub fn linear_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Slope of `log10 y` against `log10 x`, i.e. the fitted power-law exponent.
///
/// Points with non-positive `x` or `y` are skipped; `None` when fewer than
/// two usable points remain.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    linear_slope(&logs)
}

/// `max - min` of a sequence of values; 0 for empty input.
pub fn oscillation(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Geometric (log-uniform) grid with `n` points from `a` to `b` inclusive;
/// the endpoints are exact.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let la = a.ln();
    let lb = b.ln();
    let mut out: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    out[0] = a;
    out[n - 1] = b;
    out
}

/// Uniform grid with `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn slope_of_exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        assert_relative_eq!(linear_slope(&pts).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, (i as f64).powf(-1.5))).collect();
        assert_relative_eq!(log_log_slope(&pts).unwrap(), -1.5, epsilon = 1e-10);
    }

    #[test]
    fn oscillation_of_constant_is_zero() {
        assert_eq!(oscillation(&[2.0, 2.0, 2.0]), 0.0);
    }

    #[test]
    fn geomspace_endpoints() {
        let g = geomspace(1.0, 100.0, 9);
        assert_relative_eq!(g[0], 1.0);
        assert_relative_eq!(g[8], 100.0, epsilon = 1e-12);
        assert_relative_eq!(g[4], 10.0, epsilon = 1e-12);
    }
}
