//! Small numerical routines shared across the engine: quadrature, quantiles,
//! least squares and Gaussian helpers.

use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").cdf(x)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n-1 denominator.
pub(crate) fn sample_sd(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Standard error of the sample mean.
pub(crate) fn standard_error(values: &[f64], mean: f64) -> f64 {
    sample_sd(values, mean) / (values.len() as f64).sqrt()
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (interior + 0.5 * (values[0] + values[values.len() - 1]))
}

/// Linear-interpolation percentile of an ascending slice, `p` in [0, 100].
pub(crate) fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = rank - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Silverman's rule-of-thumb bandwidth for a Gaussian kernel.
///
/// Returns 0 for degenerate samples (fewer than two distinct values), which
/// callers treat as a point mass.
pub(crate) fn silverman_bandwidth(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let sd = sample_sd(values, m);
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let iqr = percentile(&sorted, 75.0) - percentile(&sorted, 25.0);
    let spread = if iqr > 0.0 {
        sd.min(iqr / 1.34)
    } else {
        sd
    };
    0.9 * spread * (values.len() as f64).powf(-0.2)
}

/// Format with a fixed number of significant digits in plain decimal notation.
pub fn format_significant(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits as usize - 1, 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to a relative tolerance.
///
/// Returns `None` when the recursion exhausts its depth budget without the
/// error estimate settling. Intervals narrower than ~1e-13 of the initial
/// range are accepted as-is so that jump discontinuities terminate.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = simpson(lo, hi, fa, fm, fb);
    let scale = whole.abs().max(1e-30);
    let min_width = (hi - lo) * 1e-13;
    simpson_recurse(f, lo, m, hi, fa, fm, fb, whole, rel_tol * scale, min_width, 60)
        .map(|v| sign * v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    min_width: f64,
    depth: u32,
) -> Option<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < min_width {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, min_width, depth - 1)?;
    let r = simpson_recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, min_width, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let xs: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64 / 10.0).collect();
        assert_relative_eq!(trapezoid(&xs, 0.2), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(percentile(&v, 0.0), 1.0);
        assert_relative_eq!(percentile(&v, 100.0), 4.0);
        assert_relative_eq!(percentile(&v, 50.0), 2.5);
    }

    #[test]
    fn ols_slope_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.6 * x).collect();
        assert_relative_eq!(ols_slope(&xs, &ys), -0.6, max_relative = 1e-12);
    }

    #[test]
    fn simpson_handles_smooth_and_jump_integrands() {
        let smooth = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(smooth, 1.0f64.exp() - 1.0, max_relative = 1e-10);

        // step at sqrt(2)/2: integral over [0,1] is 1 - sqrt(2)/2
        let jump = adaptive_simpson(
            &|x: f64| if x > std::f64::consts::FRAC_1_SQRT_2 { 1.0 } else { 0.0 },
            0.0,
            1.0,
            1e-10,
        )
        .unwrap();
        assert_relative_eq!(jump, 1.0 - std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.92261538461, 10), "0.9226153846");
        assert_eq!(format_significant(1.5, 10), "1.500000000");
        assert_eq!(format_significant(0.0, 10), "0.000000000");
        assert_eq!(format_significant(-0.25, 10), "-0.2500000000");
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert_relative_eq!(normal_cdf(0.0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(normal_cdf(1.959963984540054), 0.975, max_relative = 1e-9);
    }
}
