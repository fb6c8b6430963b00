//! Exact simulation of fractional Brownian motion increments on a uniform grid.
//!
//! Two exact samplers are provided. The default is circulant embedding of the
//! stationary increment autocovariance: eigenvalues of the length-2n circulant
//! are computed once per grid with an FFT, after which each path costs one
//! inverse FFT. A dense Cholesky factorization of the increment covariance is
//! kept as an independent cross-check for moderate grid sizes. Both draw their
//! Gaussians from [`RngStream`] substreams, so paths are reproducible under
//! any degree of parallelism.
//!
//! fBm also admits a moving-average (Volterra kernel) representation against
//! an ordinary Wiener process; the samplers here work directly from the
//! increment covariance instead, which is exact and cheaper on a fixed grid.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand_chacha::ChaCha12Rng;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use thiserror::Error;

use crate::rng::{fill_standard_normal, RngStream};

/// Largest grid accepted by the Cholesky sampler; setup is O(n^3).
pub const DEFAULT_CHOLESKY_CAP: usize = 4096;

/// Eigenvalues of the embedding below `-TOL_EIG_REL * max_eigenvalue` signal
/// a bug rather than rounding noise; values in `[-tol, 0)` are clipped to 0.
pub const TOL_EIG_REL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FbmError {
    #[error("hurst index must lie in [0.5, 1), got {0}")]
    InvalidHurst(f64),
    #[error("time arguments must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("horizon must be positive, got {0}")]
    InvalidHorizon(f64),
    #[error("grid must have at least one step")]
    EmptyGrid,
    #[error("circulant embedding not PSD: eigenvalue {eigenvalue:e} below tolerance -{tolerance:e}")]
    EmbeddingNotPsd { eigenvalue: f64, tolerance: f64 },
    #[error("cholesky sampler supports at most {cap} steps, requested {requested}")]
    CholeskyCapExceeded { requested: usize, cap: usize },
    #[error("increment covariance is not positive definite")]
    CovarianceNotPd,
}

/// Which exact sampler generates the increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMethod {
    Circulant,
    Cholesky,
}

/// Sampled fBm increments on the uniform grid `t_j = j * horizon / n_steps`.
///
/// Cumulative sums of `increments` give the path values with `B(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmGrid {
    pub hurst: f64,
    pub n_steps: usize,
    pub horizon: f64,
    pub increments: Vec<f64>,
}

impl FbmGrid {
    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    /// Path values at the n+1 grid times, starting from zero.
    pub fn path(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_steps + 1);
        let mut acc = 0.0;
        out.push(acc);
        for inc in &self.increments {
            acc += inc;
            out.push(acc);
        }
        out
    }
}

fn check_hurst(hurst: f64) -> Result<(), FbmError> {
    if !(0.5..1.0).contains(&hurst) {
        return Err(FbmError::InvalidHurst(hurst));
    }
    Ok(())
}

fn check_grid(n_steps: usize, horizon: f64) -> Result<(), FbmError> {
    if n_steps == 0 {
        return Err(FbmError::EmptyGrid);
    }
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(FbmError::InvalidHorizon(horizon));
    }
    Ok(())
}

/// fBm covariance `E[B_s B_t] = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_cov(s: f64, t: f64, hurst: f64) -> Result<f64, FbmError> {
    check_hurst(hurst)?;
    if s < 0.0 {
        return Err(FbmError::NegativeTime(s));
    }
    if t < 0.0 {
        return Err(FbmError::NegativeTime(t));
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2)))
}

/// Autocovariance of the fBm increment sequence (fractional Gaussian noise)
/// at the given lag: `(dt^{2H} / 2) ((k+1)^{2H} - 2 k^{2H} + |k-1|^{2H})`.
pub fn fgn_autocov(hurst: f64, dt: f64, lag: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = lag as f64;
    0.5 * dt.powf(h2) * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Eigenvalues of the length-2n circulant embedding of the increment
/// autocovariance. All eigenvalues must be nonnegative up to rounding; the
/// embedding of fBm increments is PSD for the supported Hurst range, so
/// anything below `-TOL_EIG_REL * max` is reported as an error.
pub fn circulant_spectrum(hurst: f64, n_steps: usize, dt: f64) -> Result<Vec<f64>, FbmError> {
    check_hurst(hurst)?;
    if n_steps == 0 {
        return Err(FbmError::EmptyGrid);
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(FbmError::InvalidHorizon(dt));
    }
    let m = 2 * n_steps;
    let mut buf: Vec<Complex<f64>> = (0..m)
        .map(|j| Complex::new(fgn_autocov(hurst, dt, j.min(m - j)), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut buf, &mut scratch);

    let eigs: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
    let tol = TOL_EIG_REL * max;
    if let Some(&min) = eigs
        .iter()
        .filter(|e| **e < -tol)
        .min_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"))
    {
        return Err(FbmError::EmbeddingNotPsd {
            eigenvalue: min,
            tolerance: tol,
        });
    }
    Ok(eigs)
}

/// FFT-based exact sampler (Davies-Harte style circulant embedding).
pub struct CirculantSampler {
    hurst: f64,
    n_steps: usize,
    horizon: f64,
    /// sqrt(lambda_j / m), negatives inside tolerance clipped to zero.
    weights: Vec<f64>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl CirculantSampler {
    pub fn new(hurst: f64, n_steps: usize, horizon: f64) -> Result<Self, FbmError> {
        check_grid(n_steps, horizon)?;
        let dt = horizon / n_steps as f64;
        let eigs = circulant_spectrum(hurst, n_steps, dt)?;
        let m = eigs.len();
        let weights = eigs
            .iter()
            .map(|&e| (e.max(0.0) / m as f64).sqrt())
            .collect();
        let mut planner = FftPlanner::new();
        let fft_inverse = planner.plan_fft_inverse(m);
        Ok(Self {
            hurst,
            n_steps,
            horizon,
            weights,
            fft_inverse,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of standard normal draws consumed per path.
    pub fn draws_per_path(&self) -> usize {
        2 * self.n_steps
    }

    /// Sample one increment vector, consuming exactly `2 * n_steps` normals.
    pub fn sample_from(&self, rng: &mut ChaCha12Rng) -> FbmGrid {
        let m = self.weights.len();
        let half = m / 2;
        let mut z = vec![0.0; m];
        fill_standard_normal(rng, &mut z);

        // Hermitian-symmetric Gaussian spectrum: real components at frequencies
        // 0 and m/2, complex pairs elsewhere, unit variance per component.
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut buf = vec![Complex::default(); m];
        buf[0] = Complex::new(self.weights[0] * z[0], 0.0);
        buf[half] = Complex::new(self.weights[half] * z[m - 1], 0.0);
        for j in 1..half {
            let re = z[2 * j - 1] * inv_sqrt2;
            let im = z[2 * j] * inv_sqrt2;
            buf[j] = Complex::new(self.weights[j] * re, self.weights[j] * im);
            buf[m - j] = Complex::new(self.weights[m - j] * re, -(self.weights[m - j] * im));
        }

        let mut scratch = vec![Complex::default(); self.fft_inverse.get_inplace_scratch_len()];
        self.fft_inverse.process_with_scratch(&mut buf, &mut scratch);

        let increments = buf[..self.n_steps].iter().map(|c| c.re).collect();
        FbmGrid {
            hurst: self.hurst,
            n_steps: self.n_steps,
            horizon: self.horizon,
            increments,
        }
    }

    pub fn sample(&self, stream: RngStream) -> FbmGrid {
        self.sample_from(&mut stream.rng())
    }
}

/// Dense Cholesky sampler, exact for any grid but O(n^3) to set up.
#[derive(Debug)]
pub struct CholeskySampler {
    hurst: f64,
    n_steps: usize,
    horizon: f64,
    lower: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(hurst: f64, n_steps: usize, horizon: f64) -> Result<Self, FbmError> {
        Self::with_cap(hurst, n_steps, horizon, DEFAULT_CHOLESKY_CAP)
    }

    pub fn with_cap(hurst: f64, n_steps: usize, horizon: f64, cap: usize) -> Result<Self, FbmError> {
        check_hurst(hurst)?;
        check_grid(n_steps, horizon)?;
        if n_steps > cap {
            return Err(FbmError::CholeskyCapExceeded {
                requested: n_steps,
                cap,
            });
        }
        let dt = horizon / n_steps as f64;
        let cov = DMatrix::from_fn(n_steps, n_steps, |i, j| {
            fgn_autocov(hurst, dt, i.abs_diff(j))
        });
        let lower = cov
            .cholesky()
            .ok_or(FbmError::CovarianceNotPd)?
            .unpack();
        Ok(Self {
            hurst,
            n_steps,
            horizon,
            lower,
        })
    }

    /// Sample one increment vector, consuming exactly `n_steps` normals.
    pub fn sample_from(&self, rng: &mut ChaCha12Rng) -> FbmGrid {
        let n = self.n_steps;
        let mut z = vec![0.0; n];
        fill_standard_normal(rng, &mut z);
        let mut increments = vec![0.0; n];
        // column-wise accumulation matches nalgebra's storage order
        for (j, &zj) in z.iter().enumerate() {
            for (i, inc) in increments.iter_mut().enumerate().skip(j) {
                *inc += self.lower[(i, j)] * zj;
            }
        }
        FbmGrid {
            hurst: self.hurst,
            n_steps: n,
            horizon: self.horizon,
            increments,
        }
    }

    pub fn sample(&self, stream: RngStream) -> FbmGrid {
        self.sample_from(&mut stream.rng())
    }
}

/// One-shot sampling entry point; builds the requested sampler and draws once.
///
/// Deterministic given `(hurst, n_steps, horizon, stream, method)`. Callers
/// generating many paths should construct the sampler once and reuse it.
pub fn sample_fbm_increments(
    hurst: f64,
    n_steps: usize,
    horizon: f64,
    stream: RngStream,
    method: SamplerMethod,
) -> Result<FbmGrid, FbmError> {
    match method {
        SamplerMethod::Circulant => Ok(CirculantSampler::new(hurst, n_steps, horizon)?.sample(stream)),
        SamplerMethod::Cholesky => Ok(CholeskySampler::new(hurst, n_steps, horizon)?.sample(stream)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cov_matches_brownian_motion_at_half() {
        assert_relative_eq!(fbm_cov(1.0, 1.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(fbm_cov(1.0, 2.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(fbm_cov(0.3, 0.7, 0.5).unwrap(), 0.3, max_relative = 1e-14);
    }

    #[test]
    fn cov_hand_value_at_three_quarters() {
        // (1 + 2^1.5 - 1) / 2 = sqrt(2)
        assert_relative_eq!(
            fbm_cov(1.0, 2.0, 0.75).unwrap(),
            std::f64::consts::SQRT_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cov_is_symmetric_and_diagonal_is_t_pow_2h() {
        for &h in &[0.5, 0.6, 0.75, 0.9] {
            for &(s, t) in &[(0.2, 1.4), (0.9, 0.9), (0.0, 2.0)] {
                let a = fbm_cov(s, t, h).unwrap();
                let b = fbm_cov(t, s, h).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-14);
            }
            assert_relative_eq!(
                fbm_cov(1.7, 1.7, h).unwrap(),
                1.7f64.powf(2.0 * h),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn cov_rejects_bad_domain() {
        assert!(matches!(fbm_cov(-0.1, 1.0, 0.6), Err(FbmError::NegativeTime(_))));
        assert!(matches!(fbm_cov(0.1, 1.0, 0.45), Err(FbmError::InvalidHurst(_))));
        assert!(matches!(fbm_cov(0.1, 1.0, 1.0), Err(FbmError::InvalidHurst(_))));
    }

    #[test]
    fn spectrum_is_flat_for_brownian_increments() {
        let dt = 0.01;
        let eigs = circulant_spectrum(0.5, 64, dt).unwrap();
        for e in eigs {
            assert_relative_eq!(e, dt, max_relative = 1e-10);
        }
    }

    #[test]
    fn spectrum_matches_hand_dft_for_two_steps() {
        // 4-point circulant of (g0, g1, g2, g1) with H = 0.75, dt = 1:
        // g0 = 1, g1 = sqrt(2) - 1, g2 = (3^1.5 - 2*2^1.5 + 1) / 2.
        let g0 = 1.0;
        let g1 = std::f64::consts::SQRT_2 - 1.0;
        let g2 = 0.5 * (3.0f64.powf(1.5) - 2.0 * 2.0f64.powf(1.5) + 1.0);
        let expected = [g0 + 2.0 * g1 + g2, g0 - g2, g0 - 2.0 * g1 + g2, g0 - g2];
        let eigs = circulant_spectrum(0.75, 2, 1.0).unwrap();
        for (e, x) in eigs.iter().zip(expected) {
            assert_relative_eq!(*e, x, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectrum_stays_psd_across_hurst_grid() {
        for &h in &[0.55, 0.65, 0.75, 0.85, 0.9, 0.95] {
            let eigs = circulant_spectrum(h, 1024, 1.0 / 1024.0).unwrap();
            let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
            let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
            assert!(min >= -TOL_EIG_REL * max, "H={h}: min eigenvalue {min}");
        }
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let a = sample_fbm_increments(0.7, 64, 1.0, RngStream::new(11, 4), SamplerMethod::Circulant)
            .unwrap();
        let b = sample_fbm_increments(0.7, 64, 1.0, RngStream::new(11, 4), SamplerMethod::Circulant)
            .unwrap();
        assert_eq!(a, b);
        let c = sample_fbm_increments(0.7, 64, 1.0, RngStream::new(11, 5), SamplerMethod::Circulant)
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cholesky_cap_is_enforced() {
        let err = CholeskySampler::with_cap(0.7, 65, 1.0, 64).unwrap_err();
        assert!(matches!(err, FbmError::CholeskyCapExceeded { requested: 65, cap: 64 }));
    }

    #[test]
    fn single_step_marginal_variance() {
        // n = 1: the lone increment is N(0, T^{2H}).
        let horizon = 1.7;
        let hurst = 0.8;
        let sampler = CirculantSampler::new(hurst, 1, horizon).unwrap();
        let n_draws = 1_000_000;
        let mut sum_sq = 0.0;
        for k in 0..n_draws {
            let g = sampler.sample(RngStream::new(99, k));
            sum_sq += g.increments[0] * g.increments[0];
        }
        let var = sum_sq / n_draws as f64;
        let expected = horizon.powf(2.0 * hurst);
        assert!(
            (var / expected - 1.0).abs() < 0.01,
            "variance ratio off: {var} vs {expected}"
        );
    }

    #[test]
    fn path_cumsum_has_expected_length_and_start() {
        let g = sample_fbm_increments(0.6, 16, 2.0, RngStream::new(1, 0), SamplerMethod::Cholesky)
            .unwrap();
        let path = g.path();
        assert_eq!(path.len(), 17);
        assert_eq!(path[0], 0.0);
        assert_relative_eq!(path[16], g.increments.iter().sum::<f64>(), max_relative = 1e-12);
    }
}
