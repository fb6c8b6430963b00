//! Statistical self-tests of the fBm sampler.
//!
//! The suite checks the sampler output against the analytic law: terminal
//! variance, a mid/terminal covariance point, a Kolmogorov-Smirnov normality
//! test on standardized increments, and the lag-1 increment autocovariance
//! (which is an independence test at H = 1/2). Thresholds correspond to
//! significance 0.001 on Gaussian statistics, so the suite is expected to
//! pass for any fixed seed once verified.

use crate::exec::map_paths;
use crate::fbm::{fbm_cov, fgn_autocov, CirculantSampler, FbmError};
use crate::numeric::{mean, normal_cdf, sample_sd};
use crate::rng::RngStream;

/// Two-sided Gaussian quantile at significance 0.001.
pub const Z_CRIT: f64 = 3.2905267314919255;

/// Asymptotic Kolmogorov-Smirnov critical constant at significance 0.001:
/// `sqrt(-ln(alpha / 2) / 2)`.
pub const KS_CRIT: f64 = 1.9494753164394527;

/// Cap on the pooled sample size of the KS normality check.
const KS_SAMPLE_CAP: usize = 200_000;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    /// Normalized statistic; passes when it does not exceed `threshold`.
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub hurst: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub master_seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, statistic: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        statistic,
        threshold,
        passed: statistic <= threshold,
    }
}

/// Run the sampler suite on a unit horizon.
pub fn run_fbm_selftest(
    hurst: f64,
    n_steps: usize,
    n_paths: usize,
    master_seed: u64,
) -> Result<SelftestReport, FbmError> {
    let horizon = 1.0;
    let sampler = CirculantSampler::new(hurst, n_steps, horizon)?;
    let dt = horizon / n_steps as f64;
    let gamma0 = fgn_autocov(hurst, dt, 0);
    let gamma1 = fgn_autocov(hurst, dt, 1);

    struct PathSummary {
        b_half: f64,
        b_end: f64,
        lag1_mean: f64,
    }

    let half_idx = (n_steps / 2).max(1);
    let summaries = map_paths(n_paths, |k| {
        let grid = sampler.sample(RngStream::new(master_seed, k as u64));
        let mut acc = 0.0;
        let mut b_half = 0.0;
        let mut lag1 = 0.0;
        for (i, inc) in grid.increments.iter().enumerate() {
            acc += inc;
            if i + 1 == half_idx {
                b_half = acc;
            }
            if i + 1 < n_steps {
                lag1 += inc * grid.increments[i + 1];
            }
        }
        PathSummary {
            b_half,
            b_end: acc,
            lag1_mean: if n_steps > 1 {
                lag1 / (n_steps - 1) as f64
            } else {
                0.0
            },
        }
    });

    let n = n_paths as f64;
    let mut checks = Vec::new();

    // terminal variance against T^{2H}
    let var_end = summaries.iter().map(|s| s.b_end * s.b_end).sum::<f64>() / n;
    let var_expected = horizon.powf(2.0 * hurst);
    checks.push(check(
        "terminal variance ratio",
        (var_end / var_expected - 1.0).abs(),
        4.0 * (2.0 / n).sqrt(),
    ));

    // covariance of (B_{t_half}, B_T) against the analytic kernel
    let t_half = half_idx as f64 * dt;
    let cov_products: Vec<f64> = summaries.iter().map(|s| s.b_half * s.b_end).collect();
    let cov_mean = mean(&cov_products);
    let cov_se = sample_sd(&cov_products, cov_mean) / n.sqrt();
    let cov_expected = fbm_cov(t_half, horizon, hurst)?;
    checks.push(check(
        "mid/terminal covariance z-score",
        ((cov_mean - cov_expected) / cov_se).abs(),
        4.0,
    ));

    // lag-1 increment autocovariance; gamma1 = 0 at H = 1/2, so this doubles
    // as the independence test there. Per-path means are independent, which
    // sidesteps the within-path dependence of the products.
    if n_steps > 1 {
        let lag_means: Vec<f64> = summaries.iter().map(|s| s.lag1_mean).collect();
        let lag_mean = mean(&lag_means);
        let lag_se = sample_sd(&lag_means, lag_mean) / n.sqrt();
        checks.push(check(
            "lag-1 autocovariance z-score",
            ((lag_mean - gamma1) / lag_se).abs(),
            Z_CRIT,
        ));
    }

    // KS normality of standardized increments, pooled over leading paths
    let ks_paths = (KS_SAMPLE_CAP / n_steps).clamp(1, n_paths);
    let mut pooled = Vec::with_capacity(ks_paths * n_steps);
    let scale = 1.0 / gamma0.sqrt();
    for k in 0..ks_paths {
        let grid = sampler.sample(RngStream::new(master_seed, k as u64));
        pooled.extend(grid.increments.iter().map(|x| x * scale));
    }
    pooled.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let m = pooled.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in pooled.iter().enumerate() {
        let cdf = normal_cdf(*x);
        d = d.max((cdf - i as f64 / m).abs());
        d = d.max(((i + 1) as f64 / m - cdf).abs());
    }
    checks.push(check(
        "increment normality (KS)",
        d * m.sqrt(),
        KS_CRIT,
    ));

    Ok(SelftestReport {
        hurst,
        n_steps,
        n_paths,
        master_seed,
        checks,
    })
}
