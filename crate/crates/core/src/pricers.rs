//! The four price estimators.
//!
//! * `direct` averages `f(S_T)` over simulated paths (double discretization
//!   of the Wiener process and the fBm).
//! * `level1` averages the transformed statistic `F(S_T)/S_T (1 + Z_T/T)`,
//!   which removes payoff discontinuities before averaging; same double
//!   discretization.
//! * `level2` simulates only the fBm and integrates the log-price payoff
//!   antiderivative `G` against the conditional-Gaussian weight driven by the
//!   integrated variance of each volatility path (single discretization).
//! * `level3` replaces the path average of level 2 by an integral against a
//!   kernel-density estimate of the integrated-variance law.
//!
//! Path loops are embarrassingly parallel: every path owns the substream
//! with its own index, and partial results are reduced in ascending path
//! order, so estimates are bitwise identical for any worker count.

use thiserror::Error;

use crate::exec::map_paths;
use crate::fbm::{CirculantSampler, FbmError};
use crate::model::{simulate_fou_grid, ModelError, ModelParams, VolSpec};
use crate::numeric::{
    mean, normal_pdf, percentile, silverman_bandwidth, standard_error, trapezoid,
};
use crate::payoff::{PayoffError, PayoffSpec};
use crate::rng::{fill_standard_normal, RngStream};

/// Grid resolution used for the outer price integral.
pub const DEFAULT_XGRID_POINTS: usize = 2500;

/// Default resolution of the integrated-variance grid in `level3`.
pub const DEFAULT_UGRID_POINTS: usize = 400;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Pilot size for automatic x-grid bounds.
const AUTO_GRID_PILOT: usize = 1000;

#[derive(Debug, Error)]
pub enum PriceError {
    #[error(transparent)]
    Fbm(#[from] FbmError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error("conditional covariance is degenerate (delta = {0:e} <= 0)")]
    DegenerateCovariance(f64),
    #[error("auto x-grid bounds did not stabilize: {0}")]
    AutoBoundsFailed(String),
    #[error("estimator needs at least one Monte Carlo path")]
    EmptySample,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Estimator tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Level1,
    Level2,
    Level3,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Direct,
        Method::Level1,
        Method::Level2,
        Method::Level3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Level1 => "level1",
            Method::Level2 => "level2",
            Method::Level3 => "level3",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Method::Direct),
            "level1" => Ok(Method::Level1),
            "level2" => Ok(Method::Level2),
            "level3" => Ok(Method::Level3),
            other => Err(format!(
                "unknown method '{other}' (expected direct, level1, level2 or level3)"
            )),
        }
    }
}

/// Estimator output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEstimate {
    pub value: f64,
    /// Monte Carlo standard error of the path average; 0 where the estimate
    /// is deterministic. For `level2`/`level3` it is propagated from the
    /// per-path conditional prices and documented as approximate.
    pub std_error: f64,
    pub n_grid: usize,
    pub n_paths: usize,
    pub master_seed: u64,
    pub method: Method,
}

/// Conditional first/second moments of `(X_T, Z_T)` given a volatility path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMoments {
    pub sigma2_y: f64,
    pub sigma2_z: f64,
    pub m_y: f64,
    /// Covariance determinant `sigma2_y * sigma2_z - horizon^2`, nonnegative
    /// by Cauchy-Schwarz; the joint density needs it strictly positive.
    pub delta: f64,
    pub horizon: f64,
}

impl ConditionalMoments {
    pub fn new(sigma2_y: f64, sigma2_z: f64, m_y: f64, horizon: f64) -> Self {
        Self {
            sigma2_y,
            sigma2_z,
            m_y,
            delta: sigma2_y * sigma2_z - horizon * horizon,
            horizon,
        }
    }
}

/// Joint conditional density of `(X_T, Z_T)` at `(x, z)`:
/// `(2 pi sqrt(delta))^{-1} exp(-(s2z xt^2 + s2y z^2 - 2 T xt z) / (2 delta))`.
pub fn conditional_density_xz(x: f64, z: f64, cm: &ConditionalMoments) -> Result<f64, PriceError> {
    if cm.delta.is_nan() || cm.delta <= 0.0 {
        return Err(PriceError::DegenerateCovariance(cm.delta));
    }
    let xt = x - cm.m_y;
    let quad = cm.sigma2_z * xt * xt + cm.sigma2_y * z * z - 2.0 * cm.horizon * xt * z;
    Ok((-0.5 * quad / cm.delta).exp() / (2.0 * std::f64::consts::PI * cm.delta.sqrt()))
}

/// Closed form of `int z p_{X,Z}(x, z) dz`:
/// `T (x - m_y) / (sigma_y^3 sqrt(2 pi)) exp(-(x - m_y)^2 / (2 sigma_y^2))`.
pub fn inner_integral(x: f64, m_y: f64, sigma_y: f64, horizon: f64) -> f64 {
    let xt = x - m_y;
    let s2 = sigma_y * sigma_y;
    horizon * xt / (s2 * sigma_y * SQRT_2PI) * (-0.5 * xt * xt / s2).exp()
}

/// Uniform grid for the outer price integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl XGrid {
    pub fn validate(&self) -> Result<(), PriceError> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo >= self.hi {
            return Err(PriceError::InvalidArgument(format!(
                "x grid needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.points < 2 {
            return Err(PriceError::InvalidArgument(format!(
                "x grid needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }
}

/// Either explicit integration bounds or automatic bounds from a path pilot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XGridSpec {
    Auto { points: usize },
    Fixed(XGrid),
}

impl Default for XGridSpec {
    fn default() -> Self {
        XGridSpec::Auto {
            points: DEFAULT_XGRID_POINTS,
        }
    }
}

/// Terminal statistics of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PathStat {
    pub x_t: f64,
    pub z_t: f64,
    pub sigma2_y: f64,
    pub m_y: f64,
}

/// Simulate per-path terminal statistics.
///
/// Path `k` draws from substream `k`: first the `2 n_grid` normals consumed
/// by the circulant fBm sampler, then (only when `with_wiener`) the `n_grid`
/// Wiener normals. The fBm realization of a path therefore does not depend
/// on whether the Wiener leg is drawn, which is what lets the levels share
/// realizations.
pub(crate) fn simulate_path_stats(
    params: &ModelParams,
    vol: &VolSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
    with_wiener: bool,
) -> Result<Vec<PathStat>, PriceError> {
    params.validate()?;
    if n_paths == 0 {
        return Err(PriceError::EmptySample);
    }
    let sampler = CirculantSampler::new(params.hurst, n_grid, params.horizon)?;
    let dt = params.horizon / n_grid as f64;
    let sqrt_dt = dt.sqrt();
    let x0_bt = params.x0() + params.drift_b * params.horizon;

    Ok(map_paths(n_paths, move |k| {
        let mut rng = RngStream::new(master_seed, k as u64).rng();
        let fbm = sampler.sample_from(&mut rng);
        let y_grid = simulate_fou_grid(params, &fbm).expect("sampler grid matches params");
        let mut sum_var = 0.0;
        let mut sum_xw = 0.0;
        let mut sum_zw = 0.0;
        if with_wiener {
            let mut dw = vec![0.0; n_grid];
            fill_standard_normal(&mut rng, &mut dw);
            for i in 0..n_grid {
                let s = vol.evaluate(y_grid[i]);
                let w = dw[i] * sqrt_dt;
                sum_var += s * s;
                sum_xw += s * w;
                sum_zw += w / s;
            }
        } else {
            for &y in &y_grid[..n_grid] {
                let s = vol.evaluate(y);
                sum_var += s * s;
            }
        }
        let sigma2_y = sum_var * dt;
        let m_y = x0_bt - 0.5 * sigma2_y;
        PathStat {
            x_t: m_y + sum_xw,
            z_t: sum_zw,
            sigma2_y,
            m_y,
        }
    }))
}

fn finish(values: &[f64], n_grid: usize, master_seed: u64, method: Method) -> PriceEstimate {
    let value = mean(values);
    PriceEstimate {
        value,
        std_error: standard_error(values, value),
        n_grid,
        n_paths: values.len(),
        master_seed,
        method,
    }
}

/// Direct Monte Carlo average of `f(S_T)`.
pub fn price_direct(
    params: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    let stats = simulate_path_stats(params, vol, n_grid, n_paths, master_seed, true)?;
    estimate_direct(payoff, &stats, n_grid, master_seed)
}

pub(crate) fn estimate_direct(
    payoff: &PayoffSpec,
    stats: &[PathStat],
    n_grid: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    let mut values = Vec::with_capacity(stats.len());
    for st in stats {
        values.push(payoff.value(st.x_t.exp())?);
    }
    Ok(finish(&values, n_grid, master_seed, Method::Direct))
}

/// Transformed average `F(S_T)/S_T (1 + Z_T/T)`; same realizations as the
/// direct estimator for a common seed.
pub fn price_level1(
    params: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    let stats = simulate_path_stats(params, vol, n_grid, n_paths, master_seed, true)?;
    estimate_level1(payoff, &stats, params.horizon, n_grid, master_seed)
}

pub(crate) fn estimate_level1(
    payoff: &PayoffSpec,
    stats: &[PathStat],
    horizon: f64,
    n_grid: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    let mut values = Vec::with_capacity(stats.len());
    for st in stats {
        let s = st.x_t.exp();
        values.push(payoff.integral(s)? / s * (1.0 + st.z_t / horizon));
    }
    Ok(finish(&values, n_grid, master_seed, Method::Level1))
}

/// `G` evaluated on the grid, shared by every path.
pub(crate) fn g_on_grid(payoff: &PayoffSpec, grid: &XGrid) -> Result<Vec<f64>, PriceError> {
    let dx = grid.dx();
    let mut out = Vec::with_capacity(grid.points);
    for i in 0..grid.points {
        out.push(payoff.log_integral(grid.lo + i as f64 * dx)?);
    }
    Ok(out)
}

/// `(2 pi)^{-1/2} int G(x) (x - m)/sigma^3 exp(-(x - m)^2/(2 sigma^2)) dx`
/// by the trapezoid rule on the fixed grid. This is the conditional price of
/// one volatility path with integrated variance `sigma2_y` and conditional
/// mean `m_y`.
pub(crate) fn conditional_price_on_grid(m_y: f64, sigma2_y: f64, grid: &XGrid, g_values: &[f64]) -> f64 {
    let sigma = sigma2_y.sqrt();
    let inv_s3 = 1.0 / (sigma2_y * sigma);
    let half_inv_s2 = 0.5 / sigma2_y;
    let dx = grid.dx();
    let mut acc = 0.0;
    for (i, g) in g_values.iter().enumerate() {
        let xt = grid.lo + i as f64 * dx - m_y;
        let mut v = g * xt * inv_s3 * (-xt * xt * half_inv_s2).exp();
        if i == 0 || i == g_values.len() - 1 {
            v *= 0.5;
        }
        acc += v;
    }
    acc * dx / SQRT_2PI
}

fn resolve_xgrid(spec: &XGridSpec, stats: &[PathStat]) -> Result<XGrid, PriceError> {
    match spec {
        XGridSpec::Fixed(grid) => {
            grid.validate()?;
            Ok(*grid)
        }
        XGridSpec::Auto { points } => {
            let pilot = &stats[..stats.len().min(AUTO_GRID_PILOT)];
            let mut ms: Vec<f64> = pilot.iter().map(|p| p.m_y).collect();
            ms.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite conditional means"));
            let sigma_max = pilot
                .iter()
                .map(|p| p.sigma2_y)
                .fold(0.0f64, f64::max)
                .sqrt();
            let lo = percentile(&ms, 1.0) - 8.0 * sigma_max;
            let hi = percentile(&ms, 99.0) + 8.0 * sigma_max;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(PriceError::AutoBoundsFailed(format!(
                    "pilot produced bounds [{lo}, {hi}]"
                )));
            }
            let grid = XGrid {
                lo,
                hi,
                points: *points,
            };
            grid.validate()?;
            Ok(grid)
        }
    }
}

/// Deterministic conditional price for a point-mass integrated variance `u`
/// (constant volatility, or a degenerate kernel bandwidth in `level3`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn degenerate_conditional_estimate(
    params: &ModelParams,
    payoff: &PayoffSpec,
    u: f64,
    xgrid: &XGridSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
    method: Method,
) -> Result<PriceEstimate, PriceError> {
    let m_y = params.x0() + params.drift_b * params.horizon - 0.5 * u;
    let sigma = u.sqrt();
    let grid = match xgrid {
        XGridSpec::Fixed(g) => {
            g.validate()?;
            *g
        }
        XGridSpec::Auto { points } => XGrid {
            lo: m_y - 8.0 * sigma,
            hi: m_y + 8.0 * sigma,
            points: *points,
        },
    };
    let g = g_on_grid(payoff, &grid)?;
    Ok(PriceEstimate {
        value: conditional_price_on_grid(m_y, u, &grid, &g),
        std_error: 0.0,
        n_grid,
        n_paths,
        master_seed,
        method,
    })
}

/// Single-discretization estimator: one conditional price per fBm path,
/// averaged over a common set of paths.
///
/// The per-path quadrature and the path average commute (the trapezoid rule
/// is linear), so averaging per-path conditional prices equals integrating
/// the path-averaged weight against `G`; the former also yields the
/// delta-method standard error directly.
pub fn price_level2(
    params: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
    xgrid: &XGridSpec,
) -> Result<PriceEstimate, PriceError> {
    params.validate()?;
    if let Some(v) = vol.constant_value() {
        // constant sigma makes delta = 0 exactly; use the closed evaluation
        return degenerate_conditional_estimate(
            params,
            payoff,
            v * v * params.horizon,
            xgrid,
            n_grid,
            n_paths,
            master_seed,
            Method::Level2,
        );
    }
    let stats = simulate_path_stats(params, vol, n_grid, n_paths, master_seed, false)?;
    estimate_level2(params, payoff, &stats, xgrid, n_grid, master_seed)
}

pub(crate) fn estimate_level2(
    params: &ModelParams,
    payoff: &PayoffSpec,
    stats: &[PathStat],
    xgrid: &XGridSpec,
    n_grid: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    let _ = params;
    let grid = resolve_xgrid(xgrid, stats)?;
    let g = g_on_grid(payoff, &grid)?;
    let prices = map_paths(stats.len(), |k| {
        conditional_price_on_grid(stats[k].m_y, stats[k].sigma2_y, &grid, &g)
    });
    Ok(finish(&prices, n_grid, master_seed, Method::Level2))
}

/// Density-representation estimator: integrate the conditional price against
/// a Gaussian-kernel density estimate of the integrated-variance sample.
#[allow(clippy::too_many_arguments)]
pub fn price_level3(
    params: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    n_grid: usize,
    n_paths: usize,
    master_seed: u64,
    xgrid: &XGridSpec,
    ugrid_points: usize,
) -> Result<PriceEstimate, PriceError> {
    params.validate()?;
    if ugrid_points < 2 {
        return Err(PriceError::InvalidArgument(format!(
            "u grid needs at least 2 points, got {ugrid_points}"
        )));
    }
    if let Some(v) = vol.constant_value() {
        return degenerate_conditional_estimate(
            params,
            payoff,
            v * v * params.horizon,
            xgrid,
            n_grid,
            n_paths,
            master_seed,
            Method::Level3,
        );
    }
    let stats = simulate_path_stats(params, vol, n_grid, n_paths, master_seed, false)?;
    estimate_level3(
        params,
        vol,
        payoff,
        &stats,
        xgrid,
        ugrid_points,
        n_grid,
        master_seed,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn estimate_level3(
    params: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    stats: &[PathStat],
    xgrid: &XGridSpec,
    ugrid_points: usize,
    n_grid: usize,
    master_seed: u64,
) -> Result<PriceEstimate, PriceError> {
    if stats.is_empty() {
        return Err(PriceError::EmptySample);
    }
    let us: Vec<f64> = stats.iter().map(|s| s.sigma2_y).collect();
    let bandwidth = silverman_bandwidth(&us);
    if bandwidth == 0.0 {
        // all integrated variances identical: the density is a point mass
        return degenerate_conditional_estimate(
            params,
            payoff,
            us[0],
            xgrid,
            n_grid,
            stats.len(),
            master_seed,
            Method::Level3,
        );
    }
    let grid = resolve_xgrid(xgrid, stats)?;
    let g = g_on_grid(payoff, &grid)?;

    let min_u = us.iter().cloned().fold(f64::MAX, f64::min);
    let max_u = us.iter().cloned().fold(f64::MIN, f64::max);
    let floor = params.horizon * vol.sigma_min() * vol.sigma_min();
    let u_lo = (min_u - 3.0 * bandwidth).max(floor);
    let u_hi = max_u + 3.0 * bandwidth;
    let du = (u_hi - u_lo) / (ugrid_points - 1) as f64;
    let x0_bt = params.x0() + params.drift_b * params.horizon;

    let integrand = map_paths(ugrid_points, |j| {
        let u = u_lo + j as f64 * du;
        let kernel_sum: f64 = us.iter().map(|uk| normal_pdf((u - uk) / bandwidth)).sum();
        let density = kernel_sum / (us.len() as f64 * bandwidth);
        conditional_price_on_grid(x0_bt - 0.5 * u, u, &grid, &g) * density
    });
    let value = trapezoid(&integrand, du);

    // delta-method dispersion from the per-path conditional prices
    let per_path = map_paths(stats.len(), |k| {
        conditional_price_on_grid(stats[k].m_y, stats[k].sigma2_y, &grid, &g)
    });
    let se = standard_error(&per_path, mean(&per_path));

    Ok(PriceEstimate {
        value,
        std_error: se,
        n_grid,
        n_paths: stats.len(),
        master_seed,
        method: Method::Level3,
    })
}

/// Lognormal reference price for constant volatility: sum of undiscounted
/// call terms `S0 e^{bT} Phi(d1) - K Phi(d2)` and digital terms `Phi(d2(L))`.
pub fn lognormal_reference(
    params: &ModelParams,
    payoff: &PayoffSpec,
    sigma: f64,
) -> Result<f64, PriceError> {
    if payoff.has_custom() {
        return Err(PriceError::InvalidArgument(
            "lognormal reference only covers the call/digital family".to_string(),
        ));
    }
    let s = sigma * params.horizon.sqrt();
    let forward = params.s0 * (params.drift_b * params.horizon).exp();
    let mut acc = 0.0;
    for &(w, k) in payoff.calls() {
        let d1 = ((params.s0 / k).ln() + params.drift_b * params.horizon + 0.5 * s * s) / s;
        let d2 = d1 - s;
        acc += w * (forward * crate::numeric::normal_cdf(d1) - k * crate::numeric::normal_cdf(d2));
    }
    for &(w, l) in payoff.digitals() {
        let d2 = ((params.s0 / l).ln() + params.drift_b * params.horizon - 0.5 * s * s) / s;
        acc += w * crate::numeric::normal_cdf(d2);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn default_payoff() -> PayoffSpec {
        PayoffSpec::call_plus_digital(1.0, 1.0).unwrap()
    }

    #[test]
    fn inner_integral_vanishes_at_the_mean_and_is_antisymmetric() {
        assert_eq!(inner_integral(0.3, 0.3, 0.7, 1.0), 0.0);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..50 {
            let a: f64 = rng.random_range(0.01..3.0);
            let m: f64 = rng.random_range(-1.0..1.0);
            let s: f64 = rng.random_range(0.2..2.0);
            let plus = inner_integral(m + a, m, s, 1.0);
            let minus = inner_integral(m - a, m, s, 1.0);
            assert_relative_eq!(plus, -minus, max_relative = 1e-12);
        }
    }

    #[test]
    fn inner_integral_matches_z_quadrature_of_the_density() {
        // xt = 0.5, sigma_y = 1, T = 1, sigma2_z chosen so delta > 0
        let cm = ConditionalMoments::new(1.0, 1.5, 0.2, 1.0);
        assert!(cm.delta > 0.0);
        let x = cm.m_y + 0.5;
        let panels = 400_000;
        let (z_lo, z_hi) = (-12.0, 12.0);
        let h = (z_hi - z_lo) / panels as f64;
        let mut oracle = 0.0;
        for i in 0..=panels {
            let z = z_lo + i as f64 * h;
            let w = if i == 0 || i == panels { 0.5 } else { 1.0 };
            oracle += w * z * conditional_density_xz(x, z, &cm).unwrap();
        }
        oracle *= h;
        let closed = inner_integral(x, cm.m_y, cm.sigma2_y.sqrt(), cm.horizon);
        assert_relative_eq!(closed, oracle, max_relative = 1e-8);
    }

    #[test]
    fn density_peak_value_and_degenerate_rejection() {
        let cm = ConditionalMoments::new(0.8, 1.9, -0.1, 1.0);
        let peak = conditional_density_xz(cm.m_y, 0.0, &cm).unwrap();
        assert_relative_eq!(
            peak,
            1.0 / (2.0 * std::f64::consts::PI * cm.delta.sqrt()),
            max_relative = 1e-14
        );

        // constant sigma: sigma2_y * sigma2_z = T^2 exactly, delta = 0
        let v: f64 = 0.2;
        let degenerate = ConditionalMoments::new(v * v, 1.0 / (v * v), 0.0, 1.0);
        assert!(matches!(
            conditional_density_xz(0.0, 0.0, &degenerate),
            Err(PriceError::DegenerateCovariance(_))
        ));
    }

    #[test]
    fn direct_recovers_expected_terminal_price_for_linear_payoff() {
        // f(s) = s via a call with vanishing strike: E S_T = S0 e^{bT}
        let params = ModelParams::default();
        let vol = VolSpec::sqrt_abs_shift(0.1).unwrap();
        let payoff = PayoffSpec::new(vec![(1.0, 1e-12)], vec![]).unwrap();
        let est = price_direct(&params, &vol, &payoff, 64, 4000, 11).unwrap();
        let expected = params.s0 * (params.drift_b * params.horizon).exp();
        assert!(
            (est.value - expected).abs() <= 3.0 * est.std_error,
            "{} vs {expected} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn level1_statistic_is_one_plus_weight_for_unit_payoff() {
        // digital with vanishing level: f = 1 on every simulated price, so
        // F(x) = x and the statistic is 1 + Z_T / T
        let params = ModelParams::default();
        let vol = VolSpec::abs_shift(0.1).unwrap();
        let payoff = PayoffSpec::new(vec![], vec![(1.0, 1e-12)]).unwrap();
        let est = price_level1(&params, &vol, &payoff, 64, 4000, 13).unwrap();
        assert!(
            (est.value - 1.0).abs() <= 3.0 * est.std_error,
            "{} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn constant_vol_level2_matches_lognormal_closed_form() {
        let params = ModelParams::default();
        let vol = VolSpec::constant(0.2).unwrap();
        let payoff = default_payoff();
        let est = price_level2(
            &params,
            &vol,
            &payoff,
            100,
            100,
            7,
            &XGridSpec::default(),
        )
        .unwrap();
        let reference = lognormal_reference(&params, &payoff, 0.2).unwrap();
        assert_abs_diff_eq!(est.value, reference, epsilon = 1e-4);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn constant_vol_level3_collapses_to_the_same_point_mass_value() {
        let params = ModelParams::default();
        let vol = VolSpec::constant(0.2).unwrap();
        let payoff = default_payoff();
        let l2 = price_level2(&params, &vol, &payoff, 50, 100, 7, &XGridSpec::default()).unwrap();
        let l3 = price_level3(
            &params,
            &vol,
            &payoff,
            50,
            100,
            7,
            &XGridSpec::default(),
            DEFAULT_UGRID_POINTS,
        )
        .unwrap();
        assert_abs_diff_eq!(l2.value, l3.value, epsilon = 1e-12);
        assert_eq!(l3.method, Method::Level3);
    }

    #[test]
    fn estimates_are_deterministic_given_the_seed() {
        let params = ModelParams::default();
        let vol = VolSpec::sqrt_abs_shift(0.1).unwrap();
        let payoff = default_payoff();
        let a = price_level2(&params, &vol, &payoff, 128, 500, 3, &XGridSpec::default()).unwrap();
        let b = price_level2(&params, &vol, &payoff, 128, 500, 3, &XGridSpec::default()).unwrap();
        assert_eq!(a, b);
        let c = price_direct(&params, &vol, &payoff, 128, 500, 3).unwrap();
        let d = price_direct(&params, &vol, &payoff, 128, 500, 3).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn estimates_are_nonnegative_for_nonnegative_payoffs() {
        let params = ModelParams::default();
        let payoff = default_payoff();
        for (_, vol) in VolSpec::builtins() {
            let d = price_direct(&params, &vol, &payoff, 32, 400, 5).unwrap();
            let l1 = price_level1(&params, &vol, &payoff, 32, 400, 5).unwrap();
            let l2 =
                price_level2(&params, &vol, &payoff, 32, 400, 5, &XGridSpec::default()).unwrap();
            assert!(d.value >= 0.0 && l1.value >= 0.0 && l2.value >= 0.0);
        }
    }

    #[test]
    fn method_parsing_round_trips() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("level9".parse::<Method>().is_err());
    }

    #[test]
    fn fixed_xgrid_is_validated() {
        let params = ModelParams::default();
        let vol = VolSpec::sqrt_abs_shift(0.1).unwrap();
        let payoff = default_payoff();
        let bad = XGridSpec::Fixed(XGrid {
            lo: 1.0,
            hi: 0.0,
            points: 100,
        });
        assert!(matches!(
            price_level2(&params, &vol, &payoff, 32, 100, 5, &bad),
            Err(PriceError::InvalidArgument(_))
        ));
    }
}
