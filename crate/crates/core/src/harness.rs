//! Experiment orchestration: table runs over (method, grid size) cells,
//! CSV emission, and fixed-path convergence-rate studies.
//!
//! Every cell of a table reuses the same substreams per path index, so all
//! methods of a run see identical realizations and re-running a configuration
//! reproduces the output byte for byte.

use std::io::Write;

use thiserror::Error;

use crate::fbm::{CirculantSampler, FbmError, FbmGrid};
use crate::model::{
    integrated_variance, simulate_fou_grid, ModelError, ModelParams, VolSpec,
};
use crate::numeric::{format_significant, ols_slope};
use crate::payoff::PayoffSpec;
use crate::pricers::{
    conditional_price_on_grid, degenerate_conditional_estimate, estimate_direct, estimate_level1,
    estimate_level2, estimate_level3, g_on_grid, simulate_path_stats, Method, PriceError,
    PriceEstimate, XGrid, XGridSpec, DEFAULT_UGRID_POINTS,
};
use crate::rng::RngStream;

/// Errors below this floor count as exact agreement and are excluded from
/// log-log rate fits.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Hard cap on the reference resolution of convergence studies.
pub const MAX_REFERENCE_RESOLUTION: usize = 1 << 13;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Price(#[from] PriceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fbm(#[from] FbmError),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("estimator failed for method {method} at n = {n_grid}: {source}")]
    Cell {
        method: Method,
        n_grid: usize,
        #[source]
        source: PriceError,
    },
    #[error("convergence fit needs at least 3 usable rows, got {usable}")]
    InsufficientRows { usable: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Full description of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub vol: VolSpec,
    pub payoff: PayoffSpec,
    pub methods: Vec<Method>,
    pub n_list: Vec<usize>,
    pub n_paths: usize,
    pub master_seed: u64,
    pub xgrid: XGridSpec,
    pub ugrid_points: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.model.validate()?;
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "methods must not be empty".to_string(),
            ));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "n_list must not be empty".to_string(),
            ));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::InvalidConfig(
                "n_list must be strictly ascending".to_string(),
            ));
        }
        if self.n_list[0] == 0 {
            return Err(HarnessError::InvalidConfig(
                "grid sizes must be positive".to_string(),
            ));
        }
        if self.n_paths < 100 {
            return Err(HarnessError::InvalidConfig(format!(
                "n_paths must be at least 100, got {}",
                self.n_paths
            )));
        }
        if self.ugrid_points < 2 {
            return Err(HarnessError::InvalidConfig(format!(
                "ugrid_points must be at least 2, got {}",
                self.ugrid_points
            )));
        }
        if let XGridSpec::Fixed(grid) = &self.xgrid {
            grid.validate()?;
        }
        Ok(())
    }
}

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub method: Method,
    pub n_grid: usize,
    pub estimate: PriceEstimate,
}

/// Run every `(method, n)` cell of the configuration.
///
/// Cells with a common `n` share one set of simulated paths, which realizes
/// the common-random-numbers protocol across methods. Rows are emitted
/// method-major in the order methods and grid sizes appear in the config.
pub fn run_table(cfg: &ExperimentConfig) -> Result<Vec<TableRow>, HarnessError> {
    cfg.validate()?;
    let needs_wiener = cfg
        .methods
        .iter()
        .any(|m| matches!(m, Method::Direct | Method::Level1));
    let mut cells: Vec<Vec<PriceEstimate>> = vec![Vec::new(); cfg.methods.len()];
    for &n in &cfg.n_list {
        let stats = simulate_path_stats(
            &cfg.model,
            &cfg.vol,
            n,
            cfg.n_paths,
            cfg.master_seed,
            needs_wiener,
        )
        .map_err(|source| HarnessError::Cell {
            method: cfg.methods[0],
            n_grid: n,
            source,
        })?;
        for (mi, &method) in cfg.methods.iter().enumerate() {
            let est = match method {
                Method::Direct => estimate_direct(&cfg.payoff, &stats, n, cfg.master_seed),
                Method::Level1 => estimate_level1(
                    &cfg.payoff,
                    &stats,
                    cfg.model.horizon,
                    n,
                    cfg.master_seed,
                ),
                Method::Level2 => match cfg.vol.constant_value() {
                    Some(v) => degenerate_conditional_estimate(
                        &cfg.model,
                        &cfg.payoff,
                        v * v * cfg.model.horizon,
                        &cfg.xgrid,
                        n,
                        cfg.n_paths,
                        cfg.master_seed,
                        Method::Level2,
                    ),
                    None => estimate_level2(
                        &cfg.model,
                        &cfg.payoff,
                        &stats,
                        &cfg.xgrid,
                        n,
                        cfg.master_seed,
                    ),
                },
                Method::Level3 => match cfg.vol.constant_value() {
                    Some(v) => degenerate_conditional_estimate(
                        &cfg.model,
                        &cfg.payoff,
                        v * v * cfg.model.horizon,
                        &cfg.xgrid,
                        n,
                        cfg.n_paths,
                        cfg.master_seed,
                        Method::Level3,
                    ),
                    None => estimate_level3(
                        &cfg.model,
                        &cfg.vol,
                        &cfg.payoff,
                        &stats,
                        &cfg.xgrid,
                        cfg.ugrid_points,
                        n,
                        cfg.master_seed,
                    ),
                },
            }
            .map_err(|source| HarnessError::Cell {
                method,
                n_grid: n,
                source,
            })?;
            cells[mi].push(est);
        }
    }
    let mut rows = Vec::with_capacity(cfg.methods.len() * cfg.n_list.len());
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            rows.push(TableRow {
                method,
                n_grid: n,
                estimate: cells[mi][ni],
            });
        }
    }
    Ok(rows)
}

/// Write table rows as CSV.
///
/// Columns: `method,n_grid,n_paths,master_seed,value,std_error,runtime_ms`.
/// Reals carry 10 significant digits. The `runtime_ms` column is pinned to 0
/// so that output is byte-reproducible; wall-clock timings belong on the
/// diagnostic stream, not in the data contract.
pub fn write_table_csv<W: Write>(rows: &[TableRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "method,n_grid,n_paths,master_seed,value,std_error,runtime_ms")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},0",
            row.method,
            row.n_grid,
            row.estimate.n_paths,
            row.estimate.master_seed,
            format_significant(row.estimate.value, 10),
            format_significant(row.estimate.std_error, 10),
        )?;
    }
    Ok(())
}

/// One resolution of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_grid: usize,
    pub value: f64,
    /// Absolute difference against the reference-resolution value.
    pub abs_error: f64,
}

/// Convergence study of one path (or aggregated means across paths).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub reference_n: usize,
    pub rows: Vec<ConvergenceRow>,
    pub fitted_slope: f64,
    /// `-r H` from the volatility regularity and the Hurst index.
    pub predicted_slope: f64,
}

/// Least-squares slope of `log(abs_error)` against `log(n)`.
///
/// Rows whose error sits below [`ERROR_FLOOR`] are dropped; at least three
/// usable rows are required.
pub fn fit_convergence_rate(rows: &[ConvergenceRow]) -> Result<f64, HarnessError> {
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for row in rows {
        if row.abs_error >= ERROR_FLOOR {
            xs.push((row.n_grid as f64).ln());
            ys.push(row.abs_error.ln());
        }
    }
    if xs.len() < 3 {
        return Err(HarnessError::InsufficientRows { usable: xs.len() });
    }
    Ok(ols_slope(&xs, &ys))
}

/// Aggregated fixed-path subsampling study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub reference_n: usize,
    /// Per-resolution means of value and absolute error across paths.
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope fitted per path; paths without enough usable rows are
    /// skipped.
    pub per_path_slopes: Vec<f64>,
    pub mean_fitted_slope: f64,
    pub predicted_slope: f64,
}

/// Smallest power of two at least `4 * max_n`, capped at 2^13.
pub fn reference_resolution(max_n: usize) -> usize {
    (4 * max_n)
        .next_power_of_two()
        .min(MAX_REFERENCE_RESOLUTION)
}

/// Fixed-path subsampling study of the level-2 conditional price.
///
/// Each path samples one fBm trajectory at the reference resolution; coarser
/// resolutions reuse the same trajectory through block sums of its
/// increments, so the only thing that varies across a path's rows is the
/// discretization of the volatility integral. The per-path conditional price
/// is compared against the same path's reference value and the error decay
/// is fitted in log-log coordinates.
pub fn run_convergence_study(
    model: &ModelParams,
    vol: &VolSpec,
    payoff: &PayoffSpec,
    n_list: &[usize],
    study_paths: usize,
    master_seed: u64,
    xgrid_points: usize,
) -> Result<ConvergenceStudy, HarnessError> {
    model.validate()?;
    if n_list.is_empty() || !n_list.windows(2).all(|w| w[0] < w[1]) || n_list[0] == 0 {
        return Err(HarnessError::InvalidConfig(
            "n_list must be non-empty, positive and strictly ascending".to_string(),
        ));
    }
    if study_paths == 0 {
        return Err(HarnessError::InvalidConfig(
            "convergence study needs at least one path".to_string(),
        ));
    }
    if xgrid_points < 2 {
        return Err(HarnessError::InvalidConfig(
            "x grid needs at least 2 points".to_string(),
        ));
    }
    let reference_n = reference_resolution(*n_list.last().expect("non-empty"));
    for &n in n_list {
        if n >= reference_n || !reference_n.is_multiple_of(n) {
            return Err(HarnessError::InvalidConfig(format!(
                "grid size {n} must divide the reference resolution {reference_n}; \
                 use powers of two below the reference"
            )));
        }
    }
    let sampler = CirculantSampler::new(model.hurst, reference_n, model.horizon)?;

    struct PathOutcome {
        rows: Vec<ConvergenceRow>,
        slope: Option<f64>,
    }

    let outcomes: Vec<Result<PathOutcome, PriceError>> =
        crate::exec::map_paths(study_paths, |k| {
            let fbm = sampler.sample(RngStream::new(master_seed, k as u64));
            let y_ref = simulate_fou_grid(model, &fbm).expect("sampler grid matches params");
            let iv_ref = integrated_variance(model, vol, &y_ref).expect("grid sizes agree");
            let sigma_ref = iv_ref.sigma2_y.sqrt();
            let grid = XGrid {
                lo: iv_ref.m_y - 8.0 * sigma_ref,
                hi: iv_ref.m_y + 8.0 * sigma_ref,
                points: xgrid_points,
            };
            let g = g_on_grid(payoff, &grid)?;
            let reference_price =
                conditional_price_on_grid(iv_ref.m_y, iv_ref.sigma2_y, &grid, &g);
            let mut rows = Vec::with_capacity(n_list.len());
            for &n in n_list {
                let chunk = reference_n / n;
                let coarse: Vec<f64> = fbm
                    .increments
                    .chunks_exact(chunk)
                    .map(|c| c.iter().sum())
                    .collect();
                let coarse_grid = FbmGrid {
                    hurst: fbm.hurst,
                    n_steps: n,
                    horizon: fbm.horizon,
                    increments: coarse,
                };
                let y = simulate_fou_grid(model, &coarse_grid).expect("consistent grid");
                let iv = integrated_variance(model, vol, &y).expect("grid sizes agree");
                let value = conditional_price_on_grid(iv.m_y, iv.sigma2_y, &grid, &g);
                rows.push(ConvergenceRow {
                    n_grid: n,
                    value,
                    abs_error: (value - reference_price).abs(),
                });
            }
            let slope = fit_convergence_rate(&rows).ok();
            Ok(PathOutcome { rows, slope })
        });

    let mut per_path_slopes = Vec::new();
    let mut sums: Vec<(f64, f64)> = vec![(0.0, 0.0); n_list.len()];
    for outcome in outcomes {
        let outcome = outcome?;
        if let Some(s) = outcome.slope {
            per_path_slopes.push(s);
        }
        for (acc, row) in sums.iter_mut().zip(&outcome.rows) {
            acc.0 += row.value;
            acc.1 += row.abs_error;
        }
    }
    if per_path_slopes.is_empty() {
        return Err(HarnessError::InsufficientRows { usable: 0 });
    }
    let rows: Vec<ConvergenceRow> = n_list
        .iter()
        .zip(&sums)
        .map(|(&n, &(v, e))| ConvergenceRow {
            n_grid: n,
            value: v / study_paths as f64,
            abs_error: e / study_paths as f64,
        })
        .collect();
    let mean_fitted_slope =
        per_path_slopes.iter().sum::<f64>() / per_path_slopes.len() as f64;
    Ok(ConvergenceStudy {
        reference_n,
        rows,
        per_path_slopes,
        mean_fitted_slope,
        predicted_slope: -vol.holder_exponent() * model.hurst,
    })
}

/// Write an aggregated convergence study as CSV.
///
/// Columns: `n_grid,value,abs_error,fitted_slope,predicted_slope`; the two
/// slope columns repeat the study-level fit on every row.
pub fn write_convergence_csv<W: Write>(
    study: &ConvergenceStudy,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "n_grid,value,abs_error,fitted_slope,predicted_slope")?;
    for row in &study.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.n_grid,
            format_significant(row.value, 10),
            format_significant(row.abs_error, 10),
            format_significant(study.mean_fitted_slope, 10),
            format_significant(study.predicted_slope, 10),
        )?;
    }
    Ok(())
}

/// Default experiment configuration used by the benchmark tables, with the
/// caller choosing volatility, payoff and Hurst index.
pub fn default_config(
    hurst: f64,
    vol: VolSpec,
    payoff: PayoffSpec,
) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelParams {
            hurst,
            ..ModelParams::default()
        },
        vol,
        payoff,
        methods: vec![Method::Direct, Method::Level1, Method::Level2],
        n_list: vec![125, 250, 500, 1000, 2000, 4000, 8000],
        n_paths: 10_000,
        master_seed: 42,
        xgrid: XGridSpec::default(),
        ugrid_points: DEFAULT_UGRID_POINTS,
    }
}
