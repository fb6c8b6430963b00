//! Command-line front end of the pricing engine.
//!
//! Subcommands: `price` (one CSV row), `table` (full method x grid-size CSV),
//! `converge` (fixed-path rate study CSV), `fbm-selftest` (sampler
//! statistics). CSV goes to `--out` or stdout; diagnostics (effective config,
//! wall-clock timings) go to stderr so the data stream stays reproducible.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fouprice::{
    run_convergence_study, run_fbm_selftest, run_table, write_convergence_csv, write_table_csv,
    HarnessError, Method, TableRow,
};

use config::{parse_config, ConfigError};

const EXIT_CODES_HELP: &str = "Exit codes:
  0  success
  2  command-line usage error
  3  I/O error (config file or output path)
  4  config parse error (malformed document, unknown or missing keys)
  5  validation error (a named invariant is violated)
  6  estimator failure
  7  self-test failed

The runtime_ms CSV column is pinned to 0 so outputs are byte-reproducible;
wall-clock timings are printed to stderr instead.";

#[derive(Parser)]
#[command(
    name = "fouprice",
    about = "Option pricing under fractional Ornstein-Uhlenbeck stochastic volatility",
    after_help = EXIT_CODES_HELP,
    version
)]
struct Cli {
    /// Worker threads for path parallelism (default: all cores).
    /// Results do not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,

    /// Override a config key, e.g. --override master_seed=7 or
    /// --override vol.c=0.2 (repeatable; values are parsed as JSON).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Price once and emit a single CSV row (uses the largest grid size in
    /// n_list).
    Price {
        #[command(flatten)]
        common: CommonArgs,
        /// Estimator to run (default: first entry of the config's methods).
        #[arg(long)]
        method: Option<String>,
    },
    /// Run every (method, grid size) cell of the config and emit the table CSV.
    Table {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fixed-path subsampling study of the level-2 discretization error.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of study paths.
        #[arg(long, default_value_t = 50)]
        paths: usize,
    },
    /// Statistical self-test of the fBm sampler.
    FbmSelftest {
        /// Hurst index in [0.5, 1).
        #[arg(long = "H", default_value_t = 0.5)]
        hurst: f64,
        /// Grid steps per path.
        #[arg(long = "n", default_value_t = 1000)]
        n_steps: usize,
        /// Number of sampled paths.
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

enum CliError {
    Io(String),
    Parse(String),
    Validation(String),
    Estimator(String),
    SelftestFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Validation(_) => 5,
            CliError::Estimator(_) => 6,
            CliError::SelftestFailed => 7,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => format!("I/O error: {m}"),
            CliError::Parse(m) => format!("parse error: {m}"),
            CliError::Validation(m) => format!("validation error: {m}"),
            CliError::Estimator(m) => format!("estimator error: {m}"),
            CliError::SelftestFailed => "self-test failed".to_string(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Parse(m) => CliError::Parse(m),
            ConfigError::Validation(m) => CliError::Validation(m),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidConfig(m) => CliError::Validation(m),
            HarnessError::Model(m) => CliError::Validation(m.to_string()),
            HarnessError::Io(m) => CliError::Io(m.to_string()),
            other => CliError::Estimator(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let run = || match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fouprice: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    };
    match threads {
        None => run(),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("fouprice: could not build thread pool: {e}");
                ExitCode::from(2)
            }
        },
    }
}

fn load_experiment(
    common: &CommonArgs,
) -> Result<(config::ConfigFile, fouprice::ExperimentConfig), CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", common.config.display())))?;
    let parsed = parse_config(&text, &common.overrides)?;
    echo_effective_config(&parsed.0);
    Ok(parsed)
}

/// Diagnostic block showing the configuration actually in effect, including
/// applied defaults and overrides.
fn echo_effective_config(file: &config::ConfigFile) {
    match serde_json::to_string_pretty(file) {
        Ok(text) => eprintln!("effective config:\n{text}"),
        Err(e) => eprintln!("effective config unavailable: {e}"),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(std::io::stdout())),
        Some(p) => {
            let f = fs::File::create(p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(f))
        }
    }
}

fn emit_rows(rows: &[TableRow], out: &Option<PathBuf>) -> Result<(), CliError> {
    let mut w = open_out(out)?;
    write_table_csv(rows, &mut w).map_err(|e| CliError::Io(e.to_string()))
}

fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Table { common } => {
            let (_, experiment) = load_experiment(&common)?;
            let started = Instant::now();
            let rows = run_table(&experiment)?;
            eprintln!(
                "table: {} rows in {} ms",
                rows.len(),
                started.elapsed().as_millis()
            );
            emit_rows(&rows, &common.out)
        }
        Command::Price { common, method } => {
            let (_, mut experiment) = load_experiment(&common)?;
            let method = match method {
                Some(name) => name.parse::<Method>().map_err(CliError::Validation)?,
                None => experiment.methods[0],
            };
            let n_grid = *experiment.n_list.last().expect("validated non-empty");
            experiment.methods = vec![method];
            experiment.n_list = vec![n_grid];
            let started = Instant::now();
            let rows = run_table(&experiment)?;
            eprintln!(
                "price: {method} at n = {n_grid} in {} ms",
                started.elapsed().as_millis()
            );
            emit_rows(&rows, &common.out)
        }
        Command::Converge { common, paths } => {
            let (_, experiment) = load_experiment(&common)?;
            let xgrid_points = match experiment.xgrid {
                fouprice::XGridSpec::Auto { points } => points,
                fouprice::XGridSpec::Fixed(g) => g.points,
            };
            let started = Instant::now();
            let study = run_convergence_study(
                &experiment.model,
                &experiment.vol,
                &experiment.payoff,
                &experiment.n_list,
                paths,
                experiment.master_seed,
                xgrid_points,
            )?;
            eprintln!(
                "converge: reference n = {}, fitted slope = {:.4}, predicted = {:.4}, {} ms",
                study.reference_n,
                study.mean_fitted_slope,
                study.predicted_slope,
                started.elapsed().as_millis()
            );
            let mut w = open_out(&common.out)?;
            write_convergence_csv(&study, &mut w).map_err(|e| CliError::Io(e.to_string()))
        }
        Command::FbmSelftest {
            hurst,
            n_steps,
            paths,
            seed,
        } => {
            let report = run_fbm_selftest(hurst, n_steps, paths, seed)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            println!(
                "fbm self-test: H = {hurst}, n = {n_steps}, paths = {paths}, seed = {seed}"
            );
            for check in &report.checks {
                println!(
                    "  [{}] {}: statistic = {:.4}, threshold = {:.4}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.statistic,
                    check.threshold
                );
            }
            if report.all_passed() {
                println!("all checks passed");
                Ok(())
            } else {
                Err(CliError::SelftestFailed)
            }
        }
    }
}
