//! JSON experiment configuration: schema, defaults, overrides.
//!
//! Schema keys: `s0, y0, b, alpha, T, H, vol{kind, c|v}, payoff{calls[],
//! digitals[]}, methods[], n_list[], n_paths, master_seed,
//! xgrid{lo,hi,points}|"auto", ugrid_points`. Unknown keys are rejected, not
//! ignored, and the same applies to keys introduced through `--override`.

use std::fmt;

use fouprice::{
    ExperimentConfig, Method, ModelParams, PayoffSpec, VolSpec, XGrid, XGridSpec,
    DEFAULT_UGRID_POINTS, DEFAULT_XGRID_POINTS,
};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed document or schema mismatch (line/field in the message).
    Parse(String),
    /// Well-formed document violating an invariant named in the message.
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Validation(m) => write!(f, "config validation error: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn default_s0() -> f64 {
    1.0
}
fn default_y0() -> f64 {
    1.0
}
fn default_b() -> f64 {
    0.2
}
fn default_alpha() -> f64 {
    0.6
}
fn default_horizon() -> f64 {
    1.0
}
fn default_methods() -> Vec<String> {
    vec!["direct".into(), "level1".into(), "level2".into()]
}
fn default_n_list() -> Vec<usize> {
    vec![125, 250, 500, 1000, 2000, 4000, 8000]
}
fn default_n_paths() -> usize {
    10_000
}
fn default_seed() -> u64 {
    42
}
fn default_points() -> usize {
    DEFAULT_XGRID_POINTS
}
fn default_ugrid() -> usize {
    DEFAULT_UGRID_POINTS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "default_s0")]
    pub s0: f64,
    #[serde(default = "default_y0")]
    pub y0: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(rename = "T", default = "default_horizon")]
    pub horizon: f64,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub vol: VolConfig,
    pub payoff: PayoffConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub xgrid: XGridConfig,
    #[serde(default = "default_ugrid")]
    pub ugrid_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffConfig {
    #[serde(default)]
    pub calls: Vec<CallLeg>,
    #[serde(default)]
    pub digitals: Vec<DigitalLeg>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallLeg {
    pub w: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitalLeg {
    pub w: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XGridConfig {
    Keyword(String),
    Fixed {
        lo: f64,
        hi: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
}

impl Default for XGridConfig {
    fn default() -> Self {
        XGridConfig::Keyword("auto".to_string())
    }
}

/// Parse a JSON document, apply `key=value` overrides (dot paths for nested
/// keys, values parsed as JSON with a string fallback), and validate into an
/// [`ExperimentConfig`]. Returns the echoable config file alongside it.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<(ConfigFile, ExperimentConfig), ConfigError> {
    let mut doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    for spec in overrides {
        apply_override(&mut doc, spec)?;
    }
    let file: ConfigFile =
        serde_json::from_value(doc).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let experiment = build_experiment(&file)?;
    Ok((file, experiment))
}

fn apply_override(doc: &mut serde_json::Value, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| {
        ConfigError::Parse(format!("override '{spec}' must have the form key=value"))
    })?;
    if path.is_empty() {
        return Err(ConfigError::Parse(format!(
            "override '{spec}' has an empty key"
        )));
    }
    let value: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut node = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| {
            ConfigError::Parse(format!(
                "override path '{path}' does not address an object at '{seg}'"
            ))
        })?;
        if i + 1 == segments.len() {
            obj.insert(seg.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(seg.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("loop returns on the last segment")
}

fn build_vol(cfg: &VolConfig) -> Result<VolSpec, ConfigError> {
    let need_c = |value: Option<f64>| {
        value.ok_or_else(|| {
            ConfigError::Validation(format!("vol kind '{}' requires the field c", cfg.kind))
        })
    };
    let vol = match cfg.kind.as_str() {
        "sqrt_abs_shift" => VolSpec::sqrt_abs_shift(need_c(cfg.c)?),
        "abs_shift" => VolSpec::abs_shift(need_c(cfg.c)?),
        "sqrt_quadratic" => Ok(VolSpec::sqrt_quadratic()),
        "sin_sq_shift" => VolSpec::sin_sq_shift(need_c(cfg.c)?),
        "constant" => VolSpec::constant(cfg.v.ok_or_else(|| {
            ConfigError::Validation("vol kind 'constant' requires the field v".to_string())
        })?),
        other => {
            return Err(ConfigError::Validation(format!(
                "unknown vol kind '{other}' (expected sqrt_abs_shift, abs_shift, \
                 sqrt_quadratic, sin_sq_shift or constant)"
            )))
        }
    };
    vol.map_err(|e| ConfigError::Validation(e.to_string()))
}

fn build_experiment(file: &ConfigFile) -> Result<ExperimentConfig, ConfigError> {
    let model = ModelParams {
        s0: file.s0,
        y0: file.y0,
        drift_b: file.b,
        mean_reversion_alpha: file.alpha,
        horizon: file.horizon,
        hurst: file.hurst,
    };
    model
        .validate()
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
    let vol = build_vol(&file.vol)?;
    let payoff = PayoffSpec::new(
        file.payoff.calls.iter().map(|t| (t.w, t.k)).collect(),
        file.payoff.digitals.iter().map(|t| (t.w, t.l)).collect(),
    )
    .map_err(|e| ConfigError::Validation(e.to_string()))?;
    let mut methods = Vec::with_capacity(file.methods.len());
    for m in &file.methods {
        methods.push(m.parse::<Method>().map_err(ConfigError::Validation)?);
    }
    let xgrid = match &file.xgrid {
        XGridConfig::Keyword(word) if word == "auto" => XGridSpec::Auto {
            points: DEFAULT_XGRID_POINTS,
        },
        XGridConfig::Keyword(word) => {
            return Err(ConfigError::Validation(format!(
                "xgrid must be \"auto\" or an object {{lo, hi, points}}, got \"{word}\""
            )))
        }
        XGridConfig::Fixed { lo, hi, points } => XGridSpec::Fixed(XGrid {
            lo: *lo,
            hi: *hi,
            points: *points,
        }),
    };
    let experiment = ExperimentConfig {
        model,
        vol,
        payoff,
        methods,
        n_list: file.n_list.clone(),
        n_paths: file.n_paths,
        master_seed: file.master_seed,
        xgrid,
        ugrid_points: file.ugrid_points,
    };
    experiment
        .validate()
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
    Ok(experiment)
}
