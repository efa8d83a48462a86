//! Flat `key = value` experiment configs.
//!
//! One assignment per line, `#` starts a comment, lists are comma-separated.
//! Densities are given in km⁻² and converted to m⁻² here, at the I/O
//! boundary; lengths are meters throughout. Every command validates that no
//! unknown keys remain, so typos fail loudly with their line number.

use std::collections::BTreeMap;
use std::fmt;

use crate::bounds::PercolationConstants;
use crate::percolation::{CrossingRule, ExperimentConfig};
use crate::pointprocess::{DensityPair, RadioParams, Window};

/// Densities are stated per km²; dividing by this exactly representable
/// constant (rather than multiplying by 1e-6) round-trips grid values in the
/// CSV outputs.
pub const PER_KM2: f64 = 1e6;

/// A config problem with the line it came from.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {}: {}", n, self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parsed key-value file.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(
                    Some(line_no),
                    format!("expected `key = value`, got `{}`", raw.trim()),
                ));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(err(Some(line_no), "empty key"));
            }
            if entries.insert(key.clone(), (value, line_no)).is_some() {
                return Err(err(Some(line_no), format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { entries })
    }

    /// Resolved settings for the run manifest.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect()
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> ConfigResult<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| err(Some(line), format!("`{key}` must be a number, got `{v}`"))),
        }
    }

    fn take_u64(&mut self, key: &str) -> ConfigResult<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| err(Some(line), format!("`{key}` must be an integer, got `{v}`"))),
        }
    }

    fn take_list_f64(&mut self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                let mut list = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    list.push(part.parse::<f64>().map_err(|_| {
                        err(
                            Some(line),
                            format!("`{key}` must be a comma-separated number list, got `{part}`"),
                        )
                    })?);
                }
                if list.is_empty() {
                    return Err(err(Some(line), format!("`{key}` list is empty")));
                }
                Ok(Some(list))
            }
        }
    }

    fn require_f64(&mut self, key: &str) -> ConfigResult<f64> {
        self.take_f64(key)?
            .ok_or_else(|| err(None, format!("missing required key `{key}`")))
    }

    fn finish(&self) -> ConfigResult<()> {
        if let Some((key, (_, line))) = self.entries.iter().next() {
            return Err(err(Some(*line), format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn radio_params(map: &mut ConfigMap) -> ConfigResult<RadioParams> {
    RadioParams::new(
        map.require_f64("primary_tx_range_m")?,
        map.require_f64("primary_interference_range_m")?,
        map.require_f64("secondary_tx_range_m")?,
        map.require_f64("secondary_interference_range_m")?,
    )
    .map_err(|e| err(None, e.to_string()))
}

fn experiment(
    map: &mut ConfigMap,
    params: RadioParams,
    seed_override: Option<u64>,
) -> ConfigResult<ExperimentConfig> {
    let width = map.take_f64("window_width_m")?.unwrap_or(2000.0);
    let height = map.take_f64("window_height_m")?.unwrap_or(2000.0);
    let padding = map.take_f64("padding_m")?;
    let window = match padding {
        Some(p) => Window::new(width, height, p),
        None => Window::padded_for(width, height, &params),
    }
    .map_err(|e| err(None, e.to_string()))?;

    let realizations = map.take_u64("realizations")?.unwrap_or(200);
    let master_seed = seed_override.or(map.take_u64("master_seed")?).unwrap_or(1);
    let mut cfg = ExperimentConfig::new(params, window, realizations, master_seed)
        .map_err(|e| err(None, e.to_string()))?;

    if let Some(t) = map.take_f64("crossing_threshold")? {
        cfg.crossing_threshold = t;
    }
    if let Some(m) = map.take_f64("margin_m")? {
        cfg.margin = m;
    }
    if let Some(steps) = map.take_u64("bisection_steps")? {
        cfg.bisection_steps = steps as u32;
    }
    if let Some((rule, line)) = map.take("crossing_rule") {
        cfg.rule = match rule.as_str() {
            "left-right" | "lr" => CrossingRule::LeftRight,
            "top-bottom" | "tb" => CrossingRule::TopBottom,
            "either" => CrossingRule::Either,
            "both" => CrossingRule::Both,
            other => {
                return Err(err(
                    Some(line),
                    format!(
                        "`crossing_rule` must be left-right|top-bottom|either|both, got `{other}`"
                    ),
                ))
            }
        };
    }
    cfg.validate().map_err(|e| err(None, e.to_string()))?;
    Ok(cfg)
}

fn constants(map: &mut ConfigMap) -> ConfigResult<PercolationConstants> {
    let mut c = PercolationConstants::default();
    if let Some(v) = map.take_f64("lambda_c_unit")? {
        c = PercolationConstants::new(v, None).map_err(|e| err(None, e.to_string()))?;
    }
    Ok(c)
}

fn density_km2(map: &mut ConfigMap, s_key: &str, pt_key: &str) -> ConfigResult<DensityPair> {
    let lambda_s = map.require_f64(s_key)?;
    let lambda_pt = map.require_f64(pt_key)?;
    DensityPair::new(lambda_s / PER_KM2, lambda_pt / PER_KM2).map_err(|e| err(None, e.to_string()))
}

fn linspace(start: f64, stop: f64, steps: u64, line: Option<usize>) -> ConfigResult<Vec<f64>> {
    if steps < 2 || stop <= start {
        return Err(err(line, "grid needs stop > start and steps >= 2"));
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| start + h * i as f64).collect())
}

/// `simulate`: one density point, realization exports plus summary.
#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub experiment: ExperimentConfig,
    pub density: DensityPair,
    pub raw: BTreeMap<String, String>,
}

pub fn simulate_config(text: &str, seed_override: Option<u64>) -> ConfigResult<SimulateConfig> {
    let mut map = ConfigMap::parse(text)?;
    let raw = map.resolved();
    let params = radio_params(&mut map)?;
    let density = density_km2(&mut map, "lambda_s_per_km2", "lambda_pt_per_km2")?;
    let experiment = experiment(&mut map, params, seed_override)?;
    map.finish()?;
    Ok(SimulateConfig {
        experiment,
        density,
        raw,
    })
}

/// `sweep`: empirical boundary over a density grid plus analytic curves.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub experiment: ExperimentConfig,
    pub lambda_s_grid: Vec<f64>,
    pub constants: PercolationConstants,
    pub raw: BTreeMap<String, String>,
}

pub fn sweep_config(text: &str, seed_override: Option<u64>) -> ConfigResult<SweepConfig> {
    let mut map = ConfigMap::parse(text)?;
    let raw = map.resolved();
    let params = radio_params(&mut map)?;
    let grid_km2 = map
        .take_list_f64("lambda_s_grid_per_km2")?
        .ok_or_else(|| err(None, "missing required key `lambda_s_grid_per_km2`"))?;
    let lambda_s_grid: Vec<f64> = grid_km2.iter().map(|v| v / PER_KM2).collect();
    for w in lambda_s_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(err(
                None,
                "`lambda_s_grid_per_km2` must be strictly increasing",
            ));
        }
    }
    let constants = constants(&mut map)?;
    let experiment = experiment(&mut map, params, seed_override)?;
    map.finish()?;
    Ok(SweepConfig {
        experiment,
        lambda_s_grid,
        constants,
        raw,
    })
}

/// `degree`: μ vs r_p sweep, analytic and empirical columns.
#[derive(Debug, Clone)]
pub struct DegreeConfig {
    pub primary_tx_range: f64,
    pub primary_interference_range: f64,
    pub density: DensityPair,
    pub r_p_grid: Vec<f64>,
    /// r_I = ratio · r_p along the sweep.
    pub interference_ratio: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub realizations: u64,
    pub master_seed: u64,
    pub raw: BTreeMap<String, String>,
}

pub fn degree_config(text: &str, seed_override: Option<u64>) -> ConfigResult<DegreeConfig> {
    let mut map = ConfigMap::parse(text)?;
    let raw = map.resolved();
    let primary_tx_range = map.require_f64("primary_tx_range_m")?;
    let primary_interference_range = map.require_f64("primary_interference_range_m")?;
    let density = density_km2(&mut map, "lambda_s_per_km2", "lambda_pt_per_km2")?;
    let r_p_grid = match map.take_list_f64("r_p_grid_m")? {
        Some(grid) => grid,
        None => {
            let start = map.require_f64("r_p_start_m")?;
            let stop = map.require_f64("r_p_stop_m")?;
            let steps = map.take_u64("r_p_steps")?.unwrap_or(12);
            linspace(start, stop, steps, None)?
        }
    };
    if r_p_grid.iter().any(|r| *r <= 0.0) {
        return Err(err(None, "r_p grid must be positive"));
    }
    let interference_ratio = map.take_f64("r_i_over_r_p")?.unwrap_or(1.25);
    if interference_ratio <= 0.0 {
        return Err(err(None, "`r_i_over_r_p` must be positive"));
    }
    let cfg = DegreeConfig {
        primary_tx_range,
        primary_interference_range,
        density,
        r_p_grid,
        interference_ratio,
        window_width: map.take_f64("window_width_m")?.unwrap_or(2000.0),
        window_height: map.take_f64("window_height_m")?.unwrap_or(2000.0),
        realizations: map.take_u64("realizations")?.unwrap_or(500),
        master_seed: seed_override.or(map.take_u64("master_seed")?).unwrap_or(1),
        raw,
    };
    map.finish()?;
    Ok(cfg)
}

impl DegreeConfig {
    /// Radio parameters at one sweep point.
    pub fn params_at(&self, r_p: f64) -> crate::Result<RadioParams> {
        RadioParams::new(
            self.primary_tx_range,
            self.primary_interference_range,
            r_p,
            r_p * self.interference_ratio,
        )
    }
}

/// `power-design`: primary-density cap vs r_I table plus argmax.
#[derive(Debug, Clone)]
pub struct PowerDesignConfig {
    pub primary_interference_range: f64,
    pub beta: f64,
    pub r_i_grid: Vec<f64>,
    pub constants: PercolationConstants,
    pub raw: BTreeMap<String, String>,
}

pub fn power_design_config(text: &str) -> ConfigResult<PowerDesignConfig> {
    let mut map = ConfigMap::parse(text)?;
    let raw = map.resolved();
    let primary_interference_range = map.require_f64("primary_interference_range_m")?;
    let beta = map.require_f64("beta")?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(err(None, format!("`beta` must lie in (0, 1), got {beta}")));
    }
    let r_i_grid = match map.take_list_f64("r_i_grid_m")? {
        Some(grid) => grid,
        None => {
            let start = map.require_f64("r_i_start_m")?;
            let stop = map.require_f64("r_i_stop_m")?;
            let steps = map.take_u64("r_i_steps")?.unwrap_or(200);
            linspace(start, stop, steps, None)?
        }
    };
    let constants = constants(&mut map)?;
    let cfg = PowerDesignConfig {
        primary_interference_range,
        beta,
        r_i_grid,
        constants,
        raw,
    };
    map.finish()?;
    Ok(cfg)
}

/// `validate-geometry`: analytic areas vs Monte-Carlo oracles.
#[derive(Debug, Clone)]
pub struct ValidateGeometryConfig {
    pub cases: u64,
    pub samples: u64,
    pub master_seed: u64,
    pub raw: BTreeMap<String, String>,
}

pub fn validate_geometry_config(
    text: &str,
    seed_override: Option<u64>,
) -> ConfigResult<ValidateGeometryConfig> {
    let mut map = ConfigMap::parse(text)?;
    let raw = map.resolved();
    let cfg = ValidateGeometryConfig {
        cases: map.take_u64("cases")?.unwrap_or(50),
        samples: map.take_u64("mc_samples")?.unwrap_or(10_000_000),
        master_seed: seed_override.or(map.take_u64("master_seed")?).unwrap_or(1),
        raw,
    };
    map.finish()?;
    Ok(cfg)
}
