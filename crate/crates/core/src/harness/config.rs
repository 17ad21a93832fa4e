//! Run configuration in TOML.
//!
//! Every section is optional; an empty file gives the desk-scale default
//! (`n = 48`, `L = 16 pi`, `nu = 1`, `eta = 0.5`, quiescent initial data).
//! A fully spelled-out file:
//!
//! ```toml
//! seed = 7
//! output_dir = "out/jet"            # overridden by LCSIM_OUTPUT_DIR
//!
//! [grid]
//! n = 48
//! box_length = 50.26548245743669
//! dealias_fraction = 0.6666666666666666
//!
//! [model]
//! nu = 1.0
//! eta = 0.5
//! w0 = [0.0, 0.0, 1.0]
//! linear = false
//!
//! [time]
//! dt = 0.05
//! t_end = 6.4
//! cfl_safety = 0.5
//! output_every = 1
//! scheme = "predictor-corrector"    # or "euler"
//! clamp = true
//!
//! [init]
//! normalize = true
//!
//! [init.velocity]
//! kind = "gaussian-jet"             # zero | taylor-green | gaussian-jet | curl-gaussian | random
//! sigma = 2.5
//! direction = [1.0, 0.0, 0.0]
//! amplitude = 0.05
//!
//! [init.director]
//! kind = "gaussian-bump"            # zero | sine-mode | gaussian-bump | random
//! sigma = 2.5
//! direction = [1.0, 0.0, 0.0]
//! amplitude = 0.2
//!
//! [split]
//! k = 3.0
//! xi_cut = 0.5
//!
//! [fit]
//! tolerance = 0.1
//! r2_threshold = 0.99
//! window = [1.0, 6.4]               # default [1, 0.1 (L / 2 pi)^2 / nu]
//! [fit.windows]
//! u_l2sq = [2.0, 6.4]
//!
//! [checks]
//! divergence_tol = 1e-10
//! max_principle_tol = 1e-6
//! energy_rel_tol = 1e-3
//! lady_factor = 2.0
//! smallness = 0.5                   # check min |d| >= 1/2 when the data are this small
//! ```
//!
//! Unknown keys are rejected. Parse errors carry the line number, validation
//! errors the dotted field name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::quantity::Quantity;
use crate::diagnostics::FourierSplitConfig;
use crate::error::{Error, Result};
use crate::lcd::{InitSpec, ModelParams, Scheme, TimeSpec};
use crate::spectral::GridSpec;

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "LCSIM_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "lcsim-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Default window for every quantity; derived from the box when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Per-quantity windows, keyed by column name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub windows: BTreeMap<Quantity, [f64; 2]>,
    /// A fitted exponent passes when it is at most `target + tolerance`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Power-law fits below this r^2 are flagged.
    #[serde(default = "default_r2")]
    pub r2_threshold: f64,
}

fn default_tolerance() -> f64 {
    0.1
}

fn default_r2() -> f64 {
    0.99
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            window: None,
            windows: BTreeMap::new(),
            tolerance: default_tolerance(),
            r2_threshold: default_r2(),
        }
    }
}

impl FitConfig {
    /// `[1, 0.1 (L / 2 pi)^2 / nu]`, before the box-scale exponential regime.
    pub fn default_window(grid: &GridSpec, params: &ModelParams) -> [f64; 2] {
        [1.0, 0.1 * (grid.box_length / (2.0 * PI)).powi(2) / params.nu]
    }

    pub fn window_for(&self, q: Quantity, grid: &GridSpec, params: &ModelParams) -> [f64; 2] {
        self.windows
            .get(&q)
            .copied()
            .or(self.window)
            .unwrap_or_else(|| Self::default_window(grid, params))
    }

    fn validate(&self) -> Result<()> {
        let check = |field: String, w: [f64; 2]| {
            if w[0].is_finite() && w[1].is_finite() && w[0] >= 0.0 && w[0] < w[1] {
                Ok(())
            } else {
                Err(Error::config(field, format!("{w:?} must satisfy 0 <= t1 < t2")))
            }
        };
        if let Some(w) = self.window {
            check("fit.window".into(), w)?;
        }
        for (q, w) in &self.windows {
            check(format!("fit.windows.{}", q.name()), *w)?;
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::config("fit.tolerance", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.r2_threshold) {
            return Err(Error::config("fit.r2_threshold", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    /// Bound on `||div u|| / ||grad u||` at every sample.
    #[serde(default = "default_div_tol")]
    pub divergence_tol: f64,
    /// Allowed excess of `max |d|` over 1 when `max |d0| <= 1`.
    #[serde(default = "default_mp_tol")]
    pub max_principle_tol: f64,
    /// Allowed cumulative energy-law violation, relative to `E(0)`.
    #[serde(default = "default_energy_tol")]
    pub energy_rel_tol: f64,
    /// Allowed growth factor of `||grad u||^2 + ||lap d||^2`.
    #[serde(default = "default_lady")]
    pub lady_factor: f64,
    /// When the initial `||u0||_{H^1}^2 + ||d0 - w0||_{H^2}^2` is at most this,
    /// `min |d| >= 1/2` is checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smallness: Option<f64>,
}

fn default_div_tol() -> f64 {
    1e-10
}

fn default_mp_tol() -> f64 {
    1e-6
}

fn default_energy_tol() -> f64 {
    1e-3
}

fn default_lady() -> f64 {
    2.0
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            divergence_tol: default_div_tol(),
            max_principle_tol: default_mp_tol(),
            energy_rel_tol: default_energy_tol(),
            lady_factor: default_lady(),
            smallness: None,
        }
    }
}

impl CheckConfig {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("checks.divergence_tol", self.divergence_tol),
            ("checks.max_principle_tol", self.max_principle_tol),
            ("checks.energy_rel_tol", self.energy_rel_tol),
            ("checks.lady_factor", self.lady_factor),
            ("checks.smallness", self.smallness.unwrap_or(0.0)),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(field, format!("{v} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub grid: GridSpec,
    pub model: ModelParams,
    pub time: TimeSpec,
    pub init: InitSpec,
    pub split: FourierSplitConfig,
    pub fit: FitConfig,
    pub checks: CheckConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSpec::cube(48, 16.0 * PI).expect("valid default grid");
        let model = ModelParams::new(1.0, 0.5, [0.0, 0.0, 1.0]).expect("valid default model");
        let t_end = FitConfig::default_window(&grid, &model)[1];
        RunConfig {
            seed: 0,
            output_dir: None,
            grid,
            model,
            time: TimeSpec {
                dt: 0.05,
                t_end,
                cfl_safety: 0.5,
                output_every: 1,
                scheme: Scheme::Euler,
                clamp: true,
            },
            init: InitSpec::default(),
            split: FourierSplitConfig::default(),
            fit: FitConfig::default(),
            checks: CheckConfig::default(),
        }
    }
}

impl RunConfig {
    /// Checks every component and normalises `w0`; copies the seed into the
    /// initial-condition spec.
    pub fn validated(mut self) -> Result<Self> {
        self.grid.validate()?;
        self.model = self.model.normalized()?;
        self.time.validate()?;
        self.init.seed = self.seed;
        self.init.validate()?;
        self.split.validate()?;
        self.fit.validate()?;
        self.checks.validate()?;
        Ok(self)
    }

    /// `LCSIM_OUTPUT_DIR`, else `output_dir`, else `lcsim-out`.
    pub fn resolve_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Sets a dotted key, e.g. `time.dt=0.01` or `init.velocity.kind="zero"`.
    /// The value is read as a TOML value, falling back to a bare string.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(assignment, "override must look like key=value"))?;
        let key = key.trim();
        let raw = raw.trim();
        let value: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        let mut table: toml::Table = toml::from_str(&self.to_toml()?).map_err(|e| Error::Format(e.to_string()))?;
        let parts: Vec<&str> = key.split('.').collect();
        let mut cursor = &mut table;
        for part in &parts[..parts.len() - 1] {
            let entry = cursor
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cursor = entry
                .as_table_mut()
                .ok_or_else(|| Error::config(key, format!("`{part}` is not a section")))?;
        }
        cursor.insert(parts[parts.len() - 1].to_string(), value);
        let text = toml::to_string(&table).map_err(|e| Error::Format(e.to_string()))?;
        parse_config(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::config(key, message),
            other => other,
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validated()
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub fn save_config(path: &Path, config: &RunConfig) -> Result<()> {
    fs::write(path, config.to_toml()?).map_err(|e| Error::io(path, e))
}
