//! Experiment files: a [`SimConfig`] template plus sweep axes, polling
//! series, search settings and output options, stored as TOML.

use std::path::{Path, PathBuf};

use barracuda_core::{PollingVariant, SearchSettings, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// What `barracuda run` does with an experiment file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Throughput over the `deltas × ells` grid.
    #[default]
    Sweep,
    /// `Δ_θ(ℓ)` for every `ℓ` in the grid.
    Delta80,
    /// Per-trial results and the shape distribution of the template alone.
    Simulate,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub ells: Vec<u32>,
}

/// One polling strategy in a comparison; `label` fills the CSV `variant`
/// column and defaults to the strategy name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub polling: PollingVariant,
}

impl Series {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.polling.label().to_string())
    }
}

fn default_threshold() -> f64 {
    0.8
}
fn default_rel_tol() -> f64 {
    0.05
}
fn default_min_delta() -> f64 {
    1e-3
}
fn default_replicates() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_min_delta")]
    pub min_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
}

impl Default for SearchSection {
    fn default() -> Self {
        SearchSection {
            threshold: default_threshold(),
            rel_tol: default_rel_tol(),
            min_delta: default_min_delta(),
            bracket: None,
            replicates: default_replicates(),
        }
    }
}

impl SearchSection {
    pub fn settings(&self) -> SearchSettings {
        SearchSettings {
            threshold: self.threshold,
            rel_tol: self.rel_tol,
            bracket: self.bracket.map(|[lo, hi]| (lo, hi)),
            min_delta: self.min_delta,
            replicates: self.replicates,
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Also render SVG figures next to the CSVs.
    #[serde(default)]
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), plot: false }
    }
}

/// Overrides applied by `--full`, typically the large-network budget.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullScale {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub model: SimConfig,
    #[serde(default)]
    pub sweep: SweepAxes,
    /// Polling strategies to compare; empty means just `model.polling`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Series>,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<FullScale>,
}

fn field(name: &str, message: impl std::fmt::Display) -> String {
    format!("field `{name}`: {message}")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialise")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        ExperimentConfig::from_toml(&text)
            .map_err(|message| HarnessError::Config { path: path.display().to_string(), message })
    }

    /// The polling strategies in series order.
    pub fn series(&self) -> Vec<Series> {
        if self.variants.is_empty() {
            vec![Series { label: None, polling: self.model.polling.clone() }]
        } else {
            self.variants.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(field("name", format!("{:?} must be a non-empty [A-Za-z0-9_-] identifier", self.name)));
        }
        self.model.validate().map_err(|e| field("model", e))?;
        for (i, s) in self.variants.iter().enumerate() {
            s.polling.validate().map_err(|e| field(&format!("variants[{i}].polling"), e))?;
        }
        let labels: Vec<String> = self.series().iter().map(Series::label).collect();
        if labels.iter().enumerate().any(|(i, l)| labels[..i].contains(l)) {
            return Err(field("variants", "series labels must be distinct"));
        }
        if let Some((i, d)) = self.sweep.deltas.iter().enumerate().find(|(_, d)| !(d.is_finite() && **d >= 0.0)) {
            return Err(field(&format!("sweep.deltas[{i}]"), format!("{d} is not a finite non-negative delay")));
        }
        if let Some((i, l)) = self.sweep.ells.iter().enumerate().find(|(_, l)| **l == 0 || **l > self.model.n) {
            return Err(field(&format!("sweep.ells[{i}]"), format!("{l} is not in 1..={}", self.model.n)));
        }
        match self.kind {
            ExperimentKind::Sweep => {
                if self.sweep.deltas.is_empty() {
                    return Err(field("sweep.deltas", "the delay grid is empty"));
                }
                if self.sweep.ells.is_empty() {
                    return Err(field("sweep.ells", "the polling grid is empty"));
                }
            }
            ExperimentKind::Delta80 => {
                if self.sweep.ells.is_empty() {
                    return Err(field("sweep.ells", "the polling grid is empty"));
                }
            }
            ExperimentKind::Simulate => {}
        }
        let s = &self.search;
        if !(s.threshold > 0.0 && s.threshold <= 1.0) {
            return Err(field("search.threshold", format!("{} is not in (0, 1]", s.threshold)));
        }
        if s.rel_tol.is_nan() || s.rel_tol <= 0.0 {
            return Err(field("search.rel_tol", "must be positive"));
        }
        if s.min_delta.is_nan() || s.min_delta <= 0.0 {
            return Err(field("search.min_delta", "must be positive"));
        }
        if s.replicates == 0 {
            return Err(field("search.replicates", "need at least one"));
        }
        if let Some([lo, hi]) = s.bracket {
            if !(0.0 <= lo && lo < hi) {
                return Err(field("search.bracket", format!("[{lo}, {hi}] is not an increasing pair")));
            }
        }
        if let Some(full) = &self.full {
            let scaled = self.at_scale(true, None);
            scaled.model.validate().map_err(|e| field("full", e))?;
            if full.trials == Some(0) {
                return Err(field("full.trials", "need at least one trial"));
            }
        }
        Ok(())
    }

    /// The configuration actually run: `--full` overrides and a seed override.
    pub fn at_scale(&self, full: bool, seed: Option<u64>) -> ExperimentConfig {
        let mut cfg = self.clone();
        if full {
            if let Some(f) = &self.full {
                cfg.model.n = f.n.unwrap_or(cfg.model.n);
                cfg.model.t = f.t.unwrap_or(cfg.model.t);
                cfg.model.trials = f.trials.unwrap_or(cfg.model.trials);
            }
        }
        if let Some(seed) = seed {
            cfg.model.seed = seed;
        }
        cfg
    }
}
