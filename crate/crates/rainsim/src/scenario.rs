//! Run configuration: one TOML file drives every command.
//!
//! A [`RunConfig`] has five sections — `scenario` (airspace, sources,
//! medium), `episode` (MDP shape), `training` (learner hyperparameters),
//! `evaluation` (rollout settings), and `validation` (reference-model
//! sweep) — all optional with documented defaults, all rejecting unknown
//! keys. Three scenarios ship embedded in the binary and can be named in
//! place of a config path: `fig3_validation`, `toy20`, and
//! `sevenbs_rain25`.

use std::path::Path;
use thiserror::Error;

use crate::agent::TrainConfig;
use crate::env::EpisodeConfig;
use crate::medium::{RainParameters, SphereForm};
use crate::radiomap::{fnv1a64, Scenario};
use crate::validation::PweSettings;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration error: {0}")]
    Invalid(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Evaluation settings: how many rollout starts and whether to include the
/// Manhattan baseline row.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Number of random evaluation starts (ignored when `start_list` is
    /// non-empty).
    pub starts: usize,
    /// Explicit start positions, metres.
    pub start_list: Vec<[f64; 2]>,
    /// Append the shortest-path baseline to the metrics table.
    pub baseline: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { starts: 50, start_list: Vec::new(), baseline: true }
    }
}

/// Reference-model sweep settings for the `validate` command.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationConfig {
    pub rain_rate_mm_h: f64,
    pub frequencies_ghz: Vec<f64>,
    /// Largest accepted relative error per frequency.
    pub tolerance: f64,
    /// Medium used by the sweep. Defaults to the Clausius–Mossotti
    /// denominators, the variant that attenuates.
    pub medium: RainParameters,
    pub waist_wavelengths: f64,
    pub range_m: f64,
    pub step_dz_m: f64,
    pub absorber_width: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            rain_rate_mm_h: 12.5,
            frequencies_ghz: vec![10.0, 20.0, 30.0],
            tolerance: 0.25,
            medium: RainParameters::default().with_form(SphereForm::ClausiusMossotti),
            waist_wavelengths: 15.0,
            range_m: 1500.0,
            step_dz_m: 2.5,
            absorber_width: 0.125,
        }
    }
}

impl ValidationConfig {
    pub fn pwe_settings(&self) -> PweSettings {
        let mut rain = self.medium;
        rain.rain_rate_mm_h = self.rain_rate_mm_h;
        PweSettings {
            rain,
            waist_wavelengths: self.waist_wavelengths,
            range_m: self.range_m,
            step_dz_m: self.step_dz_m,
            absorber_width: self.absorber_width,
        }
    }
}

/// Full run configuration.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub scenario: Scenario,
    pub episode: EpisodeConfig,
    pub training: TrainConfig,
    pub evaluation: EvalConfig,
    pub validation: ValidationConfig,
}

impl RunConfig {
    /// Parse a TOML document, rejecting unknown keys.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(format!("config schema: {e}")))
    }

    /// Resolve a `--config` value: an existing file path first, otherwise a
    /// bundled scenario name.
    pub fn load(name_or_path: &str) -> Result<Self> {
        let path = Path::new(name_or_path);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: name_or_path.to_string(),
                source,
            })?;
            return Self::from_toml(&text);
        }
        match bundled_scenario(name_or_path) {
            Some(text) => Self::from_toml(text),
            None => Err(ConfigError::Invalid(format!(
                "'{name_or_path}' is neither a readable file nor a bundled scenario \
                 (available: {})",
                BUNDLED_NAMES.join(", ")
            ))),
        }
    }

    /// Digest of the whole configuration (canonical JSON encoding).
    pub fn digest(&self) -> u64 {
        let encoded = serde_json::to_string(self).expect("config serializes");
        fnv1a64(encoded.as_bytes())
    }

    /// Training configuration with the run seed applied.
    pub fn training_with_seed(&self) -> TrainConfig {
        let mut t = self.training.clone();
        t.seed = self.seed;
        t
    }
}

const BUNDLED_NAMES: [&str; 3] = ["fig3_validation", "toy20", "sevenbs_rain25"];

/// Embedded scenario text by name.
pub fn bundled_scenario(name: &str) -> Option<&'static str> {
    match name {
        "fig3_validation" => Some(include_str!("../scenarios/fig3_validation.toml")),
        "toy20" => Some(include_str!("../scenarios/toy20.toml")),
        "sevenbs_rain25" => Some(include_str!("../scenarios/sevenbs_rain25.toml")),
        _ => None,
    }
}

/// Names of the scenarios compiled into the binary.
pub fn bundled_names() -> &'static [&'static str] {
    &BUNDLED_NAMES
}
