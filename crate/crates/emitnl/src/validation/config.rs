//! Run configuration in TOML or JSON. Every physical quantity carries its
//! unit in the key name.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::nscaling::{log_grid, NscalingOptions};
use super::units::FieldUnits;
use crate::effective::ModelOptions;
use crate::emitter::{
    coupled_system, CoupledSystem, DriveKind, DriveSpec, EmitterError, Level, LevelScheme, Regime,
    Transition,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Toml,
        }
    }
}

/// Parses `text`; `origin` only labels error messages.
pub fn parse<T: for<'de> Deserialize<'de>>(
    text: &str,
    format: Format,
    origin: &Path,
) -> Result<T, ConfigError> {
    let parsed = match format {
        Format::Toml => toml::from_str(text).map_err(|e| e.to_string()),
        Format::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
    };
    parsed.map_err(|message| ConfigError::Parse {
        path: origin.to_path_buf(),
        message: message.trim_end().to_string(),
    })
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, Format::from_path(path), path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub label: String,
    pub energy_rad_per_s: f64,
    #[serde(default)]
    pub decay_rate_rad_per_s: f64,
    #[serde(default)]
    pub decays_to_ground: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    pub lower: usize,
    pub upper: usize,
    #[serde(default)]
    pub dipole_c_m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveConfig {
    Quantized {
        transition: usize,
        name: String,
        coupling_rad_per_s: f64,
        #[serde(default)]
        coupling_phase_rad: f64,
        frequency_rad_per_s: f64,
        #[serde(default)]
        ground_coupled: Option<bool>,
    },
    ClassicalBare {
        transition: usize,
        amplitude_rad_per_s: f64,
    },
    ClassicalRwa {
        transition: usize,
        amplitude_rad_per_s: f64,
        #[serde(default)]
        phase_rad: f64,
        #[serde(default)]
        frequency_rad_per_s: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpansionConfig {
    pub order: u32,
    pub decay_order: u32,
    pub free_field: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            order: 4,
            decay_order: 2,
            free_field: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    pub cutoff: usize,
    pub n_probe: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            cutoff: 8,
            n_probe: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n: usize,
    /// Mean photon number per mode for the coupling bounds.
    #[serde(default)]
    pub photons: Vec<f64>,
}

/// Truncation-error sweep of two-level ensembles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub delta_rad_per_s: f64,
    #[serde(default = "default_lo")]
    pub lambda_over_delta_min: f64,
    #[serde(default = "default_hi")]
    pub lambda_over_delta_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_ns")]
    pub n: Vec<usize>,
    #[serde(default = "default_regimes")]
    pub regimes: Vec<Regime>,
}

fn default_lo() -> f64 {
    0.01
}
fn default_hi() -> f64 {
    0.3
}
fn default_points() -> usize {
    25
}
fn default_ns() -> Vec<usize> {
    vec![1, 10]
}
fn default_regimes() -> Vec<Regime> {
    vec![Regime::Bare, Regime::Rwa]
}

impl SweepConfig {
    pub fn options(&self, n_probe: usize) -> Result<NscalingOptions, ConfigError> {
        let (lo, hi) = (self.lambda_over_delta_min, self.lambda_over_delta_max);
        if !(self.delta_rad_per_s > 0.0 && lo > 0.0 && hi > lo && self.points >= 2) {
            return Err(ConfigError::Invalid(
                "sweep needs delta > 0, 0 < min < max and at least 2 points".into(),
            ));
        }
        let d = self.delta_rad_per_s;
        Ok(NscalingOptions {
            delta: d,
            n_probe,
            grid: log_grid(lo * d, hi * d, self.points),
        })
    }
}

/// Emitter, drives and run settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub regime: Regime,
    pub levels: Vec<LevelConfig>,
    #[serde(default)]
    pub transitions: Vec<TransitionConfig>,
    #[serde(default)]
    pub drives: Vec<DriveConfig>,
    #[serde(default)]
    pub expansion: ExpansionConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl SystemConfig {
    pub fn scheme(&self) -> LevelScheme {
        LevelScheme {
            levels: self
                .levels
                .iter()
                .map(|l| Level {
                    label: l.label.clone(),
                    energy: l.energy_rad_per_s,
                    decay_rate: l.decay_rate_rad_per_s,
                    decays_to_ground: l.decays_to_ground.unwrap_or(l.decay_rate_rad_per_s > 0.0),
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    lower: t.lower,
                    upper: t.upper,
                    dipole: t.dipole_c_m,
                })
                .collect(),
        }
    }

    pub fn drives(&self) -> Vec<DriveSpec> {
        self.drives
            .iter()
            .map(|d| match d {
                DriveConfig::Quantized {
                    transition,
                    name,
                    coupling_rad_per_s,
                    coupling_phase_rad,
                    frequency_rad_per_s,
                    ground_coupled,
                } => DriveSpec {
                    transition: *transition,
                    kind: DriveKind::Quantized {
                        name: name.clone(),
                        coupling: C64::from_polar(*coupling_rad_per_s, *coupling_phase_rad),
                        frequency: *frequency_rad_per_s,
                        ground_coupled: *ground_coupled,
                    },
                },
                DriveConfig::ClassicalBare {
                    transition,
                    amplitude_rad_per_s,
                } => DriveSpec {
                    transition: *transition,
                    kind: DriveKind::ClassicalBare {
                        amplitude: *amplitude_rad_per_s,
                    },
                },
                DriveConfig::ClassicalRwa {
                    transition,
                    amplitude_rad_per_s,
                    phase_rad,
                    frequency_rad_per_s,
                } => DriveSpec {
                    transition: *transition,
                    kind: DriveKind::ClassicalRwa {
                        amplitude: C64::from_polar(*amplitude_rad_per_s, *phase_rad),
                        frequency: *frequency_rad_per_s,
                    },
                },
            })
            .collect()
    }

    pub fn system(&self) -> Result<CoupledSystem, EmitterError> {
        coupled_system(&self.scheme(), &self.drives(), self.regime)
    }

    pub fn model_options(&self) -> ModelOptions {
        ModelOptions {
            max_order: self.expansion.order,
            free_field: self.expansion.free_field,
            decay_order: self.expansion.decay_order,
            tolerance: None,
        }
    }
}

/// Beam and material description for unit conversions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsConfig {
    pub dipole_c_m: f64,
    pub frequency_rad_per_s: f64,
    #[serde(default)]
    pub photons: Option<f64>,
    #[serde(default)]
    pub mode_volume_m3: Option<f64>,
    #[serde(default)]
    pub power_w: Option<f64>,
    #[serde(default)]
    pub area_m2: Option<f64>,
    #[serde(default)]
    pub length_m: Option<f64>,
    #[serde(default)]
    pub density_per_m3: Option<f64>,
    #[serde(default)]
    pub kerr: Option<KerrUnitsConfig>,
}

/// Four-level cross-Kerr parameters for the susceptibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrUnitsConfig {
    pub delta_rad_per_s: f64,
    pub omega_rad_per_s: f64,
    pub dipole_12_c_m: f64,
    pub dipole_34_c_m: f64,
    /// Probe field amplitude for the refractive index.
    #[serde(default)]
    pub field_v_per_m: Option<f64>,
}

impl UnitsConfig {
    pub fn field_units(&self) -> FieldUnits {
        FieldUnits {
            power: self.power_w,
            area: self.area_m2,
            length: self.length_m,
            photons: self.photons,
            mode_volume: self.mode_volume_m3,
            dipole: self.dipole_c_m,
            frequency: self.frequency_rad_per_s,
            density: self.density_per_m3,
        }
    }
}
