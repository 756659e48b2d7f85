//! Run configuration: a TOML file whose key paths carry their units.

use std::fmt;
use std::path::Path;

use kdmod_core::constants::ELECTRON_VOLT;
use kdmod_core::dynamics::{LadderConfig, RhsVariant};
use kdmod_core::{
    BeamSpec, Error as CoreError, Interaction, PhysicalConstants, StandingWaveSpec,
    TravelingWaveSpec,
};
use serde::{Deserialize, Serialize};

/// Number of time samples per optical period when `simulation.time_points`
/// is absent.
pub const DEFAULT_TIME_POINTS: usize = 16;

/// Numeric key paths accepted by `sweep.parameter_path`.
pub const SWEEPABLE: [&str; 16] = [
    "standing_wave.epsilon1_V_per_m",
    "standing_wave.lambda1_m",
    "traveling_wave.epsilon0_V_per_m",
    "traveling_wave.omega_rad_per_s",
    "beam.energy_eV",
    "beam.current_A",
    "beam.width_x_m",
    "beam.width_z_m",
    "beam.dv_over_v",
    "simulation.n_max",
    "simulation.abs_tol",
    "simulation.rel_tol",
    "simulation.interaction_length_m",
    "simulation.output_points",
    "simulation.time_points",
    "simulation.max_step",
];

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandingWaveSection {
    pub epsilon1_V_per_m: f64,
    pub lambda1_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct TravelingWaveSection {
    pub epsilon0_V_per_m: f64,
    pub omega_rad_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BeamSection {
    pub energy_eV: f64,
    pub current_A: f64,
    pub width_x_m: f64,
    pub width_z_m: f64,
    pub dv_over_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsName {
    Simplified,
    Full,
}

impl From<RhsName> for RhsVariant {
    fn from(name: RhsName) -> Self {
        match name {
            RhsName::Simplified => RhsVariant::Simplified,
            RhsName::Full => RhsVariant::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub n_max: usize,
    pub rhs_variant: RhsName,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub interaction_length_m: f64,
    pub output_points: usize,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
    /// Largest step in `qy`; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
}

fn default_time_points() -> usize {
    DEFAULT_TIME_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter_path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub standing_wave: StandingWaveSection,
    pub traveling_wave: TravelingWaveSection,
    pub beam: BeamSection,
    pub simulation: SimulationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_owned()),
            line: None,
            message: message.into(),
        }
    }

    fn located(mut self, source: Option<&str>) -> Self {
        if self.line.is_none() {
            if let (Some(src), Some(key)) = (source, self.key.as_deref()) {
                self.line = locate_key(src, key);
            }
        }
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ", key `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of `path` (`table.key`) in a TOML document, found by
/// tracking `[table]` headers. Falls back to the table header line.
pub fn locate_key(source: &str, path: &str) -> Option<usize> {
    let (table, key) = path.rsplit_once('.').unwrap_or(("", path));
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_owned();
            if current == table {
                header = Some(i + 1);
            }
            continue;
        }
        if current != table {
            continue;
        }
        if let Some((lhs, _)) = line.split_once('=') {
            if lhs.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    header
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Everything a command needs, validated and converted to SI.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub interaction: Interaction,
    pub ladder: LadderConfig,
    pub interaction_length: f64,
    pub output_points: usize,
    pub time_points: usize,
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(source: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(source).map_err(|e| ConfigError {
            key: None,
            line: e.span().map(|s| line_of_offset(source, s.start)),
            message: e.message().trim().to_owned(),
        })?;
        config.validate().map_err(|e| e.located(Some(source)))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: None,
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml_str(&source)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable in TOML")
    }

    /// Checks every invariant, including those enforced by the library.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.resolve()?;
        if let Some(sweep) = &self.sweep {
            if !SWEEPABLE.contains(&sweep.parameter_path.as_str()) {
                return Err(ConfigError::at(
                    "sweep.parameter_path",
                    format!(
                        "`{}` is not a numeric configuration key",
                        sweep.parameter_path
                    ),
                ));
            }
            if sweep.values.is_empty() {
                return Err(ConfigError::at("sweep.values", "must not be empty"));
            }
            if let Some(bad) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(ConfigError::at(
                    "sweep.values",
                    format!("{bad} is not finite"),
                ));
            }
        }
        Ok(())
    }

    /// Converts to library types, checking values along the way.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let sim = &self.simulation;
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::at(key, format!("{v} is not finite")))
            }
        };
        let positive = |key: &str, v: f64| {
            finite(key, v)?;
            if v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::at(key, format!("must be > 0, got {v}")))
            }
        };
        let non_negative = |key: &str, v: f64| {
            finite(key, v)?;
            if v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::at(key, format!("must be ≥ 0, got {v}")))
            }
        };
        non_negative(
            "standing_wave.epsilon1_V_per_m",
            self.standing_wave.epsilon1_V_per_m,
        )?;
        positive("standing_wave.lambda1_m", self.standing_wave.lambda1_m)?;
        non_negative(
            "traveling_wave.epsilon0_V_per_m",
            self.traveling_wave.epsilon0_V_per_m,
        )?;
        positive(
            "traveling_wave.omega_rad_per_s",
            self.traveling_wave.omega_rad_per_s,
        )?;
        positive("beam.energy_eV", self.beam.energy_eV)?;
        non_negative("beam.current_A", self.beam.current_A)?;
        positive("beam.width_x_m", self.beam.width_x_m)?;
        positive("beam.width_z_m", self.beam.width_z_m)?;
        non_negative("beam.dv_over_v", self.beam.dv_over_v)?;
        positive("simulation.abs_tol", sim.abs_tol)?;
        positive("simulation.rel_tol", sim.rel_tol)?;
        positive("simulation.interaction_length_m", sim.interaction_length_m)?;
        if let Some(step) = sim.max_step {
            positive("simulation.max_step", step)?;
        }
        if sim.n_max == 0 {
            return Err(ConfigError::at("simulation.n_max", "must be ≥ 1"));
        }
        if sim.output_points == 0 {
            return Err(ConfigError::at("simulation.output_points", "must be ≥ 1"));
        }
        if sim.time_points == 0 {
            return Err(ConfigError::at("simulation.time_points", "must be ≥ 1"));
        }

        let pc = PhysicalConstants::CODATA_2018;
        let standing = StandingWaveSpec::new(
            self.standing_wave.epsilon1_V_per_m,
            self.standing_wave.lambda1_m,
        )
        .map_err(|e| library_error(&e))?;
        let traveling = TravelingWaveSpec::new(
            self.traveling_wave.epsilon0_V_per_m,
            self.traveling_wave.omega_rad_per_s,
        )
        .map_err(|e| library_error(&e))?;
        let beam = BeamSpec::new(
            self.beam.energy_eV * ELECTRON_VOLT,
            self.beam.current_A,
            self.beam.width_x_m,
            self.beam.width_z_m,
            0.0,
            &pc,
        )
        .and_then(|b| b.with_velocity_spread(self.beam.dv_over_v * b.mean_velocity()))
        .map_err(|e| library_error(&e))?;
        let ladder = LadderConfig {
            n_max: sim.n_max,
            rhs_variant: sim.rhs_variant.into(),
            abs_tol: sim.abs_tol,
            rel_tol: sim.rel_tol,
            max_step: sim.max_step.unwrap_or(f64::INFINITY),
        };
        ladder.validate().map_err(|e| library_error(&e))?;
        Ok(Resolved {
            interaction: Interaction::new(standing, traveling, beam),
            ladder,
            interaction_length: sim.interaction_length_m,
            output_points: sim.output_points,
            time_points: sim.time_points,
        })
    }

    /// Copy of the configuration with one numeric key replaced. The result
    /// is not validated.
    pub fn with_value(&self, path: &str, value: f64) -> Result<RunConfig, ConfigError> {
        if !SWEEPABLE.contains(&path) {
            return Err(ConfigError::at(path, "not a numeric configuration key"));
        }
        let mut doc = toml::Value::try_from(self).expect("run configuration serializes");
        let (table, key) = path.split_once('.').expect("sweepable keys are dotted");
        let integer_key = matches!(key, "n_max" | "output_points" | "time_points");
        let replacement = if integer_key {
            if value.fract() != 0.0 || value < 0.0 || value > i64::MAX as f64 {
                return Err(ConfigError::at(
                    path,
                    format!("{value} is not a non-negative integer"),
                ));
            }
            toml::Value::Integer(value as i64)
        } else {
            toml::Value::Float(value)
        };
        doc.get_mut(table)
            .and_then(toml::Value::as_table_mut)
            .expect("section exists")
            .insert(key.to_owned(), replacement);
        doc.try_into()
            .map_err(|e: toml::de::Error| ConfigError::at(path, e.message().to_owned()))
    }
}

/// Maps a library validation error back to the configuration key it came
/// from.
fn library_error(err: &CoreError) -> ConfigError {
    let key = match err {
        CoreError::InvalidParameter { name, .. } => match *name {
            "epsilon1" => "standing_wave.epsilon1_V_per_m",
            "lambda1" => "standing_wave.lambda1_m",
            "epsilon0" => "traveling_wave.epsilon0_V_per_m",
            "omega" => "traveling_wave.omega_rad_per_s",
            "kinetic_energy" | "mean_velocity" => "beam.energy_eV",
            "total_current" => "beam.current_A",
            "width_x" => "beam.width_x_m",
            "width_z" => "beam.width_z_m",
            "velocity_spread" => "beam.dv_over_v",
            "n_max" => "simulation.n_max",
            "abs_tol" => "simulation.abs_tol",
            "rel_tol" => "simulation.rel_tol",
            "max_step" => "simulation.max_step",
            _ => "",
        },
        _ => "",
    };
    ConfigError {
        key: (!key.is_empty()).then(|| key.to_owned()),
        line: None,
        message: err.to_string(),
    }
}
