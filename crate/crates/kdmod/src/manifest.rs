//! Run manifest: configuration echo, derived quantities and regime flags.

use kdmod_core::constants::ELECTRON_VOLT;
use kdmod_core::model::resonance_velocity;
use kdmod_core::{Branch, DerivedParams, Interaction};
use serde::Serialize;

use crate::config::RunConfig;
use crate::montecarlo::MonteCarloReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub command: String,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedSection {
    pub effective_potential_J: f64,
    pub effective_potential_eV: f64,
    pub grating_number_per_m: f64,
    pub coupling_rate_per_m: f64,
    pub modulation_length_m: f64,
    pub dimensionless_coupling: f64,
    pub dimensionless_potential: f64,
    pub photon_ratio: f64,
    pub angular_frequency_rad_per_s: f64,
    pub traveling_wave_number_per_m: f64,
    pub kinetic_energy_J: f64,
    pub momentum_kg_m_per_s: f64,
    pub velocity_m_per_s: f64,
    pub velocity_spread_m_per_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance_velocity_absorption_m_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance_velocity_emission_m_per_s: Option<f64>,
    /// Prefactor of the monochromatic modulation, `4Γ`.
    pub monochromatic_prefactor_per_m: f64,
    /// Prefactor of the velocity-averaged modulation, `2Γ`.
    pub averaged_prefactor_per_m: f64,
    /// Ratio of the zero-spread averaged modulation to the monochromatic
    /// one. The averaged factor `f±1` carries a leading 2 that the smaller
    /// prefactor absorbs, so this is exactly 1.
    pub limit_modulation_ratio: f64,
}

impl DerivedSection {
    pub fn new(interaction: &Interaction) -> Self {
        let dp: &DerivedParams = &interaction.derived;
        let averaged = kdmod_core::ensemble::averaged_prefactor(dp);
        Self {
            effective_potential_J: dp.effective_potential,
            effective_potential_eV: dp.effective_potential / ELECTRON_VOLT,
            grating_number_per_m: dp.grating_number,
            coupling_rate_per_m: dp.coupling_rate,
            modulation_length_m: dp.modulation_length,
            dimensionless_coupling: dp.dimensionless_coupling,
            dimensionless_potential: dp.dimensionless_potential,
            photon_ratio: dp.photon_ratio,
            angular_frequency_rad_per_s: dp.angular_frequency,
            traveling_wave_number_per_m: dp.traveling_wave_number,
            kinetic_energy_J: dp.kinetic_energy,
            momentum_kg_m_per_s: dp.momentum,
            velocity_m_per_s: dp.velocity,
            velocity_spread_m_per_s: interaction.beam.velocity_spread(),
            resonance_velocity_absorption_m_per_s: resonance_velocity(dp, Branch::Absorption).ok(),
            resonance_velocity_emission_m_per_s: resonance_velocity(dp, Branch::Emission).ok(),
            monochromatic_prefactor_per_m: dp.current_prefactor(),
            averaged_prefactor_per_m: averaged,
            limit_modulation_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlagSection {
    /// `V0/E ≥ 0.1`.
    pub potential_not_small: bool,
    /// `ħω/E ≥ 0.1`.
    pub photon_energy_not_small: bool,
    pub perturbative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: ToolInfo,
    pub run: RunInfo,
    pub derived: DerivedSection,
    pub flags: FlagSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloReport>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, interaction: &Interaction) -> Self {
        let flags = interaction.derived.flags;
        let mut warnings = Vec::new();
        if flags.potential_not_small {
            warnings.push(format!(
                "V0/E = {} is not small; first-order results are unreliable",
                interaction.derived.dimensionless_potential
            ));
        }
        if flags.photon_energy_not_small {
            warnings.push(format!(
                "ħω/E = {} is not small; the modulation-length expansion is unreliable",
                interaction.derived.photon_ratio
            ));
        }
        Self {
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME").to_owned(),
                version: env!("CARGO_PKG_VERSION").to_owned(),
            },
            run: RunInfo {
                command: command.to_owned(),
                wall_time_s: 0.0,
                warnings,
            },
            derived: DerivedSection::new(interaction),
            flags: FlagSection {
                potential_not_small: flags.potential_not_small,
                photon_energy_not_small: flags.photon_energy_not_small,
                perturbative: flags.is_perturbative(),
            },
            monte_carlo: None,
            config: config.clone(),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest is always representable in TOML")
    }
}

/// Extracts and re-validates the configuration echo of a manifest.
pub fn config_from_manifest(text: &str) -> Result<RunConfig, crate::config::ConfigError> {
    let doc: toml::Table = toml::from_str(text).map_err(|e| crate::config::ConfigError {
        key: None,
        line: None,
        message: e.message().to_owned(),
    })?;
    let echo = doc
        .get("config")
        .cloned()
        .ok_or_else(|| crate::config::ConfigError {
            key: Some("config".to_owned()),
            line: None,
            message: "manifest has no configuration echo".to_owned(),
        })?;
    let cfg: RunConfig =
        echo.try_into()
            .map_err(|e: toml::de::Error| crate::config::ConfigError {
                key: Some("config".to_owned()),
                line: None,
                message: e.message().to_owned(),
            })?;
    cfg.validate()?;
    Ok(cfg)
}
