#![allow(dead_code)]

use kdmod_core::constants::ELECTRON_VOLT;
use kdmod_core::model::Interaction;
use kdmod_core::{BeamSpec, Branch, PhysicalConstants, StandingWaveSpec, TravelingWaveSpec};

pub const PC: PhysicalConstants = PhysicalConstants::CODATA_2018;

pub fn beam(energy_ev: f64, relative_spread: f64) -> BeamSpec {
    let b = BeamSpec::new(energy_ev * ELECTRON_VOLT, 1e-6, 1e-4, 1e-4, 0.0, &PC).unwrap();
    b.with_velocity_spread(relative_spread * b.mean_velocity())
        .unwrap()
}

pub fn interaction(eps1: f64, eps0: f64, energy_ev: f64) -> Interaction {
    let sw = StandingWaveSpec::new(eps1, 532e-9).unwrap();
    let tw = TravelingWaveSpec::from_wavelength(eps0, 10.6e-6, &PC).unwrap();
    Interaction::new(sw, tw, beam(energy_ev, 0.0))
}

/// 532 nm standing wave and 10.6 µm traveling wave at 1 MV/m, 1 keV beam.
pub fn reference() -> Interaction {
    interaction(1e6, 1e6, 1e3)
}

/// Reference fields with the beam on the +1 resonance (about 161 eV).
pub fn weak_resonant() -> Interaction {
    reference().tuned_to(Branch::Absorption).unwrap()
}

/// 1 GV/m fields on the +1 resonance; the dimensionless coupling is ~0.08.
pub fn strong_resonant() -> Interaction {
    interaction(1e9, 1e9, 200.0)
        .tuned_to(Branch::Absorption)
        .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
