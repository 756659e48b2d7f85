//! CODATA 2018 physical constants (SI).

/// Electron rest mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Elementary charge (C). Exact since the 2019 SI redefinition.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Speed of light in vacuum (m/s). Exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant ħ (J·s).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
/// One electronvolt in joules.
pub const ELECTRON_VOLT: f64 = ELEMENTARY_CHARGE;

/// The constants entering the dynamics, bundled so that every derived
/// quantity is computed from one consistent set.
///
/// Only [`PhysicalConstants::CODATA_2018`] can be constructed; golden values
/// in the test suites are pinned against it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    electron_mass: f64,
    elementary_charge: f64,
    speed_of_light: f64,
    reduced_planck: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        electron_mass: ELECTRON_MASS,
        elementary_charge: ELEMENTARY_CHARGE,
        speed_of_light: SPEED_OF_LIGHT,
        reduced_planck: REDUCED_PLANCK,
    };

    /// Electron mass `m` (kg).
    pub const fn electron_mass(&self) -> f64 {
        self.electron_mass
    }

    /// Elementary charge `e` (C).
    pub const fn elementary_charge(&self) -> f64 {
        self.elementary_charge
    }

    /// Speed of light `c` (m/s).
    pub const fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    /// Reduced Planck constant `ħ` (J·s).
    pub const fn reduced_planck(&self) -> f64 {
        self.reduced_planck
    }

    /// Converts an energy in eV to joules.
    pub fn ev_to_joule(&self, ev: f64) -> f64 {
        ev * self.elementary_charge
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive() {
        let pc = PhysicalConstants::CODATA_2018;
        for v in [
            pc.electron_mass(),
            pc.elementary_charge(),
            pc.speed_of_light(),
            pc.reduced_planck(),
        ] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn electron_rest_energy_matches_codata() {
        // m c² = 0.51099895000 MeV
        let pc = PhysicalConstants::CODATA_2018;
        let rest = pc.electron_mass() * pc.speed_of_light() * pc.speed_of_light() / ELECTRON_VOLT;
        assert!((rest / 0.510_998_950_00e6 - 1.0).abs() < 1e-9);
    }
}
