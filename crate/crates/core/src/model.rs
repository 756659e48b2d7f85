//! Wave and beam specifications and every constant derived from them.
//!
//! The two vector potentials use different normalisations and are *not*
//! mutually consistent: the standing wave uses
//! `A01 = −ε1·λ1`, the traveling wave uses `A02 = −ε0·c/ω = −ε0·λ/2π`.
//! The ponderomotive potential and the coupling rate are anchored to these
//! definitions, so they are kept per wave.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Upper bound on `v0 / c` accepted for a beam.
pub const NONRELATIVISTIC_LIMIT: f64 = 0.1;
/// Upper bound on `Δv / v0` accepted for a beam.
pub const MAX_RELATIVE_SPREAD: f64 = 0.1;
/// `η = V0/E` or `ρ = ħω/E` at or above this value sets a regime flag.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be finite"))
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be > 0"))
    }
}

fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be ≥ 0"))
    }
}

/// Which first sideband a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `n = +1`, absorption of one traveling-wave quantum.
    Absorption,
    /// `n = −1`, stimulated emission of one quantum.
    Emission,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Absorption, Branch::Emission];

    /// `+1` for absorption, `−1` for emission.
    pub const fn sign(self) -> i32 {
        match self {
            Branch::Absorption => 1,
            Branch::Emission => -1,
        }
    }

    pub(crate) fn signum(self) -> f64 {
        f64::from(self.sign())
    }
}

/// Two counterpropagating waves forming the standing "grating".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandingWaveSpec {
    field_amplitude: f64,
    wavelength: f64,
}

impl StandingWaveSpec {
    /// `field_amplitude` ε1 in V/m, `wavelength` λ1 in m.
    pub fn new(field_amplitude: f64, wavelength: f64) -> Result<Self> {
        Ok(Self {
            field_amplitude: require_non_negative("epsilon1", field_amplitude)?,
            wavelength: require_positive("lambda1", wavelength)?,
        })
    }

    pub fn field_amplitude(&self) -> f64 {
        self.field_amplitude
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// ω1 = 2πc/λ1 (rad/s).
    pub fn angular_frequency(&self, pc: &PhysicalConstants) -> f64 {
        2.0 * PI * pc.speed_of_light() / self.wavelength
    }

    /// k1 = 2π/λ1 (1/m).
    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// q = 2·k1 (1/m), the reciprocal-lattice vector of the intensity grating.
    pub fn grating_number(&self) -> f64 {
        2.0 * self.wave_number()
    }

    /// A01 = −ε1·λ1 (V·s/m).
    pub fn vector_potential_amplitude(&self) -> f64 {
        -self.field_amplitude * self.wavelength
    }
}

/// The traveling wave that drives transitions along the sideband ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveSpec {
    field_amplitude: f64,
    angular_frequency: f64,
}

impl TravelingWaveSpec {
    /// `field_amplitude` ε0 in V/m, `angular_frequency` ω in rad/s.
    pub fn new(field_amplitude: f64, angular_frequency: f64) -> Result<Self> {
        Ok(Self {
            field_amplitude: require_non_negative("epsilon0", field_amplitude)?,
            angular_frequency: require_positive("omega", angular_frequency)?,
        })
    }

    /// Convenience constructor from a vacuum wavelength.
    pub fn from_wavelength(
        field_amplitude: f64,
        wavelength: f64,
        pc: &PhysicalConstants,
    ) -> Result<Self> {
        let wavelength = require_positive("wavelength", wavelength)?;
        Self::new(field_amplitude, 2.0 * PI * pc.speed_of_light() / wavelength)
    }

    pub fn field_amplitude(&self) -> f64 {
        self.field_amplitude
    }

    pub fn angular_frequency(&self) -> f64 {
        self.angular_frequency
    }

    /// k = ω/c (1/m).
    pub fn wave_number(&self, pc: &PhysicalConstants) -> f64 {
        self.angular_frequency / pc.speed_of_light()
    }

    /// A02 = −ε0·c/ω (V·s/m).
    pub fn vector_potential_amplitude(&self, pc: &PhysicalConstants) -> f64 {
        -self.field_amplitude * pc.speed_of_light() / self.angular_frequency
    }

    pub fn with_field_amplitude(&self, field_amplitude: f64) -> Result<Self> {
        Self::new(field_amplitude, self.angular_frequency)
    }
}

/// A nonrelativistic electron beam with Gaussian transverse profile and
/// Gaussian longitudinal velocity scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    kinetic_energy: f64,
    total_current: f64,
    width_x: f64,
    width_z: f64,
    mean_velocity: f64,
    velocity_spread: f64,
    momentum: f64,
}

impl BeamSpec {
    /// Builds a beam from its kinetic energy `E` (J); `v0 = √(2mE)/m`.
    pub fn new(
        kinetic_energy: f64,
        total_current: f64,
        width_x: f64,
        width_z: f64,
        velocity_spread: f64,
        pc: &PhysicalConstants,
    ) -> Result<Self> {
        let kinetic_energy = require_positive("kinetic_energy", kinetic_energy)?;
        let momentum = (2.0 * pc.electron_mass() * kinetic_energy).sqrt();
        Self::assemble(
            kinetic_energy,
            total_current,
            width_x,
            width_z,
            momentum / pc.electron_mass(),
            velocity_spread,
            momentum,
            pc,
        )
    }

    /// Builds a beam from a stated mean velocity and energy, rejecting the
    /// pair unless `v0 = √(2mE)/m` to within one part in 10¹².
    #[allow(clippy::too_many_arguments)]
    pub fn with_mean_velocity(
        kinetic_energy: f64,
        total_current: f64,
        width_x: f64,
        width_z: f64,
        mean_velocity: f64,
        velocity_spread: f64,
        pc: &PhysicalConstants,
    ) -> Result<Self> {
        let kinetic_energy = require_positive("kinetic_energy", kinetic_energy)?;
        let mean_velocity = require_positive("mean_velocity", mean_velocity)?;
        let momentum = (2.0 * pc.electron_mass() * kinetic_energy).sqrt();
        let expected = momentum / pc.electron_mass();
        if ((mean_velocity - expected) / expected).abs() > 1e-12 {
            return Err(Error::invalid(
                "mean_velocity",
                mean_velocity,
                "inconsistent with kinetic energy",
            ));
        }
        Self::assemble(
            kinetic_energy,
            total_current,
            width_x,
            width_z,
            mean_velocity,
            velocity_spread,
            momentum,
            pc,
        )
    }

    /// Builds a beam moving at `mean_velocity`, with `E = m·v0²/2`.
    pub fn from_velocity(
        mean_velocity: f64,
        total_current: f64,
        width_x: f64,
        width_z: f64,
        velocity_spread: f64,
        pc: &PhysicalConstants,
    ) -> Result<Self> {
        let mean_velocity = require_positive("mean_velocity", mean_velocity)?;
        let m = pc.electron_mass();
        Self::assemble(
            0.5 * m * mean_velocity * mean_velocity,
            total_current,
            width_x,
            width_z,
            mean_velocity,
            velocity_spread,
            m * mean_velocity,
            pc,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kinetic_energy: f64,
        total_current: f64,
        width_x: f64,
        width_z: f64,
        mean_velocity: f64,
        velocity_spread: f64,
        momentum: f64,
        pc: &PhysicalConstants,
    ) -> Result<Self> {
        let total_current = require_non_negative("total_current", total_current)?;
        let width_x = require_positive("width_x", width_x)?;
        let width_z = require_positive("width_z", width_z)?;
        let velocity_spread = require_non_negative("velocity_spread", velocity_spread)?;
        if mean_velocity >= NONRELATIVISTIC_LIMIT * pc.speed_of_light() {
            return Err(Error::invalid(
                "mean_velocity",
                mean_velocity,
                "beam is relativistic (v0 ≥ 0.1c)",
            ));
        }
        if velocity_spread >= MAX_RELATIVE_SPREAD * mean_velocity {
            return Err(Error::invalid(
                "velocity_spread",
                velocity_spread,
                "must be < 0.1·v0",
            ));
        }
        Ok(Self {
            kinetic_energy,
            total_current,
            width_x,
            width_z,
            mean_velocity,
            velocity_spread,
            momentum,
        })
    }

    /// Same beam with a different velocity scatter `Δv` (m/s).
    pub fn with_velocity_spread(&self, velocity_spread: f64) -> Result<Self> {
        let mut beam = *self;
        let velocity_spread = require_non_negative("velocity_spread", velocity_spread)?;
        if velocity_spread >= MAX_RELATIVE_SPREAD * self.mean_velocity {
            return Err(Error::invalid(
                "velocity_spread",
                velocity_spread,
                "must be < 0.1·v0",
            ));
        }
        beam.velocity_spread = velocity_spread;
        Ok(beam)
    }

    /// Kinetic energy `E` (J).
    pub fn kinetic_energy(&self) -> f64 {
        self.kinetic_energy
    }

    /// Momentum `p0 = √(2mE)` (kg·m/s).
    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    /// Mean velocity `v0` (m/s).
    pub fn mean_velocity(&self) -> f64 {
        self.mean_velocity
    }

    /// Velocity scatter `Δv` (m/s).
    pub fn velocity_spread(&self) -> f64 {
        self.velocity_spread
    }

    /// Total current `I0` (A).
    pub fn total_current(&self) -> f64 {
        self.total_current
    }

    /// Effective beam width along x (m).
    pub fn width_x(&self) -> f64 {
        self.width_x
    }

    /// Effective beam width along z (m).
    pub fn width_z(&self) -> f64 {
        self.width_z
    }
}

/// Set when a small parameter of the perturbative treatment is not small.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegimeFlags {
    /// `η = V0/E ≥ 0.1`.
    pub potential_not_small: bool,
    /// `ρ = ħω/E ≥ 0.1`.
    pub photon_energy_not_small: bool,
}

impl RegimeFlags {
    pub fn is_perturbative(&self) -> bool {
        !(self.potential_not_small || self.photon_energy_not_small)
    }
}

/// Everything the dynamics need, derived once from the specifications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// V0 = (e·A01)²/(2mc²) (J).
    pub effective_potential: f64,
    /// q = 2k1 (1/m).
    pub grating_number: f64,
    /// Γ = (e·ε0/(8ħω))·(V0/E) (1/m).
    pub coupling_rate: f64,
    /// L = 2π·p·v²/(ħω²) at the mean beam velocity (m).
    pub modulation_length: f64,
    /// γ = Γ/q.
    pub dimensionless_coupling: f64,
    /// η = V0/E.
    pub dimensionless_potential: f64,
    /// ρ = ħω/E.
    pub photon_ratio: f64,
    /// Traveling-wave angular frequency ω (rad/s).
    pub angular_frequency: f64,
    /// Traveling-wave number k = ω/c (1/m).
    pub traveling_wave_number: f64,
    /// Beam kinetic energy E (J).
    pub kinetic_energy: f64,
    /// Beam momentum p (kg·m/s).
    pub momentum: f64,
    /// Beam mean velocity v0 (m/s).
    pub velocity: f64,
    pub flags: RegimeFlags,
    pub constants: PhysicalConstants,
}

impl DerivedParams {
    /// Modulation length for an electron moving at `velocity`.
    pub fn modulation_length_at(&self, velocity: f64) -> f64 {
        modulation_length_for_velocity(velocity, self.angular_frequency, &self.constants)
    }

    /// The `eε0/(2ħω)·(V0/E) = 4Γ` prefactor of the monochromatic current.
    pub fn current_prefactor(&self) -> f64 {
        4.0 * self.coupling_rate
    }
}

/// V0 = (e·A01)²/(2mc²), the ponderomotive potential of the standing wave.
pub fn derive_effective_potential(sw: &StandingWaveSpec, pc: &PhysicalConstants) -> f64 {
    let ea = pc.elementary_charge() * sw.vector_potential_amplitude();
    let c = pc.speed_of_light();
    ea * ea / (2.0 * pc.electron_mass() * c * c)
}

/// Derives V0, q, Γ, L and the dimensionless engine parameters.
///
/// Regime violations are reported through [`DerivedParams::flags`] and are
/// never fatal.
pub fn derive_coupling(
    sw: &StandingWaveSpec,
    tw: &TravelingWaveSpec,
    beam: &BeamSpec,
    pc: &PhysicalConstants,
) -> DerivedParams {
    let v0 = derive_effective_potential(sw, pc);
    let q = sw.grating_number();
    let omega = tw.angular_frequency();
    let energy = beam.kinetic_energy();
    let hbar = pc.reduced_planck();
    let eta = v0 / energy;
    let rho = hbar * omega / energy;
    let gamma_rate = pc.elementary_charge() * tw.field_amplitude() / (8.0 * hbar * omega) * eta;
    DerivedParams {
        effective_potential: v0,
        grating_number: q,
        coupling_rate: gamma_rate,
        modulation_length: modulation_length(beam, tw, pc),
        dimensionless_coupling: gamma_rate / q,
        dimensionless_potential: eta,
        photon_ratio: rho,
        angular_frequency: omega,
        traveling_wave_number: tw.wave_number(pc),
        kinetic_energy: energy,
        momentum: beam.momentum(),
        velocity: beam.mean_velocity(),
        flags: RegimeFlags {
            potential_not_small: eta >= PERTURBATIVE_LIMIT,
            photon_energy_not_small: rho >= PERTURBATIVE_LIMIT,
        },
        constants: *pc,
    }
}

/// The length over which the quantum-recoil phase of the first sideband
/// accumulates π: `L = 2π·p·v²/(ħω²) = (8πħ/p)·(E/ħω)²`.
pub fn modulation_length(beam: &BeamSpec, tw: &TravelingWaveSpec, pc: &PhysicalConstants) -> f64 {
    let p = beam.momentum();
    let v = beam.mean_velocity();
    let omega = tw.angular_frequency();
    2.0 * PI * p * v * v / (pc.reduced_planck() * omega * omega)
}

/// [`modulation_length`] for an electron at `velocity`: `2π·m·v³/(ħω²)`.
pub fn modulation_length_for_velocity(velocity: f64, omega: f64, pc: &PhysicalConstants) -> f64 {
    2.0 * PI * pc.electron_mass() * velocity * velocity * velocity
        / (pc.reduced_planck() * omega * omega)
}

/// Exact sideband momenta `p_n = √(p0² + 2m·n·ħω)` for `|n| ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumLadder {
    n_max: usize,
    momenta: Vec<f64>,
    mass: f64,
    omega: f64,
}

impl MomentumLadder {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `p_n`; panics when `|n| > n_max`.
    pub fn get(&self, n: i32) -> f64 {
        self.momenta[self.slot(n)]
    }

    /// All momenta, ordered from `n = −n_max` to `n = +n_max`.
    pub fn as_slice(&self) -> &[f64] {
        &self.momenta
    }

    /// `(p_{n+1} − p_n)/ħ` (1/m), evaluated without cancellation as
    /// `2mω/(p_{n+1} + p_n)`.
    pub fn step_wavenumber(&self, n: i32) -> f64 {
        2.0 * self.mass * self.omega / (self.get(n + 1) + self.get(n))
    }

    fn slot(&self, n: i32) -> usize {
        let idx = n + self.n_max as i32;
        assert!(
            idx >= 0 && (idx as usize) < self.momenta.len(),
            "ladder index {n} outside ±{}",
            self.n_max
        );
        idx as usize
    }
}

/// Builds the exact momentum ladder of the beam in the traveling wave.
pub fn momentum_ladder(
    beam: &BeamSpec,
    tw: &TravelingWaveSpec,
    pc: &PhysicalConstants,
    n_max: usize,
) -> Result<MomentumLadder> {
    ladder_from(beam.momentum(), tw.angular_frequency(), pc, n_max)
}

pub(crate) fn ladder_from(
    p0: f64,
    omega: f64,
    pc: &PhysicalConstants,
    n_max: usize,
) -> Result<MomentumLadder> {
    let m = pc.electron_mass();
    let quantum = 2.0 * m * pc.reduced_planck() * omega;
    let p0_sq = p0 * p0;
    let reach = n_max as i32;
    let mut momenta = Vec::with_capacity(2 * n_max + 1);
    for n in -reach..=reach {
        if n == 0 {
            momenta.push(p0);
            continue;
        }
        let radicand = p0_sq + f64::from(n) * quantum;
        if radicand <= 0.0 {
            return Err(Error::LadderUnderflow { index: n, radicand });
        }
        momenta.push(radicand.sqrt());
    }
    Ok(MomentumLadder {
        n_max,
        momenta,
        mass: m,
        omega,
    })
}

/// `D±1 = ω/v − q ∓ π/L(v)` (1/m), with the modulation length evaluated at
/// `velocity`. Requires `velocity > 0`.
pub fn detuning(velocity: f64, dp: &DerivedParams, branch: Branch) -> f64 {
    debug_assert!(velocity > 0.0);
    let recoil = PI / dp.modulation_length_at(velocity);
    dp.angular_frequency / velocity - dp.grating_number - branch.signum() * recoil
}

const RESONANCE_MAX_ITERATIONS: usize = 200;
const RESONANCE_REL_TOL: f64 = 1e-12;

/// Solves `ω/v = q ± π/L(v)` for the beam velocity at which the given
/// branch is phase matched.
///
/// `L` depends on `v`, so this is a one-dimensional fixed point solved by
/// relaxed iteration starting from the classical value `ω/q`.
pub fn resonance_velocity(dp: &DerivedParams, branch: Branch) -> Result<f64> {
    let omega = dp.angular_frequency;
    let q = dp.grating_number;
    let sign = branch.signum();
    let map = |v: f64| -> Result<f64> {
        let denom = q + sign * PI / dp.modulation_length_at(v);
        if denom > 0.0 && denom.is_finite() {
            Ok(omega / denom)
        } else {
            Err(Error::NoResonance {
                branch: branch.sign(),
                reason: "q ± π/L is not positive",
            })
        }
    };

    let mut v = omega / q;
    let mut relax = 1.0;
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    for _ in 0..RESONANCE_MAX_ITERATIONS {
        let step = map(v)? - v;
        if step.abs() > last_step {
            relax *= 0.5;
        }
        last_step = step.abs();
        v += relax * step;
        if !(v.is_finite() && v > 0.0) {
            break;
        }
        if (step / v).abs() <= RESONANCE_REL_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoResonance {
            branch: branch.sign(),
            reason: "fixed-point iteration did not converge",
        });
    }
    if v >= NONRELATIVISTIC_LIMIT * dp.constants.speed_of_light() {
        return Err(Error::NoResonance {
            branch: branch.sign(),
            reason: "resonant velocity violates the nonrelativistic guard",
        });
    }
    Ok(v)
}

/// A fully specified configuration: both waves, the beam and its derived
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub standing: StandingWaveSpec,
    pub traveling: TravelingWaveSpec,
    pub beam: BeamSpec,
    pub constants: PhysicalConstants,
    pub derived: DerivedParams,
}

impl Interaction {
    pub fn new(standing: StandingWaveSpec, traveling: TravelingWaveSpec, beam: BeamSpec) -> Self {
        let constants = PhysicalConstants::CODATA_2018;
        Self {
            standing,
            traveling,
            beam,
            constants,
            derived: derive_coupling(&standing, &traveling, &beam, &constants),
        }
    }

    pub fn with_beam(&self, beam: BeamSpec) -> Self {
        Self::new(self.standing, self.traveling, beam)
    }

    pub fn with_traveling(&self, traveling: TravelingWaveSpec) -> Self {
        Self::new(self.standing, traveling, self.beam)
    }

    /// Same waves and beam geometry, beam velocity moved onto the resonance
    /// of `branch`. The relative velocity spread is preserved.
    pub fn tuned_to(&self, branch: Branch) -> Result<Self> {
        let v = resonance_velocity(&self.derived, branch)?;
        let relative_spread = self.beam.velocity_spread() / self.beam.mean_velocity();
        let beam = BeamSpec::from_velocity(
            v,
            self.beam.total_current(),
            self.beam.width_x(),
            self.beam.width_z(),
            relative_spread * v,
            &self.constants,
        )?;
        Ok(self.with_beam(beam))
    }

    pub fn ladder(&self, n_max: usize) -> Result<MomentumLadder> {
        momentum_ladder(&self.beam, &self.traveling, &self.constants, n_max)
    }
}
