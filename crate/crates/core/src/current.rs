//! Space-time current density of a monochromatic beam.
//!
//! The modulated part depends on `y`, `z` and `t` only; the transverse
//! coordinate `x` enters solely through the Gaussian envelope `j0(x, z)`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::AmplitudeState;
use crate::error::{Error, Result};
use crate::model::{detuning, BeamSpec, Branch, DerivedParams, Interaction};
use crate::sinc::half_angle_sinc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamProfile {
    pub total_current: f64,
    pub width_x: f64,
    pub width_z: f64,
}

impl BeamProfile {
    pub fn new(total_current: f64, width_x: f64, width_z: f64) -> Result<Self> {
        if !(total_current >= 0.0 && total_current.is_finite()) {
            return Err(Error::invalid(
                "total_current",
                total_current,
                "must be ≥ 0",
            ));
        }
        for (name, w) in [("width_x", width_x), ("width_z", width_z)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(name, w, "must be > 0"));
            }
        }
        Ok(Self {
            total_current,
            width_x,
            width_z,
        })
    }

    /// Peak density `I0/(πab)` (A/m²).
    pub fn on_axis_density(&self) -> f64 {
        self.total_current / (PI * self.width_x * self.width_z)
    }
}

impl From<&BeamSpec> for BeamProfile {
    fn from(beam: &BeamSpec) -> Self {
        Self {
            total_current: beam.total_current(),
            width_x: beam.width_x(),
            width_z: beam.width_z(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub fn on_axis(y: f64, t: f64) -> Self {
        Self {
            x: 0.0,
            y,
            z: 0.0,
            t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    pub point: SpaceTimePoint,
    /// Current density `j` (A/m²).
    pub j: f64,
    /// Unmodulated density `j0(x, z)` (A/m²).
    pub j0: f64,
    /// `j/j0 − 1`, computed directly from the modulation term.
    pub relative_modulation: f64,
    /// `j < 0`: the first-order formula has been pushed outside its validity.
    pub regime_violation: bool,
}

/// `j0 = I0/(πab)·exp(−x²/a² − z²/b²)`.
pub fn beam_profile_j0(profile: &BeamProfile, x: f64, z: f64) -> f64 {
    let u = x / profile.width_x;
    let w = z / profile.width_z;
    profile.on_axis_density() * (-(u * u) - w * w).exp()
}

/// `φ = ωt − qy − kz − (V0/2E)·sin qy`.
pub fn phase_phi(point: &SpaceTimePoint, dp: &DerivedParams) -> f64 {
    let qy = dp.grating_number * point.y;
    dp.angular_frequency * point.t
        - qy
        - dp.traveling_wave_number * point.z
        - 0.5 * dp.dimensionless_potential * qy.sin()
}

/// The two first-sideband terms of the monochromatic modulation at `y`,
/// as complex phasors: `relative_modulation = −4Γ·Re{e^{iφ}·Z}` with
/// `Z = S₊e^{−iD₊y/2} − S₋e^{−iD₋y/2}` and `S = sin(Dy/2)/D`.
pub(crate) fn monochromatic_phasor(y: f64, velocity: f64, dp: &DerivedParams) -> Complex64 {
    let term = |branch: Branch| {
        let d = detuning(velocity, dp, branch);
        Complex64::from_polar(half_angle_sinc(d, y), -0.5 * d * y)
    };
    term(Branch::Absorption) - term(Branch::Emission)
}

/// `j = j0·[1 − 4Γ·(S₊cos(φ − D₊y/2) − S₋cos(φ − D₋y/2))]` with
/// `4Γ = (eε0/2ħω)(V0/E)` and detunings at the mean beam velocity.
pub fn current_density(point: &SpaceTimePoint, interaction: &Interaction) -> CurrentSample {
    let dp = &interaction.derived;
    let j0 = beam_profile_j0(&BeamProfile::from(&interaction.beam), point.x, point.z);
    let phasor = monochromatic_phasor(point.y, dp.velocity, dp);
    let rotated = Complex64::from_polar(1.0, phase_phi(point, dp)) * phasor;
    let modulation = dp.current_prefactor() * rotated.re;
    CurrentSample {
        point: *point,
        j: j0 * (1.0 - modulation),
        j0,
        relative_modulation: -modulation,
        regime_violation: modulation > 1.0,
    }
}

/// Peak of `|j/j0 − 1|` over one optical period at `y`, from the closed
/// envelope `4Γ·√(S₊² + S₋² − 2S₊S₋·cos((D₊ − D₋)y/2))`.
pub fn modulation_depth(y: f64, interaction: &Interaction) -> f64 {
    let dp = &interaction.derived;
    dp.current_prefactor() * monochromatic_phasor(y, dp.velocity, dp).norm()
}

/// [`modulation_depth`] by brute force: `samples` equally spaced times over
/// one period, on axis.
pub fn modulation_depth_scan(y: f64, interaction: &Interaction, samples: usize) -> f64 {
    let period = 2.0 * PI / interaction.derived.angular_frequency;
    (0..samples)
        .map(|i| {
            let t = period * i as f64 / samples as f64;
            current_density(&SpaceTimePoint::on_axis(y, t), interaction)
                .relative_modulation
                .abs()
        })
        .fold(0.0, f64::max)
}

/// `j/j0` rebuilt from sideband amplitudes as `|Σ_n a_n·e^{i(θ_n − θ_0)}|²`,
/// `θ_n = S_n(y)/ħ + n(kz − ωt)` with first-order semiclassical phases.
///
/// Independent of the closed form used by [`current_density`]; with the
/// first-order amplitudes signed `a₊₁ = −A₊`, `a₋₁ = +A₋` the two agree to
/// first order in the coupling near resonance.
pub fn interference_current(
    point: &SpaceTimePoint,
    state: &AmplitudeState,
    interaction: &Interaction,
) -> Result<f64> {
    let dp = &interaction.derived;
    let reach = state.n_max() as i32;
    let ladder = interaction.ladder(state.n_max())?;
    let m = interaction.constants.electron_mass();
    let hbar = interaction.constants.reduced_planck();
    let qy = dp.grating_number * point.y;
    let wave = dp.traveling_wave_number * point.z - dp.angular_frequency * point.t;
    let mut psi = Complex64::default();
    for n in -reach..=reach {
        // (p_n − p_0)·y/ħ summed link by link to avoid cancellation
        let kinetic: f64 = if n >= 0 {
            (0..n).map(|k| ladder.step_wavenumber(k)).sum()
        } else {
            -(n..0).map(|k| ladder.step_wavenumber(k)).sum::<f64>()
        };
        let p_n = ladder.get(n);
        let p_0 = ladder.get(0);
        let potential = -(m * dp.effective_potential / (hbar * dp.grating_number))
            * (1.0 / p_n - 1.0 / p_0)
            * qy.sin();
        let relative = kinetic * point.y + potential + f64::from(n) * wave;
        psi += state.get(n) * Complex64::from_polar(1.0, relative);
    }
    Ok(psi.norm_sqr())
}
