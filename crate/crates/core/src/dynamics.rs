//! Sideband amplitude ladder `a_n(y)`.
//!
//! The amplitudes obey the nearest-neighbour system
//!
//! ```text
//! da_n/dŷ = −γ·[ a_{n+1}·e^{iκ_n ŷ}·P(ŷ) − a_{n−1}·e^{−iκ_{n−1} ŷ}·P*(ŷ) ]
//! ```
//!
//! with `ŷ = q·y`, `γ = Γ/q` and `κ_n = ((p_{n+1} − p_n)/ħ − q)/q` built from
//! the exact ladder momenta. `P = 1` for [`RhsVariant::Simplified`] and
//! `P = exp(i(V0/4E)·sin ŷ)` for [`RhsVariant::Full`]. Every link couples
//! `a_n` and `a_{n+1}` anti-Hermitically, so `Σ|a_n|²` is conserved.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Branch, Interaction, MomentumLadder};
use crate::ode::DormandPrince;
use crate::quadrature::{self, Adaptive};
use crate::sinc::half_angle_sinc;

/// Boundary occupation above which the hard-wall truncation is reported.
pub const TRUNCATION_WARNING_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsVariant {
    /// Phase factors `exp(±i(V0/4E)·sin qy)` kept on both couplings.
    Full,
    /// Only the resonant first-harmonic coupling.
    #[default]
    Simplified,
}

/// Ladder truncation and integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderConfig {
    /// Amplitudes are kept for `|n| ≤ n_max`; `a_{±(n_max+1)} = 0`.
    pub n_max: usize,
    pub rhs_variant: RhsVariant,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest allowed step in `ŷ`.
    pub max_step: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            n_max: 4,
            rhs_variant: RhsVariant::Simplified,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
        }
    }
}

impl LadderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", self.n_max as f64, "must be ≥ 1"));
        }
        for (name, tol) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::invalid(name, tol, "must lie in (0, 1e-3]"));
            }
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid("max_step", self.max_step, "must be > 0"));
        }
        Ok(())
    }
}

/// Sideband amplitudes at one dimensionless position `ŷ = q·y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub position: f64,
    amplitudes: Vec<Complex64>,
}

impl AmplitudeState {
    /// `a_0 = 1`, all other amplitudes zero, at `ŷ = 0`.
    pub fn initial(n_max: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); 2 * n_max + 1];
        amplitudes[n_max] = Complex64::new(1.0, 0.0);
        Self {
            position: 0.0,
            amplitudes,
        }
    }

    /// `amplitudes` ordered from `n = −n_max` to `n = +n_max`.
    pub fn new(position: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len().is_multiple_of(2) || amplitudes.len() < 3 {
            return Err(Error::invalid(
                "amplitudes",
                amplitudes.len() as f64,
                "length must be 2·n_max + 1 with n_max ≥ 1",
            ));
        }
        if !position.is_finite() || amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        Ok(Self {
            position,
            amplitudes,
        })
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() / 2
    }

    /// `a_n`; panics when `|n| > n_max`.
    pub fn get(&self, n: i32) -> Complex64 {
        let idx = n + self.n_max() as i32;
        assert!(idx >= 0 && (idx as usize) < self.amplitudes.len());
        self.amplitudes[idx as usize]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ_n |a_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn boundary_occupation(&self) -> f64 {
        let last = self.amplitudes.len() - 1;
        self.amplitudes[0]
            .norm_sqr()
            .max(self.amplitudes[last].norm_sqr())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub trajectory: Vec<AmplitudeState>,
    /// `max |Σ|a_n|² − Σ|a_n(ŷ₀)|²|` over the trajectory.
    pub norm_drift: f64,
    /// Accepted integrator steps.
    pub step_count: usize,
    /// Largest `|a_{±n_max}|²` seen on the trajectory.
    pub boundary_occupation: f64,
}

impl EvolutionResult {
    /// True when the outermost sidebands are populated enough for the hard
    /// wall at `±(n_max + 1)` to matter.
    pub fn truncation_warning(&self) -> bool {
        self.boundary_occupation >= TRUNCATION_WARNING_LEVEL
    }

    pub fn last(&self) -> Option<&AmplitudeState> {
        self.trajectory.last()
    }
}

/// Link data for the ladder: `κ_n` for `n = −n_max … n_max − 1`.
#[derive(Debug, Clone)]
struct Couplings {
    gamma: f64,
    detunings: Vec<f64>,
    phase_depth: Option<f64>,
}

impl Couplings {
    fn new(cfg: &LadderConfig, interaction: &Interaction) -> Result<Self> {
        let ladder = interaction.ladder(cfg.n_max)?;
        Ok(Self::from_ladder(&ladder, cfg, interaction))
    }

    fn from_ladder(ladder: &MomentumLadder, cfg: &LadderConfig, interaction: &Interaction) -> Self {
        let dp = &interaction.derived;
        let q = dp.grating_number;
        let reach = ladder.n_max() as i32;
        let detunings = (-reach..reach)
            .map(|n| (ladder.step_wavenumber(n) - q) / q)
            .collect();
        let phase_depth = match cfg.rhs_variant {
            RhsVariant::Simplified => None,
            RhsVariant::Full => Some(0.25 * dp.dimensionless_potential),
        };
        Self {
            gamma: dp.dimensionless_coupling,
            detunings,
            phase_depth,
        }
    }

    fn derivative(&self, y: f64, a: &[Complex64], da: &mut [Complex64]) {
        da.fill(Complex64::default());
        if self.gamma == 0.0 {
            return;
        }
        let extra = self.phase_depth.map_or(0.0, |depth| depth * y.sin());
        for (link, &kappa) in self.detunings.iter().enumerate() {
            let w = Complex64::from_polar(self.gamma, kappa * y + extra);
            da[link] -= a[link + 1] * w;
            da[link + 1] += a[link] * w.conj();
        }
    }
}

/// `da_n/dŷ` for `state`.
pub fn rhs(
    state: &AmplitudeState,
    cfg: &LadderConfig,
    interaction: &Interaction,
) -> Result<Vec<Complex64>> {
    if state.n_max() != cfg.n_max {
        return Err(Error::invalid(
            "n_max",
            state.n_max() as f64,
            "state does not match ladder configuration",
        ));
    }
    let couplings = Couplings::new(cfg, interaction)?;
    let mut out = vec![Complex64::default(); state.amplitudes.len()];
    couplings.derivative(state.position, &state.amplitudes, &mut out);
    Ok(out)
}

/// Integrates the ladder from `initial.position` to `end` (both in `ŷ`),
/// sampling the state at `output_positions` by dense interpolation.
pub fn evolve(
    initial: &AmplitudeState,
    end: f64,
    cfg: &LadderConfig,
    interaction: &Interaction,
    output_positions: &[f64],
) -> Result<EvolutionResult> {
    cfg.validate()?;
    if initial.n_max() != cfg.n_max {
        return Err(Error::invalid(
            "n_max",
            initial.n_max() as f64,
            "initial state does not match ladder configuration",
        ));
    }
    let start = initial.position;
    if !(end > start) {
        return Err(Error::invalid(
            "end",
            end,
            "must exceed the initial position",
        ));
    }
    if output_positions.windows(2).any(|w| !(w[1] > w[0]))
        || output_positions.iter().any(|&y| !(y >= start && y <= end))
    {
        return Err(Error::invalid(
            "output_positions",
            f64::NAN,
            "must be strictly increasing inside [start, end]",
        ));
    }

    let couplings = Couplings::new(cfg, interaction)?;
    let solver = DormandPrince {
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        max_step: cfg.max_step,
        ..DormandPrince::default()
    };
    let solution = solver.integrate(
        |y, a, da| couplings.derivative(y, a, da),
        start,
        &initial.amplitudes,
        end,
        output_positions,
    )?;

    let norm0 = initial.norm_sqr();
    let mut norm_drift = 0.0f64;
    let mut boundary = initial.boundary_occupation();
    let trajectory: Vec<AmplitudeState> = solution
        .samples
        .into_iter()
        .map(|(position, amplitudes)| {
            let state = AmplitudeState {
                position,
                amplitudes,
            };
            norm_drift = norm_drift.max((state.norm_sqr() - norm0).abs());
            boundary = boundary.max(state.boundary_occupation());
            state
        })
        .collect();
    if let Some(bad) = trajectory
        .iter()
        .find(|s| s.amplitudes.iter().any(|a| !a.is_finite()))
    {
        return Err(Error::NonFinite {
            position: bad.position,
        });
    }
    Ok(EvolutionResult {
        trajectory,
        norm_drift,
        step_count: solution.accepted_steps,
        boundary_occupation: boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkbMethod {
    /// Adaptive quadrature of the action integral.
    ExactQuadrature,
    /// First order in `V0/E_n`.
    FirstOrder,
}

/// Semiclassical phase `(1/ħ)∫₀^y √(p_n² − 2mV0·cos qy′) dy′` of sideband `n`
/// at `y ≥ 0` (m).
pub fn wkb_phase(y: f64, n: i32, interaction: &Interaction, method: WkbMethod) -> Result<f64> {
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::invalid("y", y, "must be finite and ≥ 0"));
    }
    let pc = &interaction.constants;
    let dp = &interaction.derived;
    let hbar = pc.reduced_planck();
    let m = pc.electron_mass();
    let q = dp.grating_number;
    let p_n = interaction.ladder(n.unsigned_abs() as usize)?.get(n);
    let barrier = 2.0 * m * dp.effective_potential;
    // the potential peaks at y′ = 0, which is always inside [0, y]
    if p_n * p_n - barrier <= 0.0 {
        return Err(Error::TurningPoint {
            position: 0.0,
            radicand: p_n * p_n - barrier,
        });
    }
    let free = p_n * y / hbar;
    let scale = p_n / (hbar * q);
    let u_end = q * y;

    match method {
        WkbMethod::FirstOrder => {
            // (V0/2E_n)·p_n/(ħq) with E_n = p_n²/2m
            let amplitude = m * dp.effective_potential / (p_n * hbar * q);
            Ok(free - amplitude * u_end.sin())
        }
        WkbMethod::ExactQuadrature => {
            let beta = barrier / (p_n * p_n);
            if beta == 0.0 || y == 0.0 {
                return Ok(free);
            }
            // √(1 − β·cos u) − 1 without cancellation
            let deviation = |u: f64| {
                let c = beta * u.cos();
                -c / ((1.0 - c).sqrt() + 1.0)
            };
            let tol = Adaptive {
                abs_tol: 0.0,
                rel_tol: 1e-12,
                max_intervals: 10_000,
            };
            let period = 2.0 * core::f64::consts::PI;
            let whole = (u_end / period).floor();
            let rest = u_end - whole * period;
            let per_period = if whole > 0.0 {
                quadrature::integrate(deviation, 0.0, period, &tol)?.value
            } else {
                0.0
            };
            let tail = quadrature::integrate(deviation, 0.0, rest, &tol)?.value;
            Ok(free + scale * (whole * per_period + tail))
        }
    }
}

/// First-order amplitude of a first sideband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderAmplitude {
    pub amplitude: Complex64,
    /// `q·y < 10`: the instantaneous turn-on assumption (`Lq ≫ 1`) is
    /// questionable this close to the entrance.
    pub short_interaction: bool,
}

/// Wavenumber mismatch `(p − p±1 ± ħq)/ħ` (1/m) with exact ladder momenta.
pub fn exact_mismatch(branch: Branch, interaction: &Interaction) -> Result<f64> {
    let ladder = interaction.ladder(1)?;
    let q = interaction.derived.grating_number;
    Ok(match branch {
        Branch::Absorption => q - ladder.step_wavenumber(0),
        Branch::Emission => ladder.step_wavenumber(-1) - q,
    })
}

/// Closed-form first-order amplitude after an instantaneous turn-on at
/// `y = 0`:
///
/// `(eε0/4ħω)(V0/E)·exp(iXy/2)·sin(Xy/2)/X`, `X = (p − p±1 ± ħq)/ħ`.
///
/// This is the magnitude-and-phase factor common to both branches. Solving
/// the ladder equations to first order gives `a₊₁ = +value` and
/// `a₋₁ = −value`.
pub fn perturbative_a_pm1(
    y: f64,
    branch: Branch,
    interaction: &Interaction,
) -> Result<FirstOrderAmplitude> {
    let x = exact_mismatch(branch, interaction)?;
    let gamma = interaction.derived.coupling_rate;
    let amplitude = Complex64::from_polar(2.0 * gamma * half_angle_sinc(x, y), 0.5 * x * y);
    Ok(FirstOrderAmplitude {
        amplitude,
        short_interaction: interaction.derived.grating_number * y < 10.0,
    })
}

/// `|a₊₁(y)| / |a₋₁(y)|` from the first-order closed form; `+∞` when
/// `|a₋₁| < 1e-30`.
pub fn asymmetry_ratio(y: f64, interaction: &Interaction) -> Result<f64> {
    let up = perturbative_a_pm1(y, Branch::Absorption, interaction)?
        .amplitude
        .norm();
    let down = perturbative_a_pm1(y, Branch::Emission, interaction)?
        .amplitude
        .norm();
    if down < 1e-30 {
        Ok(f64::INFINITY)
    } else {
        Ok(up / down)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ELECTRON_VOLT;
    use crate::model::{BeamSpec, StandingWaveSpec, TravelingWaveSpec};
    use crate::PhysicalConstants;

    fn strong() -> Interaction {
        let pc = PhysicalConstants::CODATA_2018;
        let sw = StandingWaveSpec::new(1e9, 532e-9).unwrap();
        let tw = TravelingWaveSpec::from_wavelength(1e9, 10.6e-6, &pc).unwrap();
        let beam = BeamSpec::new(200.0 * ELECTRON_VOLT, 1e-6, 1e-4, 1e-4, 0.0, &pc).unwrap();
        Interaction::new(sw, tw, beam)
    }

    #[test]
    fn zero_coupling_gives_zero_derivative() {
        let r = strong();
        let r = r.with_traveling(r.traveling.with_field_amplitude(0.0).unwrap());
        let state = AmplitudeState::new(3.0, vec![Complex64::new(0.1, 0.2); 9]).unwrap();
        let d = rhs(&state, &LadderConfig::default(), &r).unwrap();
        assert!(d.iter().all(|z| *z == Complex64::default()));
    }

    #[test]
    fn ground_state_feeds_only_first_sidebands() {
        let r = strong();
        let cfg = LadderConfig::default();
        let mut state = AmplitudeState::initial(cfg.n_max);
        state.position = 1.7;
        let d = rhs(&state, &cfg, &r).unwrap();
        let gamma = r.derived.dimensionless_coupling;
        for n in -4..=4i32 {
            let v = d[(n + 4) as usize];
            if n.abs() == 1 {
                assert!((v.norm() - gamma).abs() < 1e-15 * gamma);
            } else {
                assert_eq!(v, Complex64::default());
            }
        }
        // a₊₁ grows as +γ·e^{iθ}, a₋₁ as −γ·e^{iθ′}: at ŷ = 0 the phases vanish
        state.position = 0.0;
        let d = rhs(&state, &cfg, &r).unwrap();
        assert!((d[5] - Complex64::new(gamma, 0.0)).norm() < 1e-15 * gamma);
        assert!((d[3] + Complex64::new(gamma, 0.0)).norm() < 1e-15 * gamma);
    }

    #[test]
    fn full_variant_reduces_to_simplified_without_potential() {
        let pc = PhysicalConstants::CODATA_2018;
        let r = strong();
        let r = Interaction::new(
            StandingWaveSpec::new(0.0, 532e-9).unwrap(),
            r.traveling,
            r.beam,
        );
        let _ = pc;
        let state =
            AmplitudeState::new(2.2, (0..9).map(|k| Complex64::new(k as f64, 1.0)).collect())
                .unwrap();
        let full = LadderConfig {
            rhs_variant: RhsVariant::Full,
            ..Default::default()
        };
        assert_eq!(
            rhs(&state, &full, &r).unwrap(),
            rhs(&state, &LadderConfig::default(), &r).unwrap()
        );
    }

    #[test]
    fn config_validation() {
        let bad = [
            LadderConfig {
                n_max: 0,
                ..Default::default()
            },
            LadderConfig {
                abs_tol: 0.0,
                ..Default::default()
            },
            LadderConfig {
                rel_tol: 1e-2,
                ..Default::default()
            },
            LadderConfig {
                max_step: -1.0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(LadderConfig::default().validate().is_ok());
    }

    #[test]
    fn evolve_rejects_bad_outputs() {
        let r = strong();
        let cfg = LadderConfig::default();
        let init = AmplitudeState::initial(4);
        assert!(evolve(&init, 10.0, &cfg, &r, &[2.0, 1.0]).is_err());
        assert!(evolve(&init, 10.0, &cfg, &r, &[11.0]).is_err());
        assert!(evolve(&init, 0.0, &cfg, &r, &[]).is_err());
    }

    #[test]
    fn wkb_free_particle_and_origin() {
        let r = strong();
        let r = Interaction::new(
            StandingWaveSpec::new(0.0, 532e-9).unwrap(),
            r.traveling,
            r.beam,
        );
        let hbar = r.constants.reduced_planck();
        for n in [-2, 0, 3] {
            let p_n = r.ladder(3).unwrap().get(n);
            let y = 3.7e-6;
            for method in [WkbMethod::ExactQuadrature, WkbMethod::FirstOrder] {
                assert_eq!(wkb_phase(y, n, &r, method).unwrap(), p_n * y / hbar);
                assert_eq!(wkb_phase(0.0, n, &r, method).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn wkb_turning_point() {
        let pc = PhysicalConstants::CODATA_2018;
        let r = strong();
        // V0 of ~280 eV against a 200 eV beam
        let sw = StandingWaveSpec::new(3.2e10, 532e-9).unwrap();
        let r = Interaction::new(sw, r.traveling, r.beam);
        assert!(r.derived.effective_potential > r.beam.kinetic_energy());
        let _ = pc;
        let err = wkb_phase(1e-6, 0, &r, WkbMethod::ExactQuadrature).unwrap_err();
        assert!(matches!(err, Error::TurningPoint { .. }));
    }

    #[test]
    fn perturbative_amplitude_limits() {
        let r = strong();
        for branch in Branch::BOTH {
            let a = perturbative_a_pm1(0.0, branch, &r).unwrap();
            assert_eq!(a.amplitude, Complex64::default());
            assert!(a.short_interaction);
        }
        // resonance: |a| = Γ·y
        let tuned = r.tuned_to(Branch::Absorption).unwrap();
        let y = 1e-4;
        let a = perturbative_a_pm1(y, Branch::Absorption, &tuned)
            .unwrap()
            .amplitude;
        let expected = tuned.derived.coupling_rate * y;
        assert!((a.norm() - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn asymmetry_tends_to_one_near_entrance() {
        let tuned = strong().tuned_to(Branch::Absorption).unwrap();
        let y = 1e-6 * tuned.derived.modulation_length;
        let ratio = asymmetry_ratio(y, &tuned).unwrap();
        assert!((ratio - 1.0).abs() < 1e-5);
    }
}
