//! Averaging the modulated current over a Gaussian velocity spread.
//!
//! For each branch
//!
//! ```text
//! f±1(y) = 2 ∫ F(v)·sin(D±1(v)·y/2)/D±1(v)·exp(−i·D±1(v)·y/2) dv
//! ```
//!
//! where `F(v) = exp(−(v − v0)²/Δv²)/(√π·Δv)` and `D±1(v)` carries the
//! velocity dependence of both `ω/v` and `π/L(v)`. The averaged current is
//! `j = j0·[1 − (eε0/4ħω)(V0/E)·Re{e^{iφ}(f₊₁ − f₋₁)}]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::current::{beam_profile_j0, phase_phi, BeamProfile, SpaceTimePoint};
use crate::error::{Error, Result};
use crate::model::{detuning, BeamSpec, Branch, DerivedParams, Interaction, MAX_RELATIVE_SPREAD};
use crate::quadrature::{integrate_complex, Adaptive, GaussHermite};
use crate::sinc::half_angle_sinc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDistribution {
    mean: f64,
    spread: f64,
}

impl VelocityDistribution {
    /// Gaussian with mean `v0` and scatter `Δv` (both m/s), `Δv < 0.1·v0`.
    pub fn new(mean: f64, spread: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::invalid("mean_velocity", mean, "must be > 0"));
        }
        if !(spread >= 0.0 && spread < MAX_RELATIVE_SPREAD * mean) {
            return Err(Error::invalid(
                "velocity_spread",
                spread,
                "must lie in [0, 0.1·v0)",
            ));
        }
        Ok(Self { mean, spread })
    }

    pub fn from_beam(beam: &BeamSpec) -> Self {
        Self {
            mean: beam.mean_velocity(),
            spread: beam.velocity_spread(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// `F(v)`; only meaningful for `Δv > 0`.
    pub fn density(&self, v: f64) -> f64 {
        let s = (v - self.mean) / self.spread;
        (-s * s).exp() / (PI.sqrt() * self.spread)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureScheme {
    AdaptiveGaussKronrod { rel_tol: f64, max_intervals: usize },
    GaussHermite { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    /// Integration range `v0 ± halfwidth·Δv` for the adaptive scheme.
    pub halfwidth: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::AdaptiveGaussKronrod {
                rel_tol: 1e-10,
                max_intervals: 20_000,
            },
            halfwidth: 8.0,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss_hermite(nodes: usize) -> Self {
        Self {
            scheme: QuadratureScheme::GaussHermite { nodes },
            ..Self::default()
        }
    }

    pub fn adaptive(rel_tol: f64) -> Self {
        Self {
            scheme: QuadratureScheme::AdaptiveGaussKronrod {
                rel_tol,
                max_intervals: 20_000,
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.scheme {
            QuadratureScheme::AdaptiveGaussKronrod {
                rel_tol,
                max_intervals,
            } => {
                if !(rel_tol > 0.0 && rel_tol <= 1e-4) {
                    return Err(Error::invalid("rel_tol", rel_tol, "must lie in (0, 1e-4]"));
                }
                if max_intervals == 0 {
                    return Err(Error::invalid("max_intervals", 0.0, "must be > 0"));
                }
            }
            QuadratureScheme::GaussHermite { nodes } => {
                if nodes < 16 {
                    return Err(Error::invalid("node_count", nodes as f64, "must be ≥ 16"));
                }
            }
        }
        if !(self.halfwidth > 0.0 && self.halfwidth.is_finite()) {
            return Err(Error::invalid(
                "integration_halfwidth",
                self.halfwidth,
                "must be > 0",
            ));
        }
        Ok(())
    }
}

/// `2·sin(D·y/2)/D·exp(−iDy/2)` for an electron at `velocity`.
pub fn monochromatic_f(y: f64, velocity: f64, branch: Branch, dp: &DerivedParams) -> Complex64 {
    let d = detuning(velocity, dp, branch);
    Complex64::from_polar(2.0 * half_angle_sinc(d, y), -0.5 * d * y)
}

/// Velocity-averaged `f±1(y)`.
pub fn f_pm1(
    y: f64,
    branch: Branch,
    dist: &VelocityDistribution,
    dp: &DerivedParams,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    quad.validate()?;
    let v0 = dist.mean;
    let dv = dist.spread;
    if dv == 0.0 {
        return Ok(monochromatic_f(y, v0, branch, dp));
    }
    let g = |s: f64| monochromatic_f(y, v0 + dv * s, branch, dp);
    let sum = match quad.scheme {
        QuadratureScheme::AdaptiveGaussKronrod {
            rel_tol,
            max_intervals,
        } => {
            let tol = Adaptive {
                // |g| ≤ |y|, so this floor is a relative accuracy on the
                // scale of the unaveraged integrand
                abs_tol: 1e-2 * rel_tol * y.abs(),
                rel_tol,
                max_intervals,
            };
            let h = quad.halfwidth;
            integrate_complex(|s| g(s) * (-s * s).exp(), -h, h, &tol)?.value
        }
        QuadratureScheme::GaussHermite { nodes } => GaussHermite::new(nodes).apply(g),
    };
    Ok(sum / PI.sqrt())
}

/// Both averaged first-sideband factors at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityAverage {
    pub y: f64,
    pub f_plus: Complex64,
    pub f_minus: Complex64,
}

impl VelocityAverage {
    pub fn compute(
        y: f64,
        dist: &VelocityDistribution,
        dp: &DerivedParams,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        Ok(Self {
            y,
            f_plus: f_pm1(y, Branch::Absorption, dist, dp, quad)?,
            f_minus: f_pm1(y, Branch::Emission, dist, dp, quad)?,
        })
    }

    /// `j/j0 − 1 = −2Γ·Re{e^{iφ}(f₊ − f₋)}` at phase `phi`.
    pub fn relative_modulation(&self, phi: f64, dp: &DerivedParams) -> f64 {
        let rotated = Complex64::from_polar(1.0, phi) * (self.f_plus - self.f_minus);
        -averaged_prefactor(dp) * rotated.re
    }

    /// `max_t |j/j0 − 1| = 2Γ·|f₊ − f₋|`.
    pub fn depth(&self, dp: &DerivedParams) -> f64 {
        averaged_prefactor(dp) * (self.f_plus - self.f_minus).norm()
    }
}

/// `(eε0/4ħω)(V0/E) = 2Γ`.
pub fn averaged_prefactor(dp: &DerivedParams) -> f64 {
    2.0 * dp.coupling_rate
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedCurrentSample {
    pub point: SpaceTimePoint,
    /// Averaged current density (A/m²).
    pub j_avg: f64,
    pub j0: f64,
    /// `j_avg/j0 − 1`.
    pub relative_modulation: f64,
    pub f_plus: Complex64,
    pub f_minus: Complex64,
}

pub fn averaged_current(
    point: &SpaceTimePoint,
    dist: &VelocityDistribution,
    interaction: &Interaction,
    quad: &QuadratureSpec,
) -> Result<AveragedCurrentSample> {
    let dp = &interaction.derived;
    let avg = VelocityAverage::compute(point.y, dist, dp, quad)?;
    Ok(sample_from(point, &avg, interaction))
}

/// Assembles the averaged current at `point` from precomputed `f±1`
/// (which must have been evaluated at `point.y`).
pub fn sample_from(
    point: &SpaceTimePoint,
    avg: &VelocityAverage,
    interaction: &Interaction,
) -> AveragedCurrentSample {
    let dp = &interaction.derived;
    let j0 = beam_profile_j0(&BeamProfile::from(&interaction.beam), point.x, point.z);
    let rel = avg.relative_modulation(phase_phi(point, dp), dp);
    AveragedCurrentSample {
        point: *point,
        j_avg: j0 * (1.0 + rel),
        j0,
        relative_modulation: rel,
        f_plus: avg.f_plus,
        f_minus: avg.f_minus,
    }
}

/// Averaged modulation depth at `y` from the closed envelope.
pub fn averaged_modulation_depth(
    y: f64,
    dist: &VelocityDistribution,
    interaction: &Interaction,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let dp = &interaction.derived;
    Ok(VelocityAverage::compute(y, dist, dp, quad)?.depth(dp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub y: f64,
    pub depth: f64,
}

/// Averaged modulation depth along `y_grid` (strictly increasing, m),
/// each value the peak of `|j_avg/j0 − 1|` over `time_samples` equally
/// spaced times of one optical period, on axis.
pub fn coherence_scan(
    y_grid: &[f64],
    dist: &VelocityDistribution,
    interaction: &Interaction,
    quad: &QuadratureSpec,
    time_samples: usize,
) -> Result<Vec<CoherencePoint>> {
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "y_grid",
            f64::NAN,
            "must be strictly increasing",
        ));
    }
    if time_samples == 0 {
        return Err(Error::invalid("time_samples", 0.0, "must be > 0"));
    }
    let dp = &interaction.derived;
    let period = 2.0 * PI / dp.angular_frequency;
    y_grid
        .iter()
        .map(|&y| {
            let avg = VelocityAverage::compute(y, dist, dp, quad)?;
            let depth = (0..time_samples)
                .map(|i| {
                    let t = period * i as f64 / time_samples as f64;
                    let point = SpaceTimePoint::on_axis(y, t);
                    sample_from(&point, &avg, interaction)
                        .relative_modulation
                        .abs()
                })
                .fold(0.0, f64::max);
            Ok(CoherencePoint { y, depth })
        })
        .collect()
}
