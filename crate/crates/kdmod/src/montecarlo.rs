//! Seeded Monte-Carlo cross-check of the velocity-averaged sideband factors.

use kdmod_core::ensemble::{f_pm1, monochromatic_f, QuadratureSpec, VelocityDistribution};
use kdmod_core::{Branch, Complex64, DerivedParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

/// Draws per branch for the check recorded in manifests.
pub const SAMPLES: usize = 1_000_000;

/// Sample mean of `f` over `v ~ N(v0, Δv²/2)` and its complex standard
/// error `√(Var f / N)`.
pub fn sample_mean<R: rand::Rng>(
    y: f64,
    branch: Branch,
    dist: &VelocityDistribution,
    dp: &DerivedParams,
    samples: usize,
    rng: &mut R,
) -> (Complex64, f64) {
    assert!(samples >= 2, "need at least two samples");
    // the weight e^{−(v−v0)²/Δv²} is a normal law with σ = Δv/√2
    let normal = Normal::new(dist.mean(), dist.spread() / std::f64::consts::SQRT_2)
        .expect("spread is finite and non-negative");
    let mut sum = Complex64::default();
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let value = monochromatic_f(y, normal.sample(rng), branch, dp);
        sum += value;
        sum_sq += value.norm_sqr();
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq / n - mean.norm_sqr()) * n / (n - 1.0)).max(0.0);
    (mean, (variance / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCheck {
    pub quadrature_re: f64,
    pub quadrature_im: f64,
    pub monte_carlo_re: f64,
    pub monte_carlo_im: f64,
    pub standard_error: f64,
    /// `|quadrature − Monte Carlo|` in standard errors.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub seed: u64,
    pub samples: usize,
    pub y_m: f64,
    pub absorption: BranchCheck,
    pub emission: BranchCheck,
}

impl MonteCarloReport {
    pub fn within(&self, standard_errors: f64) -> bool {
        [&self.absorption, &self.emission]
            .iter()
            .all(|c| c.deviation <= standard_errors)
    }
}

/// Compares quadrature and Monte-Carlo `f±1` at `y`, both branches drawn
/// from one ChaCha8 stream seeded with `seed`.
pub fn check(
    y: f64,
    dist: &VelocityDistribution,
    dp: &DerivedParams,
    quad: &QuadratureSpec,
    samples: usize,
    seed: u64,
) -> kdmod_core::Result<MonteCarloReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut one = |branch| -> kdmod_core::Result<BranchCheck> {
        let q = f_pm1(y, branch, dist, dp, quad)?;
        let (mc, se) = sample_mean(y, branch, dist, dp, samples, &mut rng);
        let gap = (q - mc).norm();
        Ok(BranchCheck {
            quadrature_re: q.re,
            quadrature_im: q.im,
            monte_carlo_re: mc.re,
            monte_carlo_im: mc.im,
            standard_error: se,
            deviation: if se > 0.0 {
                gap / se
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            },
        })
    };
    let absorption = one(Branch::Absorption)?;
    let emission = one(Branch::Emission)?;
    Ok(MonteCarloReport {
        seed,
        samples,
        y_m: y,
        absorption,
        emission,
    })
}
