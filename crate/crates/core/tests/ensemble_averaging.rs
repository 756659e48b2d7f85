mod common;

use std::f64::consts::PI;

use common::{reference, rel, weak_resonant, PC};
use kdmod_core::current::modulation_depth;
use kdmod_core::ensemble::{
    averaged_modulation_depth, coherence_scan, f_pm1, monochromatic_f, QuadratureSpec,
    VelocityAverage, VelocityDistribution,
};
use kdmod_core::quadrature::{integrate, Adaptive};
use kdmod_core::{Branch, Complex64, DerivedParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// `2·sin(Dy/2)/D·e^{−iDy/2}` with `D = ω/v − q ∓ ħω²/(2mv³)` spelled out.
fn integrand(y: f64, v: f64, branch: Branch, dp: &DerivedParams) -> Complex64 {
    let hbar = PC.reduced_planck();
    let m = PC.electron_mass();
    let omega = dp.angular_frequency;
    let recoil = hbar * omega * omega / (2.0 * m * v * v * v);
    let d = omega / v - dp.grating_number - f64::from(branch.sign()) * recoil;
    let s = if (d * y).abs() < 1e-9 {
        0.5 * y
    } else {
        (0.5 * d * y).sin() / d
    };
    Complex64::from_polar(2.0 * s, -0.5 * d * y)
}

/// Sample mean and complex standard error of the integrand over
/// `v ~ N(v0, Δv²/2)`, which is the weight `e^{−(v−v0)²/Δv²}/(√π·Δv)`.
fn monte_carlo(
    y: f64,
    branch: Branch,
    dist: &VelocityDistribution,
    dp: &DerivedParams,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (Complex64, f64) {
    let normal = Normal::new(dist.mean(), dist.spread() / 2f64.sqrt()).unwrap();
    let mut sum = Complex64::default();
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let value = integrand(y, normal.sample(rng), branch, dp);
        sum += value;
        sum_sq += value.norm_sqr();
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean.norm_sqr()) * n / (n - 1.0);
    (mean, (variance / n).sqrt())
}

#[test]
fn density_is_normalised() {
    let dist = VelocityDistribution::new(7.5e6, 3e3).unwrap();
    let tol = Adaptive::default();
    let total = integrate(|v| dist.density(v), 7.5e6 - 3e4, 7.5e6 + 3e4, &tol)
        .unwrap()
        .value;
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn zero_spread_is_monochromatic() {
    let r = weak_resonant();
    let dp = &r.derived;
    let dist = VelocityDistribution::new(dp.velocity, 0.0).unwrap();
    let y = 0.37 * dp.modulation_length;
    for branch in Branch::BOTH {
        let f = f_pm1(y, branch, &dist, dp, &QuadratureSpec::default()).unwrap();
        assert_eq!(f, monochromatic_f(y, dp.velocity, branch, dp));
        assert!((f - integrand(y, dp.velocity, branch, dp)).norm() < 1e-12 * y);
    }
}

#[test]
fn narrow_spread_reproduces_monochromatic_depth() {
    for r in [reference(), weak_resonant()] {
        let dp = &r.derived;
        let dist = VelocityDistribution::new(dp.velocity, 1e-9 * dp.velocity).unwrap();
        for frac in [0.1, 0.5, 1.3] {
            let y = frac * dp.modulation_length;
            let averaged =
                averaged_modulation_depth(y, &dist, &r, &QuadratureSpec::default()).unwrap();
            assert!(
                rel(averaged, modulation_depth(y, &r)) < 1e-4,
                "y = {frac}·L"
            );
        }
    }
}

#[test]
fn adaptive_agrees_with_gauss_hermite() {
    let r = weak_resonant();
    let dp = &r.derived;
    let hermite = QuadratureSpec::gauss_hermite(128);
    for spread in [1e-4, 1e-3] {
        let dist = VelocityDistribution::new(dp.velocity, spread * dp.velocity).unwrap();
        for frac in [0.2, 0.5, 1.0] {
            let y = frac * dp.modulation_length;
            for branch in Branch::BOTH {
                let a = f_pm1(y, branch, &dist, dp, &QuadratureSpec::default()).unwrap();
                let b = f_pm1(y, branch, &dist, dp, &hermite).unwrap();
                assert!(
                    (a - b).norm() < 1e-8 * a.norm().max(1e-3 * y),
                    "Δv/v = {spread}, y = {frac}·L"
                );
            }
        }
    }
}

#[test]
fn adaptive_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d63);
    let base = weak_resonant();
    for _ in 0..6 {
        let spread = 10f64.powf(rng.gen_range(-4.0..-2.0));
        let detune = rng.gen_range(0.97..1.03);
        let b = kdmod_core::BeamSpec::from_velocity(
            detune * base.derived.velocity,
            1e-6,
            1e-4,
            1e-4,
            0.0,
            &PC,
        )
        .unwrap();
        let r = base.with_beam(b);
        let dp = &r.derived;
        let dist = VelocityDistribution::new(dp.velocity, spread * dp.velocity).unwrap();
        let y = rng.gen_range(0.1..2.0) * dp.modulation_length;
        for branch in Branch::BOTH {
            let quad = f_pm1(y, branch, &dist, dp, &QuadratureSpec::default()).unwrap();
            let (mean, err) = monte_carlo(y, branch, &dist, dp, 200_000, &mut rng);
            assert!((quad - mean).norm() < 3.0 * err, "Δv/v = {spread:e}");
        }
    }
}

#[test]
fn wider_spread_suppresses_modulation() {
    let r = reference();
    let dp = &r.derived;
    let y = 0.5 * dp.modulation_length;
    let depth = |spread: f64| {
        let dist = VelocityDistribution::new(dp.velocity, spread * dp.velocity).unwrap();
        averaged_modulation_depth(y, &dist, &r, &QuadratureSpec::default()).unwrap()
    };
    let narrow = depth(1e-4);
    let wide = depth(1e-2);
    assert!(wide < narrow, "{wide:e} vs {narrow:e}");
    // g = (1 − e^{−iDy})/(iD): with hundreds of radians of phase spread only
    // the non-oscillating part survives
    let d_up = kdmod_core::model::detuning(dp.velocity, dp, Branch::Absorption);
    let d_down = kdmod_core::model::detuning(dp.velocity, dp, Branch::Emission);
    let floor = 2.0 * dp.coupling_rate * (1.0 / d_up - 1.0 / d_down).abs();
    assert!(rel(wide, floor) < 1e-2, "{wide:e} vs {floor:e}");
}

#[test]
fn time_scan_reaches_envelope() {
    let r = weak_resonant();
    let dp = &r.derived;
    let dist = VelocityDistribution::new(dp.velocity, 1e-3 * dp.velocity).unwrap();
    let quad = QuadratureSpec::default();
    let grid: Vec<f64> = (1..=5)
        .map(|i| 0.3 * f64::from(i) * dp.modulation_length)
        .collect();
    let scan = coherence_scan(&grid, &dist, &r, &quad, 2048).unwrap();
    for point in scan {
        let envelope = VelocityAverage::compute(point.y, &dist, dp, &quad)
            .unwrap()
            .depth(dp);
        assert!(point.depth <= envelope * (1.0 + 1e-12));
        assert!(point.depth >= envelope * (1.0 - 2e-6));
    }
}

#[test]
fn phase_rotation_preserves_depth() {
    let r = weak_resonant();
    let dp = &r.derived;
    let dist = VelocityDistribution::new(dp.velocity, 1e-3 * dp.velocity).unwrap();
    let avg = VelocityAverage::compute(
        0.8 * dp.modulation_length,
        &dist,
        dp,
        &QuadratureSpec::default(),
    )
    .unwrap();
    let depth = avg.depth(dp);
    let peak = (0..720)
        .map(|k| {
            avg.relative_modulation(2.0 * PI * f64::from(k) / 720.0, dp)
                .abs()
        })
        .fold(0.0, f64::max);
    assert!(peak <= depth * (1.0 + 1e-12) && peak > depth * (1.0 - 1e-5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn averaged_factor_is_bounded_by_path(frac in 0.01f64..3.0, log_spread in -5.0f64..-2.0) {
        let r = weak_resonant();
        let dp = &r.derived;
        let dist = VelocityDistribution::new(dp.velocity, 10f64.powf(log_spread) * dp.velocity).unwrap();
        let y = frac * dp.modulation_length;
        for branch in Branch::BOTH {
            let f = f_pm1(y, branch, &dist, dp, &QuadratureSpec::default()).unwrap();
            prop_assert!(f.norm() <= y * (1.0 + 1e-9));
        }
    }
}
