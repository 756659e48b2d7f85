//! Globally adaptive Gauss–Kronrod (7/15) quadrature and Gauss–Hermite rules.

#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

/// Tolerances and budget for [`integrate_complex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 20_000,
        }
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    }
}

/// Integrates a complex-valued `f` over `[a, b]`, bisecting the interval
/// with the largest error estimate until
/// `error ≤ max(abs_tol, rel_tol·|I|)`.
pub fn integrate_complex<F>(mut f: F, a: f64, b: f64, tol: &Adaptive) -> Result<Estimate<Complex64>>
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return Ok(Estimate {
            value: Complex64::default(),
            error: 0.0,
            intervals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);

    loop {
        if !(total.is_finite() && total_err.is_finite()) {
            return Err(Error::QuadratureNonConvergence {
                error_estimate: total_err,
                intervals: heap.len(),
            });
        }
        let target = tol.abs_tol.max(tol.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                error_estimate: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence {
                error_estimate: total_err,
                intervals: heap.len() + 1,
            });
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in interval order so the result does not carry the running
    // update's rounding history.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments
        .iter()
        .fold(Complex64::default(), |acc, s| acc + s.value);
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Estimate {
        value,
        error,
        intervals: segments.len(),
    })
}

/// Real-valued wrapper around [`integrate_complex`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: &Adaptive) -> Result<Estimate<f64>>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok(Estimate {
        value: est.value.re,
        error: est.error,
        intervals: est.intervals,
    })
}

/// Nodes and weights for `∫ e^{−x²} g(x) dx ≈ Σ w_i g(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes the `n`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence, using the classical asymptotic root guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let pim4 = PI.powf(-0.25);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        let half = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z_prev = z;
                z = z_prev - p1 / pp;
                if (z - z_prev).abs() <= 3e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[half - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i g(x_i)`.
    pub fn apply<F: FnMut(f64) -> Complex64>(&self, mut g: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex64::default(), |acc, (&x, &w)| acc + g(x) * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &Adaptive::default()).unwrap();
        // [x³ − x²/2 + 2x] from −1 to 2
        assert!((est.value - 13.5).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let tol = Adaptive {
            rel_tol: 1e-12,
            ..Default::default()
        };
        let est = integrate(|x| (50.0 * x).cos(), 0.0, 3.0, &tol).unwrap();
        let exact = (150.0f64).sin() / 50.0;
        assert!((est.value - exact).abs() < 1e-12);
    }

    #[test]
    fn complex_exponential() {
        let est = integrate_complex(
            |x| Complex64::from_polar(1.0, 7.0 * x),
            0.0,
            1.0,
            &Adaptive::default(),
        )
        .unwrap();
        let exact = (Complex64::from_polar(1.0, 7.0) - 1.0) / Complex64::new(0.0, 7.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let tol = Adaptive {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 4,
        };
        let err = integrate(|x| (1.0 / x.max(1e-300)).sin(), 0.0, 1.0, &tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn hermite_moments() {
        for n in [16usize, 17, 64, 128] {
            let rule = GaussHermite::new(n);
            let w: f64 = rule.weights.iter().sum();
            assert!((w - PI.sqrt()).abs() < 1e-13, "n = {n}");
            // ∫ x² e^{−x²} = √π/2, ∫ x⁴ e^{−x²} = 3√π/4
            let m2 = rule.apply(|x| Complex64::new(x * x, 0.0)).re;
            let m4 = rule.apply(|x| Complex64::new(x.powi(4), 0.0)).re;
            assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12, "n = {n}");
            assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-12, "n = {n}");
            assert!(rule.nodes.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn hermite_gaussian_characteristic_function() {
        // ∫ e^{−x²} e^{ikx} dx = √π e^{−k²/4}
        let rule = GaussHermite::new(128);
        for k in [0.5, 2.0, 6.0] {
            let got = rule.apply(|x| Complex64::from_polar(1.0, k * x));
            let exact = PI.sqrt() * (-k * k / 4.0).exp();
            assert!(
                (got.re - exact).abs() < 1e-13 && got.im.abs() < 1e-13,
                "k = {k}"
            );
        }
    }
}
