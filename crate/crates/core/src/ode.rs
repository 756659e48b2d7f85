//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems, with
//! the 4th-order continuous extension used for output sampling.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DormandPrince {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on |h|; `f64::INFINITY` leaves it to the controller.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

/// States sampled at the requested output positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub samples: Vec<(f64, Vec<Complex64>)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn weighted_rms(
    err: &[Complex64],
    y0: &[Complex64],
    y1: &[Complex64],
    atol: f64,
    rtol: f64,
) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let scale = atol + rtol * a.norm().max(b.norm());
            let r = e.norm() / scale;
            r * r
        })
        .sum();
    (sum / n).sqrt()
}

impl DormandPrince {
    /// Integrates `dy/dt = f(t, y)` from `t0` to `t1 > t0`, returning the
    /// state at every position of `outputs` (strictly increasing, inside
    /// `[t0, t1]`).
    pub fn integrate<F>(
        &self,
        mut f: F,
        t0: f64,
        y0: &[Complex64],
        t1: f64,
        outputs: &[f64],
    ) -> Result<Solution>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        debug_assert!(t1 > t0);
        debug_assert!(outputs.windows(2).all(|w| w[1] > w[0]));
        let n = y0.len();
        let mut samples = Vec::with_capacity(outputs.len());
        let mut pending = outputs.iter().copied().peekable();

        while let Some(&t) = pending.peek() {
            if t > t0 {
                break;
            }
            samples.push((t, y0.to_vec()));
            pending.next();
        }

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![Complex64::default(); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut k5 = k1.clone();
        let mut k6 = k1.clone();
        let mut k7 = k1.clone();
        let mut stage = k1.clone();
        let mut y_new = k1.clone();
        let mut err = k1.clone();
        let mut cont = [k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone()];

        f(t, &y, &mut k1);
        if k1.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite { position: t });
        }
        let mut h = self.initial_step(&mut f, t, &y, &k1, t1 - t0);
        let mut accepted = 0usize;
        let mut rejected = 0usize;
        let mut last_rejected = false;

        while t < t1 {
            if accepted + rejected >= self.max_steps {
                return Err(Error::StepBudgetExhausted {
                    position: t,
                    steps: accepted + rejected,
                });
            }
            let min_step = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h < min_step {
                return Err(Error::StepSizeUnderflow {
                    position: t,
                    step: h,
                });
            }
            let h_try = h.min(t1 - t).min(self.max_step);

            for i in 0..n {
                stage[i] = y[i] + k1[i] * (h_try * A21);
            }
            f(t + C2 * h_try, &stage, &mut k2);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h_try;
            }
            f(t + C3 * h_try, &stage, &mut k3);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h_try;
            }
            f(t + C4 * h_try, &stage, &mut k4);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h_try;
            }
            f(t + C5 * h_try, &stage, &mut k5);
            for i in 0..n {
                stage[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h_try;
            }
            let t_new = if h_try == t1 - t { t1 } else { t + h_try };
            f(t_new, &stage, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h_try;
            }
            f(t_new, &y_new, &mut k7);
            for i in 0..n {
                err[i] =
                    (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                        * h_try;
            }

            let err_norm = weighted_rms(&err, &y, &y_new, self.abs_tol, self.rel_tol);
            if !err_norm.is_finite() {
                return Err(Error::NonFinite { position: t });
            }

            if err_norm <= 1.0 {
                for i in 0..n {
                    let dy = y_new[i] - y[i];
                    let bspl = k1[i] * h_try - dy;
                    cont[0][i] = y[i];
                    cont[1][i] = dy;
                    cont[2][i] = bspl;
                    cont[3][i] = dy - k7[i] * h_try - bspl;
                    cont[4][i] = (k1[i] * D1
                        + k3[i] * D3
                        + k4[i] * D4
                        + k5[i] * D5
                        + k6[i] * D6
                        + k7[i] * D7)
                        * h_try;
                }
                while let Some(&t_out) = pending.peek() {
                    if t_out > t_new {
                        break;
                    }
                    let state = if t_out == t_new {
                        y_new.clone()
                    } else {
                        dense(&cont, (t_out - t) / h_try)
                    };
                    samples.push((t_out, state));
                    pending.next();
                }
                t = t_new;
                core::mem::swap(&mut y, &mut y_new);
                core::mem::swap(&mut k1, &mut k7);
                accepted += 1;

                let mut factor = if err_norm == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                if last_rejected {
                    factor = factor.min(1.0);
                }
                last_rejected = false;
                h = h_try * factor;
            } else {
                rejected += 1;
                last_rejected = true;
                h = h_try * (SAFETY * err_norm.powf(-0.2)).max(MIN_FACTOR);
            }
        }

        // outputs at t1 that survived rounding in the final step
        for t_out in pending {
            samples.push((t_out, y.clone()));
        }

        Ok(Solution {
            samples,
            accepted_steps: accepted,
            rejected_steps: rejected,
        })
    }

    fn initial_step<F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[Complex64],
        k1: &[Complex64],
        span: f64,
    ) -> f64
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let zero = vec![Complex64::default(); y.len()];
        let scale_norm = |v: &[Complex64]| weighted_rms(v, y, &zero, self.abs_tol, self.rel_tol);
        let d0 = scale_norm(y);
        let d1 = scale_norm(k1);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span).min(self.max_step);
        let probe: Vec<Complex64> = y.iter().zip(k1).map(|(a, b)| a + b * h0).collect();
        let mut k2 = vec![Complex64::default(); y.len()];
        f(t + h0, &probe, &mut k2);
        let diff: Vec<Complex64> = k2.iter().zip(k1).map(|(a, b)| a - b).collect();
        let d2 = scale_norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span).min(self.max_step)
    }
}

fn dense(cont: &[Vec<Complex64>; 5], theta: f64) -> Vec<Complex64> {
    let theta1 = 1.0 - theta;
    (0..cont[0].len())
        .map(|i| {
            cont[0][i]
                + (cont[1][i] + (cont[2][i] + (cont[3][i] + cont[4][i] * theta1) * theta) * theta1)
                    * theta
        })
        .collect()
}
