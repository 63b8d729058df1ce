//! Adaptive Dormand-Prince 5(4) integration for the master equation.
//!
//! An explicit solver is sufficient here: the state distributions being
//! integrated are probability vectors whose stiffness is bounded by the
//! largest total exit rate, and the rate-time products exercised by the
//! toolkit keep the step count modest. The embedded 4th-order error
//! estimate drives standard step-size control.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub(crate) struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 20_000_000,
        }
    }
}

// Dormand-Prince coefficients. The 5th-order weights equal the last stage
// row (FSAL), so k7 of an accepted step is k1 of the next.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates dy/dt = f(y) from `y0` over [0, t_end] and returns y(t_end).
pub(crate) fn integrate(
    f: &impl Fn(&[f64], &mut [f64]),
    y0: &[f64],
    t_end: f64,
    opt: &Options,
) -> Result<Vec<f64>> {
    debug_assert!(t_end > 0.0);
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    let mut y_next = vec![0.0; dim];

    f(&y, &mut k[0]);
    let mut t = 0.0;
    let mut h = initial_step(f, &y, &k[0], t_end, opt);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opt.max_steps {
            return Err(Error::SolverFailure(alloc::format!(
                "integration exceeded {} steps at t = {t}",
                opt.max_steps
            )));
        }
        steps += 1;
        if h < t_end * 1e-16 {
            return Err(Error::SolverFailure(alloc::format!(
                "step size underflow at t = {t}"
            )));
        }
        if t + h > t_end {
            h = t_end - t;
        }

        // Stages 2..7. The stage-7 input is the A7 combination, which is
        // already the 5th-order solution, so k[6] = f(y_next) (FSAL).
        let stage_coeffs: [&[f64]; 6] = [&A2, &A3, &A4, &A5, &A6, &A7];
        for (s, coeffs) in stage_coeffs.iter().enumerate() {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, &a) in coeffs.iter().enumerate() {
                    acc += a * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            f(&y_stage, &mut k[s + 1]);
        }
        y_next.copy_from_slice(&y_stage);

        // RMS of the embedded error against the mixed tolerance.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, &c) in E.iter().enumerate() {
                e += c * k[j][i];
            }
            e *= h;
            let scale = opt.atol + opt.rtol * math::abs(y[i]).max(math::abs(y_next[i]));
            let ratio = e / scale;
            err_sq += ratio * ratio;
        }
        let err = math::sqrt(err_sq / dim as f64);

        if err <= 1.0 {
            t += h;
            core::mem::swap(&mut y, &mut y_next);
            k.swap(0, 6); // FSAL
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * math::powf(err, -0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * math::powf(err, -0.2)).clamp(0.2, 0.9);
        }
    }
    Ok(y)
}

/// Standard starting-step heuristic: balance the size of y against its
/// derivative, refine with one Euler probe.
fn initial_step(
    f: &impl Fn(&[f64], &mut [f64]),
    y0: &[f64],
    f0: &[f64],
    t_end: f64,
    opt: &Options,
) -> f64 {
    let dim = y0.len();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..dim {
        let scale = opt.atol + opt.rtol * math::abs(y0[i]);
        let a = y0[i] / scale;
        let b = f0[i] / scale;
        d0 += a * a;
        d1 += b * b;
    }
    d0 = math::sqrt(d0 / dim as f64);
    d1 = math::sqrt(d1 / dim as f64);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * t_end
    } else {
        0.01 * (d0 / d1)
    }
    .min(t_end);

    let y1: Vec<f64> = y0.iter().zip(f0).map(|(&y, &d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; dim];
    f(&y1, &mut f1);
    let mut d2 = 0.0;
    for i in 0..dim {
        let scale = opt.atol + opt.rtol * math::abs(y0[i]);
        let diff = (f1[i] - f0[i]) / scale;
        d2 += diff * diff;
    }
    d2 = math::sqrt(d2 / dim as f64) / h0;

    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * t_end)
    } else {
        math::powf(0.01 / d1.max(d2), 0.2)
    };
    h1.min(100.0 * h0).min(t_end)
}
