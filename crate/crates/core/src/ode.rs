//! Adaptive Dormand-Prince 5(4) stepping for small fixed-size systems.
//!
//! Only what the profile and geodesic solvers need: accepted steps are
//! handed to a callback, which may stop the integration. Dense output is
//! built by the caller from the accepted nodes (see [`hermite5`]).

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub(crate) struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_init: 1e-3, h_max: 0.05, max_steps: 2_000_000 }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` towards `t_end` (either direction).
///
/// `on_step(t, y)` is called for every accepted step (not for the initial
/// point). Returning `ControlFlow::Break` stops the integration early.
/// Returns the last accepted `(t, y)`.
pub(crate) fn integrate<const N: usize, F, S>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &StepOptions,
    mut on_step: S,
) -> Result<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]) -> ControlFlow<()>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs());
    if h <= 0.0 {
        return Ok((t, y));
    }
    let mut k1 = rhs(t, &y);
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let hs = dir * if last { remaining } else { h };

        let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(t + hs, &y_new);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            if h < 1e-300 {
                return Err(Error::Integration(format!("non-finite state at t = {t}")));
            }
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = y_new;
            k1 = k7;
            if let ControlFlow::Break(()) = on_step(t, &y) {
                return Ok((t, y));
            }
            h = (hs.abs() * factor).min(opts.h_max);
        } else {
            h = hs.abs() * factor.min(1.0);
        }
        if h < 1e-15 * t.abs().max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
    }
    Ok((t, y))
}

/// Quintic Hermite interpolation on `[t0, t0 + h]` from values, first and
/// second derivatives at both ends. Returns `(p, p')` at `s in [0, 1]`.
pub(crate) fn hermite5(s: f64, h: f64, left: [f64; 3], right: [f64; 3]) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
    let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let d2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
    let d3 = -d0;
    let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let d5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
    let p = left[0] * h0
        + h * left[1] * h1
        + h * h * left[2] * h2
        + right[0] * h3
        + h * right[1] * h4
        + h * h * right[2] * h5;
    let dp = (left[0] * d0 + right[0] * d3) / h
        + left[1] * d1
        + right[1] * d4
        + h * (left[2] * d2 + right[2] * d5);
    (p, dp)
}
