//! Geodesics of `dt^2 + f(t)^2 g_F` via the Clairaut reduction.
//!
//! The fiber part of a geodesic moves along a fiber geodesic with conserved
//! `L = f^2 |v|`, leaving the radial equation `t'' = L^2 f'/f^3` and the
//! phase `s' = L/f^2`.

use std::cell::RefCell;
use std::io::{self, Write};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::curvature::WarpedMetric;
use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::ode::{self, StepOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    #[serde(serialize_with = "sig17::serialize")]
    pub t: f64,
    #[serde(serialize_with = "sig17::serialize")]
    pub tdot: f64,
    #[serde(rename = "L", serialize_with = "sig17::serialize")]
    pub l: f64,
    #[serde(serialize_with = "sig17::serialize")]
    pub s: f64,
    #[serde(rename = "E", serialize_with = "sig17::serialize")]
    pub energy: f64,
}

impl GeodesicState {
    /// State at radius `t` with Clairaut constant `l` and energy `energy`;
    /// `tdot = dir * sqrt(E - L^2/f^2)`.
    pub fn from_energy(metric: &WarpedMetric, t: f64, l: f64, energy: f64, dir: f64) -> Result<Self> {
        let f = metric.profile().jet(t)?.f;
        if f <= 0.0 {
            return Err(Error::PoleEvaluation { t });
        }
        let radial = energy - l * l / (f * f);
        if !(radial >= 0.0) || !energy.is_finite() {
            return Err(Error::InvalidParams(format!(
                "no real radial velocity: L^2/f^2 = {} exceeds E = {energy}",
                l * l / (f * f)
            )));
        }
        let sign = if dir < 0.0 { -1.0 } else { 1.0 };
        Ok(Self { t, tdot: sign * radial.sqrt(), l, s: 0.0, energy })
    }

    fn with_energy(t: f64, tdot: f64, l: f64, s: f64, f: f64) -> Self {
        Self { t, tdot, l, s, energy: tdot * tdot + l * l / (f * f) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// `f` dropped below the pole margin.
    PoleHit { time: f64 },
    /// The radius left the profile's domain (e.g. a ray blow-up).
    LeftDomain { time: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Stop once `f` falls below this value.
    pub pole_margin: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_max: 0.02, pole_margin: 1e-5 }
    }
}

#[derive(Clone, Debug)]
pub struct GeodesicPath {
    /// `(time, state)` at the initial point and every accepted step.
    pub samples: Vec<(f64, GeodesicState)>,
    pub termination: Termination,
    /// Times where `tdot` changes sign, located by linear interpolation.
    pub turning_points: Vec<f64>,
}

impl GeodesicPath {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.1.energy);
        self.samples.iter().map(|s| (s.1.energy - e0).abs()).fold(0.0, f64::max)
    }

    /// `f(t)` along the path.
    pub fn radii(&self, metric: &WarpedMetric) -> Result<Vec<f64>> {
        self.samples.iter().map(|(_, st)| Ok(metric.profile().jet(st.t)?.f)).collect()
    }
}

pub fn integrate_geodesic(
    metric: &WarpedMetric,
    init: GeodesicState,
    duration: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicPath> {
    let profile = metric.profile();
    let f0 = profile.jet(init.t)?.f;
    if f0 <= opts.pole_margin {
        return Err(Error::PoleEvaluation { t: init.t });
    }
    if !(duration >= 0.0) {
        return Err(Error::InvalidParams(format!("duration must be non-negative, got {duration}")));
    }
    let l = init.l;
    let l2 = l * l;
    let rhs = |_: f64, y: &[f64; 3]| -> [f64; 3] {
        match profile.jet(y[0]) {
            Ok(j) if j.f > 0.0 => [y[1], l2 * j.fp / j.f.powi(3), l / (j.f * j.f)],
            // outside the domain: force a step rejection
            _ => [f64::NAN; 3],
        }
    };
    let step = StepOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_init: 1e-3,
        h_max: opts.h_max,
        max_steps: 5_000_000,
    };
    let first = GeodesicState::with_energy(init.t, init.tdot, l, init.s, f0);
    let samples = RefCell::new(vec![(0.0, first)]);
    let termination = RefCell::new(Termination::Completed);
    let result = ode::integrate(rhs, 0.0, [init.t, init.tdot, init.s], duration, &step, |time, y| {
        let f = match profile.jet(y[0]) {
            Ok(j) => j.f,
            Err(_) => {
                *termination.borrow_mut() = Termination::LeftDomain { time };
                return ControlFlow::Break(());
            }
        };
        samples.borrow_mut().push((time, GeodesicState::with_energy(y[0], y[1], l, y[2], f)));
        if f < opts.pole_margin {
            *termination.borrow_mut() = Termination::PoleHit { time };
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    let mut termination = termination.into_inner();
    if let Err(e) = result {
        // a step that cannot avoid leaving the domain ends at its boundary
        match (e, samples.borrow().last()) {
            (Error::Integration(_), Some(&(time, st))) if time > 0.0 || duration == 0.0 => {
                let f = profile.jet(st.t)?.f;
                termination = if f < 1e-3 {
                    Termination::PoleHit { time }
                } else {
                    Termination::LeftDomain { time }
                };
            }
            (e, _) => return Err(e),
        }
    }
    let samples = samples.into_inner();
    let turning_points = samples
        .windows(2)
        .filter(|w| w[0].1.tdot * w[1].1.tdot < 0.0)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            a.0 + (b.0 - a.0) * a.1.tdot / (a.1.tdot - b.1.tdot)
        })
        .collect();
    Ok(GeodesicPath { samples, termination, turning_points })
}

/// `T(c', c')` along a path, with `T = Ric - 2 Scal/(m+2) g`.
#[derive(Clone, Debug, Serialize)]
pub struct KillingSeries {
    pub values: Vec<f64>,
    /// `max |T_i - T_0|`.
    #[serde(serialize_with = "sig17::serialize")]
    pub drift: f64,
    /// `mu_S E + C L^2` from the initial state.
    #[serde(serialize_with = "sig17::serialize")]
    pub expected: f64,
    /// `max |T_i - expected|`.
    #[serde(serialize_with = "sig17::serialize")]
    pub max_deviation: f64,
}

pub fn killing_value(metric: &WarpedMetric, st: &GeodesicState) -> Result<f64> {
    let e = metric.scalar_and_shifted(st.t)?;
    let f = metric.profile().jet(st.t)?.f;
    Ok(e.mu_s * st.tdot * st.tdot + e.lambda_s * st.l * st.l / (f * f))
}

pub fn killing_along_geodesic(metric: &WarpedMetric, path: &GeodesicPath) -> Result<KillingSeries> {
    let values =
        path.samples.iter().map(|(_, st)| killing_value(metric, st)).collect::<Result<Vec<_>>>()?;
    let p = metric.params();
    let n = p.nf();
    let (e0, l) = path.samples.first().map_or((0.0, 0.0), |s| (s.1.energy, s.1.l));
    let expected = n * p.a * (n - 1.0) / (n + 3.0) * e0 + p.c * l * l;
    let v0 = values.first().copied().unwrap_or(expected);
    let drift = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    let max_deviation = values.iter().map(|v| (v - expected).abs()).fold(0.0, f64::max);
    Ok(KillingSeries { values, drift, expected, max_deviation })
}

/// CSV `time,t,tdot,f,energy,killing_value`.
pub fn write_geodesic_csv<W: Write>(
    metric: &WarpedMetric,
    path: &GeodesicPath,
    killing: &KillingSeries,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "time,t,tdot,f,energy,killing_value")?;
    for ((time, st), k) in path.samples.iter().zip(&killing.values) {
        let f = metric.profile().jet(st.t).map(|j| j.f).unwrap_or(f64::NAN);
        writeln!(
            w,
            "{},{},{},{},{},{}",
            sig17::fmt(*time),
            sig17::fmt(st.t),
            sig17::fmt(st.tdot),
            sig17::fmt(f),
            sig17::fmt(st.energy),
            sig17::fmt(*k)
        )?;
    }
    Ok(())
}
