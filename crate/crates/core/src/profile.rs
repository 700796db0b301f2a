//! Warp profiles `f(t)` solving `(f')^2 = P(f)` with
//! `P(f) = tau/(n-1) + A f^2 + C/(n-1) f^4`.
//!
//! Three regimes are supported: compact profiles closing at two poles,
//! rays starting at a pole, and periodic profiles trapped between two
//! positive roots of `P`. Numeric profiles keep every accepted integrator
//! node and interpolate `f` and `f'` with quintic Hermite polynomials;
//! `f''` and `f'''` then follow from the ODE itself.

use std::io::{self, Write};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::ode::{self, hermite5, StepOptions};
use crate::params::{Family, FamilyParams};
use crate::quad;

/// `P(f) = tau/(n-1) + A f^2 + C/(n-1) f^4`.
pub fn first_integral_rhs(params: &FamilyParams, f: f64) -> f64 {
    let f2 = f * f;
    params.tau_norm() + params.a * f2 + params.eps() * f2 * f2
}

/// `f'' = A f + 2C/(n-1) f^3`, i.e. `P'(f) / 2`.
pub fn accel_rhs(params: &FamilyParams, f: f64) -> f64 {
    params.a * f + 2.0 * params.eps() * f * f * f
}

/// `f''' = (A + 6C/(n-1) f^2) f'`.
fn jerk_rhs(params: &FamilyParams, f: f64, fp: f64) -> f64 {
    (params.a + 6.0 * params.eps() * f * f) * fp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    ClosedFormTanh,
    ClosedFormTan,
    CompactNumeric,
    RayNumeric,
    PeriodicNumeric,
}

impl ProfileKind {
    pub fn family(self) -> Family {
        match self {
            ProfileKind::ClosedFormTanh | ProfileKind::ClosedFormTan | ProfileKind::RayNumeric => {
                Family::Ray
            }
            ProfileKind::CompactNumeric => Family::Compact,
            ProfileKind::PeriodicNumeric => Family::Periodic,
        }
    }
}

/// `f` and its first three derivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub fppp: f64,
}

/// Integrator and event settings for [`solve`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Offset from the pole where the series seed hands over to the integrator.
    pub seed_offset: f64,
    /// Largest step accepted by the integrator.
    pub h_max: f64,
    /// End of the integration window for rays.
    pub ray_t_max: f64,
    /// Rays are declared blown up once `f` exceeds this value.
    pub blowup_ceiling: f64,
    /// Bisection tolerance for `f' = 0` events.
    pub event_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            seed_offset: 1e-4,
            h_max: 0.02,
            ray_t_max: 10.0,
            blowup_ceiling: 1e6,
            event_tol: 1e-12,
        }
    }
}

impl StepControl {
    fn step_options(&self) -> StepOptions {
        StepOptions {
            rtol: self.rtol,
            atol: self.atol,
            h_init: self.seed_offset.max(1e-6),
            h_max: self.h_max,
            max_steps: 5_000_000,
        }
    }
}

/// Multiplicative test perturbation `f -> f (1 + amplitude sin(k t))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub amplitude: f64,
    pub wavenumber: f64,
}

/// Accepted integrator nodes, increasing in `t`.
#[derive(Debug)]
struct Trajectory {
    ts: Vec<f64>,
    f: Vec<f64>,
    fp: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, y: &[f64; 2]) {
        self.ts.push(t);
        self.f.push(y[0]);
        self.fp.push(y[1]);
    }

    fn span(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    /// Interpolated `(f, f')`; `t` must lie within the node span.
    fn interp(&self, params: &FamilyParams, t: f64) -> (f64, f64) {
        let idx = self.ts.partition_point(|&x| x <= t).clamp(1, self.ts.len() - 1);
        let (i, j) = (idx - 1, idx);
        let h = self.ts[j] - self.ts[i];
        let s = (t - self.ts[i]) / h;
        let node = |k: usize| {
            let (f, fp) = (self.f[k], self.fp[k]);
            let fpp = accel_rhs(params, f);
            ([f, fp, fpp], [fp, fpp, jerk_rhs(params, f, fp)])
        };
        let (fl, dl) = node(i);
        let (fr, dr) = node(j);
        let (f, _) = hermite5(s, h, fl, fr);
        let (fp, _) = hermite5(s, h, dl, dr);
        (f, fp)
    }

    fn integrate(
        params: &FamilyParams,
        ctl: &StepControl,
        t0: f64,
        y0: [f64; 2],
        t_end: f64,
    ) -> Result<Self> {
        let mut traj = Trajectory { ts: vec![t0], f: vec![y0[0]], fp: vec![y0[1]] };
        let p = *params;
        ode::integrate(
            move |_, y: &[f64; 2]| [y[1], accel_rhs(&p, y[0])],
            t0,
            y0,
            t_end,
            &ctl.step_options(),
            |t, y| {
                traj.push(t, y);
                ControlFlow::Continue(())
            },
        )?;
        if t_end < t0 {
            traj.ts.reverse();
            traj.f.reverse();
            traj.fp.reverse();
        }
        Ok(traj)
    }
}

/// A warp function on an interval, with evaluators for `f` and derivatives.
///
/// Profiles are immutable; clones share the underlying node data.
#[derive(Clone, Debug)]
pub struct Profile {
    params: FamilyParams,
    kind: ProfileKind,
    t_lo: f64,
    t_hi: f64,
    t0: Option<f64>,
    period: Option<f64>,
    roots: Option<(f64, f64)>,
    blow_up: Option<f64>,
    reflection_mismatch: Option<f64>,
    period_event_mismatch: Option<f64>,
    seed_offset: f64,
    traj: Option<Arc<Trajectory>>,
    perturbation: Option<Perturbation>,
}

/// Metadata describing a solved profile.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileMeta {
    pub kind: ProfileKind,
    pub family: Family,
    pub params: FamilyParams,
    #[serde(serialize_with = "sig17::serialize_pair")]
    pub domain: (f64, f64),
    #[serde(serialize_with = "sig17::serialize_opt")]
    pub t0: Option<f64>,
    #[serde(serialize_with = "sig17::serialize_opt")]
    pub period: Option<f64>,
    #[serde(serialize_with = "sig17::serialize_opt_pair")]
    pub roots: Option<(f64, f64)>,
    #[serde(serialize_with = "sig17::serialize_opt")]
    pub blow_up: Option<f64>,
    pub nodes: usize,
}

impl Profile {
    fn closed(params: FamilyParams, kind: ProfileKind) -> Self {
        let t_hi = match kind {
            ProfileKind::ClosedFormTan => std::f64::consts::FRAC_PI_2,
            _ => f64::INFINITY,
        };
        let roots = match kind {
            ProfileKind::ClosedFormTanh => Some((1.0, 1.0)),
            _ => None,
        };
        let blow_up = (kind == ProfileKind::ClosedFormTan).then_some(t_hi);
        Self {
            params,
            kind,
            t_lo: 0.0,
            t_hi,
            t0: None,
            period: None,
            roots,
            blow_up,
            reflection_mismatch: None,
            period_event_mismatch: None,
            seed_offset: 0.0,
            traj: None,
            perturbation: None,
        }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn family(&self) -> Family {
        self.kind.family()
    }

    /// Domain `[t_lo, t_hi]`. Periodic profiles are defined on the whole line.
    pub fn domain(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// Time of the first maximum of `f` (compact profiles).
    pub fn t0(&self) -> Option<f64> {
        self.t0
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Oscillation bounds `(a, b)`; for compact profiles `a` is the maximum of `f`.
    pub fn roots(&self) -> Option<(f64, f64)> {
        self.roots
    }

    pub fn blow_up(&self) -> Option<f64> {
        self.blow_up
    }

    /// Largest disagreement between the reflected half and direct
    /// integration through the turning point (compact profiles).
    pub fn reflection_mismatch(&self) -> Option<f64> {
        self.reflection_mismatch
    }

    /// Difference between the quadrature period and the event-detected one.
    pub fn period_event_mismatch(&self) -> Option<f64> {
        self.period_event_mismatch
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        self.perturbation
    }

    /// A copy multiplied by `1 + amplitude sin(wavenumber t)`; no longer a solution.
    pub fn perturbed(&self, amplitude: f64, wavenumber: f64) -> Profile {
        let mut p = self.clone();
        p.perturbation = Some(Perturbation { amplitude, wavenumber });
        p
    }

    /// Finite window used for sampling checks and CSV export.
    pub fn sampling_interval(&self) -> (f64, f64) {
        match self.kind {
            ProfileKind::ClosedFormTanh => (0.0, 5.0),
            ProfileKind::ClosedFormTan => (0.0, 1.5),
            ProfileKind::CompactNumeric => (self.t_lo, self.t_hi),
            ProfileKind::RayNumeric => (self.t_lo, self.t_hi.min(5.0)),
            ProfileKind::PeriodicNumeric => (0.0, self.period.unwrap_or(1.0)),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        match self.kind {
            ProfileKind::PeriodicNumeric => t.is_finite(),
            ProfileKind::ClosedFormTan => t >= self.t_lo && t < self.t_hi,
            _ => t >= self.t_lo && t <= self.t_hi,
        }
    }

    /// `(f, f', f'')` at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let j = self.jet(t)?;
        Ok((j.f, j.fp, j.fpp))
    }

    /// `f` through `f'''` at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet> {
        if !self.contains(t) {
            return Err(Error::OutOfDomain { t, lo: self.t_lo, hi: self.t_hi });
        }
        let base = self.base_jet(t);
        Ok(match self.perturbation {
            None => base,
            Some(p) => apply_perturbation(base, p, t),
        })
    }

    fn series_jet(&self, s: f64) -> Jet {
        let p = &self.params;
        let (a, e) = (p.a, p.eps());
        let c1 = p.tau_norm().max(0.0).sqrt();
        let c3 = a * c1 / 6.0;
        let c5 = (a * c3 + 2.0 * e * c1.powi(3)) / 20.0;
        let c7 = (a * c5 + 6.0 * e * c1 * c1 * c3) / 42.0;
        let s2 = s * s;
        let f = s * (c1 + s2 * (c3 + s2 * (c5 + s2 * c7)));
        let fp = c1 + s2 * (3.0 * c3 + s2 * (5.0 * c5 + s2 * 7.0 * c7));
        Jet { f, fp, fpp: accel_rhs(p, f), fppp: jerk_rhs(p, f, fp) }
    }

    fn jet_from_ode(&self, f: f64, fp: f64) -> Jet {
        Jet { f, fp, fpp: accel_rhs(&self.params, f), fppp: jerk_rhs(&self.params, f, fp) }
    }

    /// Unperturbed jet; also valid slightly outside the domain for closed forms.
    fn base_jet(&self, t: f64) -> Jet {
        match self.kind {
            ProfileKind::ClosedFormTanh => {
                let f = t.tanh();
                let fp = 1.0 - f * f;
                Jet { f, fp, fpp: -2.0 * f * fp, fppp: (6.0 * f * f - 2.0) * fp }
            }
            ProfileKind::ClosedFormTan => {
                let f = t.tan();
                let fp = 1.0 + f * f;
                Jet { f, fp, fpp: 2.0 * f * fp, fppp: (6.0 * f * f + 2.0) * fp }
            }
            ProfileKind::RayNumeric => {
                if t < self.t_lo + self.seed_offset {
                    self.series_jet(t - self.t_lo)
                } else {
                    let (f, fp) = self.traj().interp(&self.params, t);
                    self.jet_from_ode(f, fp)
                }
            }
            ProfileKind::CompactNumeric => {
                let t0 = self.t0.expect("compact profile has t0");
                let (tt, flip) = if t > t0 { (2.0 * t0 - t, -1.0) } else { (t, 1.0) };
                let j = if tt < self.seed_offset {
                    self.series_jet(tt)
                } else {
                    let (f, fp) = self.traj().interp(&self.params, tt);
                    self.jet_from_ode(f, fp)
                };
                Jet { f: j.f, fp: flip * j.fp, fpp: j.fpp, fppp: flip * j.fppp }
            }
            ProfileKind::PeriodicNumeric => {
                let (lo, hi) = self.traj().span();
                let period = self.period.expect("periodic profile has period");
                let tt = if t >= lo && t <= hi { t } else { t.rem_euclid(period) };
                let (f, fp) = self.traj().interp(&self.params, tt);
                self.jet_from_ode(f, fp)
            }
        }
    }

    fn traj(&self) -> &Trajectory {
        self.traj.as_deref().expect("numeric profile has nodes")
    }

    /// Sample times used for CSV export: integrator nodes for numeric
    /// profiles, a uniform grid for closed forms.
    pub fn grid(&self) -> Vec<f64> {
        match (self.kind, &self.traj) {
            (ProfileKind::CompactNumeric, Some(tr)) => {
                let t0 = self.t0.unwrap();
                let mut g = vec![0.0];
                g.extend(tr.ts.iter().copied().filter(|&t| t > 0.0 && t < t0));
                g.push(t0);
                let back: Vec<f64> = g.iter().rev().skip(1).map(|&t| 2.0 * t0 - t).collect();
                g.extend(back);
                g
            }
            (ProfileKind::RayNumeric, Some(tr)) => {
                let mut g = vec![self.t_lo];
                g.extend(tr.ts.iter().copied());
                g
            }
            (_, Some(tr)) => tr.ts.clone(),
            (_, None) => {
                let (lo, hi) = self.sampling_interval();
                (0..=400).map(|i| lo + (hi - lo) * i as f64 / 400.0).collect()
            }
        }
    }

    /// Writes `t,f,fp,fpp` rows over [`Profile::grid`].
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,f,fp,fpp")?;
        for t in self.grid() {
            let (f, fp, fpp) = self.eval(t).map_err(io::Error::other)?;
            writeln!(w, "{},{},{},{}", sig17::fmt(t), sig17::fmt(f), sig17::fmt(fp), sig17::fmt(fpp))?;
        }
        Ok(())
    }

    pub fn meta(&self) -> ProfileMeta {
        ProfileMeta {
            kind: self.kind,
            family: self.family(),
            params: self.params,
            domain: self.sampling_interval(),
            t0: self.t0,
            period: self.period,
            roots: self.roots,
            blow_up: self.blow_up,
            nodes: self.traj.as_ref().map_or(0, |t| t.ts.len()),
        }
    }

    /// Solution of the ODE continued past the domain edge at `pole`,
    /// sampled at `pole + s` for each offset.
    fn continued_values(&self, pole: f64, offsets: &[f64], reach: f64) -> Result<Vec<f64>> {
        match self.kind {
            ProfileKind::ClosedFormTanh | ProfileKind::ClosedFormTan => {
                Ok(offsets.iter().map(|s| self.base_jet(pole + s).f).collect())
            }
            _ => {
                let inward = if (pole - self.t_lo).abs() <= (pole - self.t_hi).abs() { 1.0 } else { -1.0 };
                let start = pole + inward * reach;
                let j = self.base_jet(start);
                let p = *self.params();
                let ctl = StepControl { h_max: reach / 8.0, ..StepControl::default() };
                let tr = Trajectory::integrate(&p, &ctl, start, [j.f, j.fp], pole - inward * reach)?;
                Ok(offsets.iter().map(|s| tr.interp(&p, pole + s).0).collect())
            }
        }
    }
}

fn apply_perturbation(b: Jet, p: Perturbation, t: f64) -> Jet {
    let (s, c) = (p.wavenumber * t).sin_cos();
    let k = p.wavenumber;
    let g = 1.0 + p.amplitude * s;
    let g1 = p.amplitude * k * c;
    let g2 = -p.amplitude * k * k * s;
    let g3 = -p.amplitude * k * k * k * c;
    Jet {
        f: b.f * g,
        fp: b.fp * g + b.f * g1,
        fpp: b.fpp * g + 2.0 * b.fp * g1 + b.f * g2,
        fppp: b.fppp * g + 3.0 * b.fpp * g1 + 3.0 * b.fp * g2 + b.f * g3,
    }
}

/// Positive roots `(a, b)` of `P` viewed as a quadratic in `f^2`.
///
/// With two positive roots in `f^2` they are returned in order. With a single
/// positive root (compact profiles) `a` is that root, the maximum of `f`, and
/// `b` is the square root of the magnitude of the other root, so that
/// `a b = sqrt(|tau/C|)`; for the unit sphere fiber `b = 1/a`.
pub fn quartic_roots(params: &FamilyParams) -> Result<(f64, f64)> {
    let (qa, qb, qc) = (params.eps(), params.a, params.tau_norm());
    let discriminant = qb * qb - 4.0 * qa * qc;
    if discriminant < 0.0 {
        return Err(Error::NoRealRoots { discriminant });
    }
    let sq = discriminant.sqrt();
    let q = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
    let (u1, u2) = if q == 0.0 { (0.0, 0.0) } else { (q / qa, qc / q) };
    let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
    if lo > 0.0 {
        Ok((lo.sqrt(), hi.sqrt()))
    } else if hi > 0.0 {
        Ok((hi.sqrt(), lo.abs().sqrt()))
    } else {
        Err(Error::NoRealRoots { discriminant })
    }
}

/// Exact profile for `(eps = +1, tau = n - 1)` with `A = -2` (tanh) or `A = 2` (tan).
pub fn closed_form_lookup(params: &FamilyParams) -> Option<Profile> {
    if !params.is_sphere_fiber() || params.eps() != 1.0 {
        return None;
    }
    if params.a == -2.0 {
        Some(Profile::closed(*params, ProfileKind::ClosedFormTanh))
    } else if params.a == 2.0 {
        Some(Profile::closed(*params, ProfileKind::ClosedFormTan))
    } else {
        None
    }
}

/// Closed form when one exists for a ray family, otherwise [`solve`].
pub fn build(params: &FamilyParams, family: Family, ctl: &StepControl) -> Result<Profile> {
    if family == Family::Ray {
        if let Some(p) = closed_form_lookup(params) {
            return Ok(p);
        }
    }
    solve(params, family, ctl)
}

/// Numerically solves the warp ODE in the requested regime.
pub fn solve(params: &FamilyParams, family: Family, ctl: &StepControl) -> Result<Profile> {
    match family {
        Family::Compact => solve_compact(params, ctl),
        Family::Ray => solve_ray(params, ctl),
        Family::Periodic => solve_periodic(params, ctl),
    }
}

fn require_sphere_fiber(params: &FamilyParams, family: Family) -> Result<()> {
    if params.is_sphere_fiber() {
        Ok(())
    } else {
        Err(Error::FamilyMismatch(format!(
            "{family} profiles start at a pole and need tau = n - 1, got tau = {}",
            params.tau
        )))
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let g_lo = g(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn seed_state(params: &FamilyParams, h: f64) -> (Profile, [f64; 2]) {
    let mut shell = Profile::closed(*params, ProfileKind::RayNumeric);
    shell.seed_offset = h;
    let j = shell.series_jet(h);
    (shell, [j.f, j.fp])
}

fn solve_compact(params: &FamilyParams, ctl: &StepControl) -> Result<Profile> {
    require_sphere_fiber(params, Family::Compact)?;
    let roots = quartic_roots(params).map_err(|_| {
        Error::FamilyMismatch("P has no positive root; the profile never turns".into())
    })?;
    let disc = params.a * params.a - 4.0 * params.eps() * params.tau_norm();
    if params.eps() > 0.0 && !(params.a < 0.0 && disc > 0.0) {
        return Err(Error::FamilyMismatch(format!(
            "eps = +1 closes up only for A < -2, got A = {}",
            params.a
        )));
    }
    let h = ctl.seed_offset;
    let (mut shell, y0) = seed_state(params, h);
    let p = *params;
    let mut traj = Trajectory { ts: vec![h], f: vec![y0[0]], fp: vec![y0[1]] };
    let mut turned = false;
    ode::integrate(
        move |_, y: &[f64; 2]| [y[1], accel_rhs(&p, y[0])],
        h,
        y0,
        1e4,
        &ctl.step_options(),
        |t, y| {
            traj.push(t, y);
            if y[1] < 0.0 {
                turned = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    if !turned {
        return Err(Error::Integration("no turning point found".into()));
    }
    let k = traj.ts.len() - 1;
    let t0 = bisect(traj.ts[k - 1], traj.ts[k], ctl.event_tol, |t| traj.interp(params, t).1);
    let (f_t0, fp_t0) = traj.interp(params, t0);

    // Cross-check: keep integrating through the turning point to 2 t0.
    let cont = Trajectory::integrate(params, ctl, t0, [f_t0, fp_t0], 2.0 * t0)?;

    shell.kind = ProfileKind::CompactNumeric;
    shell.t_hi = 2.0 * t0;
    shell.t0 = Some(t0);
    shell.roots = Some(roots);
    shell.traj = Some(Arc::new(traj));
    let mut mismatch: f64 = 0.0;
    for (i, &t) in cont.ts.iter().enumerate() {
        let j = shell.base_jet(t);
        mismatch = mismatch.max((j.f - cont.f[i]).abs()).max((j.fp - cont.fp[i]).abs());
    }
    shell.reflection_mismatch = Some(mismatch);
    Ok(shell)
}

fn solve_ray(params: &FamilyParams, ctl: &StepControl) -> Result<Profile> {
    require_sphere_fiber(params, Family::Ray)?;
    let (e, a) = (params.eps(), params.a);
    let disc = a * a - 4.0 * e * params.tau_norm();
    let boundary = e > 0.0 && a < 0.0 && disc.abs() <= 1e-12;
    let open = e > 0.0 && (a >= 0.0 || disc < 0.0);
    if !(open || boundary) {
        return Err(Error::FamilyMismatch(format!(
            "P has a simple positive root for A = {a}, C = {}; use the compact family",
            params.c
        )));
    }
    let h = ctl.seed_offset;
    let (mut shell, y0) = seed_state(params, h);
    let p = *params;
    let mut traj = Trajectory { ts: vec![h], f: vec![y0[0]], fp: vec![y0[1]] };
    let mut blow: Option<f64> = None;
    let ceiling = ctl.blowup_ceiling;
    ode::integrate(
        move |_, y: &[f64; 2]| [y[1], accel_rhs(&p, y[0])],
        h,
        y0,
        ctl.ray_t_max,
        &ctl.step_options(),
        |t, y| {
            if y[0] > ceiling {
                blow = Some(t);
                return ControlFlow::Break(());
            }
            traj.push(t, y);
            ControlFlow::Continue(())
        },
    )?;
    shell.kind = ProfileKind::RayNumeric;
    shell.t_hi = *traj.ts.last().unwrap();
    shell.traj = Some(Arc::new(traj));
    if boundary {
        shell.roots = quartic_roots(params).ok();
    }
    match blow {
        Some(t) => {
            shell.blow_up = Some(t);
            Err(Error::BlowUp { t, profile: Box::new(shell) })
        }
        None => Ok(shell),
    }
}

/// Half-period integral `int_a^b df / sqrt(P(f))` after the substitution
/// `f^2 = a^2 cos^2(th) + b^2 sin^2(th)`, doubled.
fn periodic_period(params: &FamilyParams, a: f64, b: f64) -> f64 {
    let scale = params.eps().abs().sqrt();
    let (a2, b2) = (a * a, b * b);
    let half = quad::integrate(
        |th: f64| {
            let (s, c) = th.sin_cos();
            1.0 / (a2 * c * c + b2 * s * s).sqrt()
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-14,
    );
    2.0 * half / scale
}

fn solve_periodic(params: &FamilyParams, ctl: &StepControl) -> Result<Profile> {
    let (a, b) = quartic_roots(params)?;
    if !(params.eps() < 0.0 && params.tau_norm() < 0.0 && params.a > 0.0) {
        return Err(Error::FamilyMismatch(
            "periodic profiles need tau < 0, C < 0 and A > 0".into(),
        ));
    }
    let period = periodic_period(params, a, b);
    let traj = Trajectory::integrate(params, ctl, 0.0, [a, 0.0], 2.0 * period)?;
    // Event-based period: second zero of f' (minimum after the first maximum).
    let mut event = None;
    for k in 1..traj.ts.len() {
        if traj.ts[k - 1] > 0.5 * period && traj.fp[k - 1] <= 0.0 && traj.fp[k] > 0.0 {
            event = Some(bisect(traj.ts[k - 1], traj.ts[k], ctl.event_tol, |t| {
                traj.interp(params, t).1
            }));
            break;
        }
    }
    let event = event.ok_or_else(|| Error::Integration("no full oscillation found".into()))?;
    let mut shell = Profile::closed(*params, ProfileKind::PeriodicNumeric);
    shell.t_lo = f64::NEG_INFINITY;
    shell.t_hi = f64::INFINITY;
    shell.period = Some(period);
    shell.period_event_mismatch = Some((event - period).abs());
    shell.roots = Some((a, b));
    shell.traj = Some(Arc::new(traj));
    Ok(shell)
}

/// Tolerance for the `k`-th even derivative estimate at a pole.
pub fn parity_tolerance(k: usize) -> f64 {
    1e-5 * 10f64.powi(k.saturating_sub(2) as i32)
}

/// Central-difference estimates of `f^(2k)(pole)`, `k = 1..=max_order`.
///
/// The ODE solution is continued through the pole; the odd extension
/// `f(pole - s) = -f(pole + s)` is smooth exactly when these vanish.
pub fn parity_check(profile: &Profile, pole: f64, max_order: usize) -> Result<Vec<f64>> {
    let (lo, hi) = profile.domain();
    let at_lo = pole == lo;
    let at_hi = pole == hi && profile.family() == Family::Compact;
    if !(at_lo || at_hi) {
        return Err(Error::FamilyMismatch(format!("t = {pole} is not a pole of the profile")));
    }
    if max_order == 0 {
        return Ok(Vec::new());
    }
    let (s_lo, s_hi) = profile.sampling_interval();
    let width = s_hi - s_lo;
    let delta = 0.1f64.min(width / (8.0 * max_order as f64));
    let reach = delta * (max_order as f64 + 0.5);
    if 2.0 * reach > width {
        return Err(Error::OutOfDomain { t: pole + reach, lo, hi });
    }
    let k_max = max_order as i64;
    let offsets: Vec<f64> = (-k_max..=k_max).map(|j| j as f64 * delta).collect();
    let vals = profile.continued_values(pole, &offsets, reach)?;
    let mut out = Vec::with_capacity(max_order);
    for k in 1..=max_order {
        // (k-th power of the second difference) / delta^(2k)
        let mut acc = 0.0;
        let mut binom = 1.0f64;
        for i in 0..=2 * k {
            let j = i as i64 - k as i64;
            let sign = if (k as i64 - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * vals[(j + k_max) as usize];
            binom = binom * (2 * k - i) as f64 / (i + 1) as f64;
        }
        out.push(acc / delta.powi(2 * k as i32));
    }
    Ok(out)
}
