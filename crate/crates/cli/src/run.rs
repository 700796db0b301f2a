//! Subcommand implementations. Each returns whether the run passed; errors
//! mean the input could not be processed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use warpgray::fmt::sig17;
use warpgray::geodesic::{
    integrate_geodesic, killing_along_geodesic, write_geodesic_csv, GeodesicOptions,
};
use warpgray::profile::{build, solve, ProfileMeta};
use warpgray::verify::{self, run_checks, Check, SampleSpec};
use warpgray::{
    Error, Family, FamilyParams, GeodesicState, Profile, StepControl, Termination, WarpedMetric,
};

use crate::config::{Command, RunConfig};

/// Like `println!`, but a closed stdout (e.g. `| head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

pub const ENERGY_TOL: f64 = 1e-8;
pub const KILLING_TOL: f64 = verify::tol::KILLING;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok { Status::Pass } else { Status::Fail }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Status> {
    match cfg.command.context("no subcommand")? {
        Command::Solve => run_solve(cfg),
        Command::Verify => run_verify(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Geodesic => run_geodesic(cfg),
    }
}

fn step_control(cfg: &RunConfig) -> StepControl {
    let mut ctl = StepControl::default();
    if let Some(r) = cfg.rtol {
        ctl.rtol = r;
    }
    if let Some(a) = cfg.atol {
        ctl.atol = a;
    }
    ctl
}

/// Solves (or looks up) the profile; a ray blow-up yields the profile up to
/// the escape time.
fn make_profile(cfg: &RunConfig, params: &FamilyParams) -> warpgray::Result<Profile> {
    let family = params_family(cfg);
    let ctl = step_control(cfg);
    let solved = if cfg.numeric.unwrap_or(false) {
        solve(params, family, &ctl)
    } else {
        build(params, family, &ctl)
    };
    let profile = match solved {
        Ok(p) => p,
        Err(Error::BlowUp { profile, .. }) => *profile,
        Err(e) => return Err(e),
    };
    Ok(match cfg.perturb {
        Some(amp) => profile.perturbed(amp, cfg.perturb_k.unwrap_or(3.0)),
        None => profile,
    })
}

fn params_family(cfg: &RunConfig) -> Family {
    cfg.family.expect("family validated before solving")
}

fn metric(cfg: &RunConfig) -> Result<WarpedMetric> {
    cfg.family()?;
    let params = cfg.params()?;
    Ok(WarpedMetric::new(make_profile(cfg, &params)?))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

#[derive(Serialize)]
struct Constants {
    #[serde(rename = "C0", serialize_with = "sig17::serialize")]
    c0: f64,
    #[serde(serialize_with = "sig17::serialize")]
    mu_s: f64,
    #[serde(rename = "C1", serialize_with = "sig17::serialize")]
    c1: f64,
    /// Sign in front of `(m-1)^2 alpha^2` in the `C1` combination.
    #[serde(serialize_with = "sig17::serialize")]
    c1_alpha_sign: f64,
}

#[derive(Serialize)]
struct SolveMeta {
    profile: ProfileMeta,
    constants: Constants,
    #[serde(serialize_with = "sig17::serialize_opt")]
    reflection_mismatch: Option<f64>,
    #[serde(serialize_with = "sig17::serialize_opt")]
    period_event_mismatch: Option<f64>,
}

pub fn run_solve(cfg: &RunConfig) -> Result<Status> {
    let m = metric(cfg)?;
    let dir = cfg.out_dir();
    let p = m.profile();
    let mut w = create(&dir, "profile.csv")?;
    p.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&dir, "eigen.csv")?;
    m.write_eigen_csv(&mut w)?;
    w.flush()?;
    let e = verify::expected_constants(&m);
    let meta = SolveMeta {
        profile: p.meta(),
        constants: Constants {
            c0: e.c0,
            mu_s: e.mu_s,
            c1: e.c1,
            c1_alpha_sign: verify::c1_alpha_sign(&m),
        },
        reflection_mismatch: p.reflection_mismatch(),
        period_event_mismatch: p.period_event_mismatch(),
    };
    let mut w = create(&dir, "meta.json")?;
    serde_json::to_writer_pretty(&mut w, &meta)?;
    writeln!(w)?;
    w.flush()?;

    say!("family: {}", m.params().label(p.family()));
    say!("domain: [{}, {}]", sig17::fmt(p.domain().0), sig17::fmt(p.domain().1));
    if let Some(t0) = p.t0() {
        say!("t0: {}", sig17::fmt(t0));
    }
    if let Some(period) = p.period() {
        say!("period: {}", sig17::fmt(period));
    }
    if let Some((a, b)) = p.roots() {
        say!("roots: {} {}", sig17::fmt(a), sig17::fmt(b));
    }
    if let Some(t) = p.blow_up() {
        say!("blow-up at t = {}", sig17::fmt(t));
    }
    Ok(Status::Pass)
}

pub fn run_verify(cfg: &RunConfig) -> Result<Status> {
    let m = metric(cfg)?;
    let spec = SampleSpec { samples: cfg.samples(), seed: cfg.seed() };
    let reports = run_checks(&m, &cfg.checks(), spec, cfg.expect_no_ew.unwrap_or(false));
    let mut w = create(&cfg.out_dir(), "report.json")?;
    serde_json::to_writer_pretty(&mut w, &reports)?;
    writeln!(w)?;
    w.flush()?;
    for r in &reports {
        say!(
            "{} {} max={} tol={}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check_name,
            sig17::fmt(r.max_residual),
            sig17::fmt(r.tolerance)
        );
    }
    Ok(Status::from_bool(!reports.is_empty() && reports.iter().all(|r| r.pass)))
}

struct SweepRow {
    a: f64,
    result: std::result::Result<[f64; 5], &'static str>,
}

fn sweep_row(cfg: &RunConfig, params: &FamilyParams) -> warpgray::Result<[f64; 5]> {
    let m = WarpedMetric::new(make_profile(cfg, params)?);
    let p = m.profile();
    let key = match p.family() {
        Family::Compact => p.t0(),
        Family::Periodic => p.period(),
        Family::Ray => p.blow_up(),
    }
    .unwrap_or(f64::NAN);
    let (lo, hi) = p.sampling_interval();
    let [c0, c1, mu_s, _] = verify::invariant_values(&m, 0.5 * (lo + hi))?;
    let spec = SampleSpec { samples: cfg.samples(), seed: cfg.seed() };
    let gray = run_checks(&m, &[Check::Gray], spec, false);
    Ok([key, c0, mu_s, c1, gray[0].max_residual])
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Status> {
    cfg.family()?;
    let steps = cfg.steps.context("missing --steps")?;
    if steps < 2 {
        bail!("--steps must be at least 2, got {steps}");
    }
    let from = cfg.a_from.context("missing --A-from")?;
    let to = cfg.a_to.context("missing --A-to")?;
    if !(from.is_finite() && to.is_finite()) {
        bail!("non-finite A range");
    }
    // validate the non-A constants once
    cfg.params_with_a(from)?;
    let rows: Vec<SweepRow> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let a = from + (to - from) * i as f64 / (steps - 1) as f64;
            let result = cfg
                .params_with_a(a)
                .map_err(|_| "InvalidParams")
                .and_then(|p| sweep_row(cfg, &p).map_err(|e| e.tag()));
            SweepRow { a, result }
        })
        .collect();
    let mut w = create(&cfg.out_dir(), "sweep.csv")?;
    writeln!(w, "A,t0_or_period,C0,mu_S,C1,max_gray_residual")?;
    for row in &rows {
        match row.result {
            Ok(v) => {
                let cols: Vec<String> = v.iter().map(|x| sig17::fmt(*x)).collect();
                writeln!(w, "{},{}", sig17::fmt(row.a), cols.join(","))?;
            }
            Err(tag) => writeln!(w, "{},error:{tag},,,,", sig17::fmt(row.a))?,
        }
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    say!("rows: {} ok, {} failed", rows.len() - failed, failed);
    Ok(Status::from_bool(failed < rows.len()))
}

pub fn run_geodesic(cfg: &RunConfig) -> Result<Status> {
    let m = metric(cfg)?;
    let p = m.profile();
    let t0 = match cfg.t0 {
        Some(t) => t,
        None => match p.family() {
            Family::Compact => p.t0().unwrap_or(1.0),
            Family::Periodic => 0.0,
            Family::Ray => 1.0,
        },
    };
    let init = GeodesicState::from_energy(
        &m,
        t0,
        cfg.l.unwrap_or(0.0),
        cfg.energy.unwrap_or(1.0),
        cfg.dir.unwrap_or(1.0),
    )?;
    let duration = cfg.duration.unwrap_or(10.0);
    let path = integrate_geodesic(&m, init, duration, &GeodesicOptions::default())?;
    let k = killing_along_geodesic(&m, &path)?;
    let mut w = create(&cfg.out_dir(), "geodesic.csv")?;
    write_geodesic_csv(&m, &path, &k, &mut w)?;
    w.flush()?;
    match path.termination {
        Termination::Completed => say!("termination: completed"),
        Termination::PoleHit { time } => say!("termination: pole hit at time {}", sig17::fmt(time)),
        Termination::LeftDomain { time } => {
            say!("termination: left domain at time {}", sig17::fmt(time))
        }
    }
    let energy_drift = path.max_energy_drift();
    say!("turning points: {}", path.turning_points.len());
    say!("max energy drift: {}", sig17::fmt(energy_drift));
    say!("killing drift: {}", sig17::fmt(k.drift));
    say!("killing expected: {}", sig17::fmt(k.expected));
    Ok(Status::from_bool(energy_drift < ENERGY_TOL && k.drift < KILLING_TOL))
}
