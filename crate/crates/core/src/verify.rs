//! Residual checks for the structural identities of Gray warped products.
//!
//! Every check evaluates a pointwise residual at seeded random samples and
//! reduces them into a [`ResidualReport`]. Sample times are drawn from the
//! profile's sampling window with 2% trimmed at each end; tangent vector
//! components are uniform in `[-1, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{conformal_to_warped, nabla_two_eigen, TangentVector, WarpedMetric};
use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::params::Family;
use crate::quad;

pub mod tol {
    //! Default tolerance ladder.

    pub const GRAY: f64 = 1e-7;
    pub const KILLING: f64 = 1e-7;
    pub const DISTRIBUTION: f64 = 1e-7;
    pub const RELATIONS: f64 = 1e-7;
    pub const EINSTEIN_WEYL: f64 = 1e-8;
    pub const C0: f64 = 1e-8;
    pub const MU_S: f64 = 1e-8;
    pub const C1: f64 = 1e-7;
    pub const FIRST_INTEGRAL: f64 = 1e-8;
    pub const CONFORMAL_EINSTEIN: f64 = 1e-6;
    pub const ROUNDNESS: f64 = 1e-5;
}

/// Fraction of the sampling window trimmed at each end.
pub const TRIM: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    #[serde(rename = "check")]
    pub check_name: String,
    pub family: String,
    pub samples: usize,
    #[serde(serialize_with = "sig17::serialize")]
    pub max_residual: f64,
    #[serde(serialize_with = "sig17::serialize")]
    pub mean_residual: f64,
    #[serde(serialize_with = "sig17::serialize")]
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
}

impl ResidualReport {
    pub fn from_residuals(
        check: impl Into<String>,
        family: impl Into<String>,
        tolerance: f64,
        seed: u64,
        residuals: &[f64],
    ) -> Self {
        let samples = residuals.len();
        let max = residuals.iter().fold(0.0f64, |acc, &r| if r.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(r) });
        let mean = if samples == 0 { 0.0 } else { residuals.iter().sum::<f64>() / samples as f64 };
        Self {
            check_name: check.into(),
            family: family.into(),
            samples,
            max_residual: max,
            mean_residual: mean,
            tolerance,
            pass: max <= tolerance,
            seed,
        }
    }

    /// A check that could not be evaluated; reported as failing.
    pub fn failed(check: impl Into<String>, family: impl Into<String>, tolerance: f64, seed: u64) -> Self {
        Self {
            check_name: check.into(),
            family: family.into(),
            samples: 0,
            max_residual: f64::INFINITY,
            mean_residual: f64::INFINITY,
            tolerance,
            pass: false,
            seed,
        }
    }
}

/// Sample count and seed for one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { samples: 100, seed: 42 }
    }
}

/// Seeded generator of sample points; each check gets its own stream.
pub struct Sampler {
    rng: ChaCha8Rng,
    lo: f64,
    hi: f64,
}

impl Sampler {
    pub fn new(metric: &WarpedMetric, seed: u64, check: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(check));
        let (a, b) = metric.profile().sampling_interval();
        let w = b - a;
        Self { rng, lo: a + TRIM * w, hi: b - TRIM * w }
    }

    pub fn time(&mut self) -> f64 {
        self.rng.gen_range(self.lo..=self.hi)
    }

    pub fn vector(&mut self) -> TangentVector {
        let mut c = || self.rng.gen_range(-1.0..=1.0);
        TangentVector::new(c(), [c(), c(), c()])
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 }
    }
}

fn stream_id(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn family_label(metric: &WarpedMetric) -> String {
    let mut s = metric.params().label(metric.profile().family());
    if let Some(p) = metric.profile().perturbation() {
        s.push_str(&format!("+perturb({})", p.amplitude));
    }
    s
}

/// `|cyc nabla_X rho(Y,Z) - 2/(m+2) cyc X(Scal) g(Y,Z)|`.
pub fn gray_residual(
    metric: &WarpedMetric,
    t: f64,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<f64> {
    let r = metric.ricci_jet(t)?;
    if r.jet.f == 0.0 {
        return Err(Error::PoleEvaluation { t });
    }
    let n = metric.params().nf();
    let m = n + 1.0;
    let dscal = r.dmu + n * r.dlambda;
    let nab = |a: &TangentVector, b: &TangentVector, c: &TangentVector| {
        nabla_two_eigen(r.jet.f, r.jet.fp, (r.lambda, r.dlambda), (r.mu, r.dmu), a, b, c)
    };
    let lhs = nab(x, y, z) + nab(y, z, x) + nab(z, x, y);
    let rhs = 2.0 / (m + 2.0)
        * dscal
        * (x.r * metric.inner(t, y, z)? + y.r * metric.inner(t, z, x)? + z.r * metric.inner(t, x, y)?);
    Ok((lhs - rhs).abs())
}

/// Single-vector form `|nabla_X rho(X,X) - 2/(m+2) X(Scal) g(X,X)|`.
pub fn gray_residual_polarized(metric: &WarpedMetric, t: f64, x: &TangentVector) -> Result<f64> {
    Ok(gray_residual(metric, t, x, x, x)? / 3.0)
}

/// `|nabla_X T(X,X)|` for `T = rho - 2 Scal/(m+2) g`.
pub fn killing_residual(metric: &WarpedMetric, t: f64, x: &TangentVector) -> Result<f64> {
    let r = metric.ricci_jet(t)?;
    if r.jet.f == 0.0 {
        return Err(Error::PoleEvaluation { t });
    }
    let n = metric.params().nf();
    let m = n + 1.0;
    let e = metric.eigen_data(&r);
    let dshift = 2.0 * (r.dmu + n * r.dlambda) / (m + 2.0);
    Ok(nabla_two_eigen(
        r.jet.f,
        r.jet.fp,
        (e.lambda_s, r.dlambda - dshift),
        (e.mu_s, r.dmu - dshift),
        x,
        x,
        x,
    )
    .abs())
}

/// `|g(nabla_X X, Y) - (Y lambda_S) / (2 (mu_S - lambda_S)) |X|^2|` for a
/// fiber vector `X` and a radial vector `Y`.
pub fn distribution_identities_residual(
    metric: &WarpedMetric,
    t: f64,
    x_fiber: &TangentVector,
    y_radial: &TangentVector,
) -> Result<f64> {
    if x_fiber.r != 0.0 || y_radial.v.iter().any(|&c| c != 0.0) {
        return Err(Error::InvalidParams("need a fiber X and a radial Y".into()));
    }
    let r = metric.ricci_jet(t)?;
    if r.jet.f == 0.0 {
        return Err(Error::PoleEvaluation { t });
    }
    let n = metric.params().nf();
    let e = metric.eigen_data(&r);
    let gap = e.mu_s - e.lambda_s;
    if gap.abs() < 1e-10 {
        return Err(Error::DegenerateGap { t });
    }
    let dlambda_s = r.dlambda - 2.0 * (r.dmu + n * r.dlambda) / (n + 3.0);
    let vv: f64 = x_fiber.v.iter().map(|c| c * c).sum();
    let lhs = -r.jet.f * r.jet.fp * vv * y_radial.r;
    let norm_x = metric.inner(t, x_fiber, x_fiber)?;
    let rhs = 0.5 * y_radial.r * dlambda_s / gap * norm_x;
    Ok((lhs - rhs).abs())
}

/// A closed Lee form `omega = omega_r(t) dt` built from the eigenvalue gap.
#[derive(Clone, Copy, Debug)]
pub struct EwStructure<'a> {
    metric: &'a WarpedMetric,
    sign: f64,
}

impl<'a> EwStructure<'a> {
    /// Fails with `NegativeGap` at the first sample where `lambda < mu`.
    pub fn new(metric: &'a WarpedMetric, sign: f64) -> Result<Self> {
        if let Some(t) = negative_gap_witness(metric)? {
            return Err(Error::NegativeGap { t });
        }
        Ok(Self { metric, sign: sign.signum() })
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// `(omega_r, d omega_r / dt)` with `omega_r = sign 2 sqrt((lambda - mu)/(m - 2))`.
    pub fn omega(&self, t: f64) -> Result<(f64, f64)> {
        let r = self.metric.ricci_jet(t)?;
        let m2 = self.metric.params().nf() - 1.0;
        let q = ((r.lambda - r.mu) / m2).max(0.0);
        let dq = (r.dlambda - r.dmu) / m2;
        let w = self.sign * 2.0 * q.sqrt();
        let dw = if q > 0.0 {
            self.sign * dq / q.sqrt()
        } else {
            // pole: q ~ C' f^2, so sqrt(q) ~ sqrt(C') |f|
            let j = r.jet;
            self.sign * 2.0 * (self.metric.params().c / m2).abs().sqrt() * j.fp
        };
        Ok((w, dw))
    }

    /// Radial-radial and fiber-fiber values of `Lambda` from
    /// `rho + (m-2)/4 D omega = Lambda g`.
    pub fn components(&self, t: f64) -> Result<(f64, f64)> {
        let r = self.metric.ricci_jet(t)?;
        if r.jet.f == 0.0 {
            return Err(Error::PoleEvaluation { t });
        }
        let m2 = self.metric.params().nf() - 1.0;
        let (w, dw) = self.omega(t)?;
        let radial = r.mu + 0.25 * m2 * (2.0 * dw + w * w);
        let fiber = r.lambda + 0.5 * m2 * w * r.jet.fp / r.jet.f;
        Ok((radial, fiber))
    }

    /// `Lambda(t)`, taken from the fiber component.
    pub fn big_lambda(&self, t: f64) -> Result<f64> {
        Ok(self.components(t)?.1)
    }

    /// `2 Lambda + div omega - (m-2)/2 |omega|^2`, with
    /// `div omega = omega_r' + n (f'/f) omega_r`.
    pub fn lambda_bar(&self, t: f64) -> Result<f64> {
        let j = self.metric.profile().jet(t)?;
        if j.f == 0.0 {
            return Err(Error::PoleEvaluation { t });
        }
        let n = self.metric.params().nf();
        let (w, dw) = self.omega(t)?;
        let div = dw + n * j.fp / j.f * w;
        Ok(2.0 * self.big_lambda(t)? + div - 0.5 * (n - 1.0) * w * w)
    }
}

/// First grid time where `lambda - mu` is clearly negative.
fn negative_gap_witness(metric: &WarpedMetric) -> Result<Option<f64>> {
    for t in scan_grid(metric) {
        let (l, m) = metric.ricci_eigenvalues(t)?;
        if l - m < -1e-12 * l.abs().max(m.abs()).max(1.0) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn scan_grid(metric: &WarpedMetric) -> Vec<f64> {
    let (a, b) = metric.profile().sampling_interval();
    (0..=200).map(|i| (a + (b - a) * i as f64 / 200.0).min(b)).collect()
}

/// `lambda_bar` through a fresh structure of the given sign.
pub fn lambda_bar(metric: &WarpedMetric, ew: &EwStructure<'_>, t: f64) -> Result<f64> {
    debug_assert!(std::ptr::eq(metric, ew.metric));
    ew.lambda_bar(t)
}

/// Builds the structure and reports `|Lambda_radial - Lambda_fiber|`.
pub fn einstein_weyl_check<'a>(
    metric: &'a WarpedMetric,
    sign: f64,
    spec: SampleSpec,
) -> Result<(EwStructure<'a>, ResidualReport)> {
    let ew = EwStructure::new(metric, sign)?;
    let name = if sign > 0.0 { "einstein_weyl[+]" } else { "einstein_weyl[-]" };
    let mut s = Sampler::new(metric, spec.seed, name);
    let mut res = Vec::with_capacity(spec.samples);
    for _ in 0..spec.samples {
        let (radial, fiber) = ew.components(s.time())?;
        res.push((radial - fiber).abs());
    }
    let report =
        ResidualReport::from_residuals(name, family_label(metric), tol::EINSTEIN_WEYL, spec.seed, &res);
    Ok((ew, report))
}

/// Sign of the `alpha^2` term that makes `s (m-1)^2 alpha^2 + (m-2) mu^2`
/// constant: `-1` where `lambda > mu` (`C > 0`), `+1` where `lambda < mu`.
pub fn c1_alpha_sign(metric: &WarpedMetric) -> f64 {
    -metric.params().c.signum()
}

/// Expected constants for a profile family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedConstants {
    /// `m mu - 2 (m-1) lambda = n (n-1) A`.
    pub c0: f64,
    /// `mu_S = n A (n-1) / (n+3)`.
    pub mu_s: f64,
    /// `n^2 (n-1) (A^2 - 4 eps tau/(n-1))` for the sign of [`c1_alpha_sign`].
    pub c1: f64,
}

pub fn expected_constants(metric: &WarpedMetric) -> ExpectedConstants {
    let p = metric.params();
    let n = p.nf();
    ExpectedConstants {
        c0: n * (n - 1.0) * p.a,
        mu_s: n * p.a * (n - 1.0) / (n + 3.0),
        c1: n * n * (n - 1.0) * (p.a * p.a - 4.0 * p.eps() * p.tau_norm()),
    }
}

/// Pointwise values `(C0, C1, mu_S, first-integral residual)`.
pub fn invariant_values(metric: &WarpedMetric, t: f64) -> Result<[f64; 4]> {
    let r = metric.ricci_jet(t)?;
    let e = metric.eigen_data(&r);
    let n = metric.params().nf();
    let m = n + 1.0;
    let c0 = m * e.mu - 2.0 * (m - 1.0) * e.lambda;
    let c1 = c1_alpha_sign(metric) * (m - 1.0).powi(2) * e.alpha * e.alpha + (m - 2.0) * e.mu * e.mu;
    let p = crate::profile::first_integral_rhs(metric.params(), r.jet.f);
    let fi = (r.jet.fp * r.jet.fp - p).abs() / p.abs().max(1.0);
    Ok([c0, c1, e.mu_s, fi])
}

/// Deviation of `C0`, `C1`, `mu_S` from their closed-form values and the
/// first-integral residual, over seeded samples.
pub fn invariants_scan(metric: &WarpedMetric, spec: SampleSpec) -> Result<Vec<ResidualReport>> {
    let exp = expected_constants(metric);
    let mut s = Sampler::new(metric, spec.seed, "invariants");
    let mut cols: [Vec<f64>; 4] = Default::default();
    for _ in 0..spec.samples {
        let v = invariant_values(metric, s.time())?;
        cols[0].push((v[0] - exp.c0).abs());
        cols[1].push((v[1] - exp.c1).abs());
        cols[2].push((v[2] - exp.mu_s).abs());
        cols[3].push(v[3]);
    }
    let fam = family_label(metric);
    let c1_name =
        if c1_alpha_sign(metric) < 0.0 { "invariant_c1[-alpha2]" } else { "invariant_c1[+alpha2]" };
    Ok(vec![
        ResidualReport::from_residuals("invariant_c0", &fam, tol::C0, spec.seed, &cols[0]),
        ResidualReport::from_residuals(c1_name, &fam, tol::C1, spec.seed, &cols[1]),
        ResidualReport::from_residuals("invariant_mu_s", &fam, tol::MU_S, spec.seed, &cols[2]),
        ResidualReport::from_residuals("first_integral", &fam, tol::FIRST_INTEGRAL, spec.seed, &cols[3]),
    ])
}

/// `r1 = |d lambda_S/dt - sgn(C) alpha xi_r|`, `r2 = |d alpha/dt + 2 mu/(m-1) xi_r|`.
pub fn relations_residual(metric: &WarpedMetric, t: f64) -> Result<(f64, f64)> {
    let r = metric.ricci_jet(t)?;
    if r.jet.f == 0.0 {
        return Err(Error::PoleEvaluation { t });
    }
    let p = metric.params();
    let n = p.nf();
    let e = metric.eigen_data(&r);
    let dlambda_s = r.dlambda - 2.0 * (r.dmu + n * r.dlambda) / (n + 3.0);
    let dalpha = 2.0 * p.c.abs().sqrt() * r.jet.fpp;
    let r1 = (dlambda_s - p.c.signum() * e.alpha * e.xi_r).abs();
    let r2 = (dalpha + 2.0 * e.mu / n * e.xi_r).abs();
    Ok((r1, r2))
}

/// Panels of the tabulated Lee potential.
const LEE_PANELS: usize = 1000;

/// Rescales by `exp(sign phi)` and reports `max |lambda~ - mu~|`; compact
/// families also get a constancy report for `lambda~` (round sphere).
pub fn conformally_einstein_residual(
    metric: &WarpedMetric,
    sign: f64,
    spec: SampleSpec,
) -> Result<Vec<ResidualReport>> {
    let ew = EwStructure::new(metric, 1.0)?;
    let sign = sign.signum();
    // phi(t) = int_0^t omega_r of the + structure
    let omega = |s: f64| ew.omega(s).map(|(w, _)| w);
    let (lo, hi) = metric.profile().sampling_interval();
    let phi_table = quad::Cumulative::new(&omega, lo, hi, LEE_PANELS)?;
    let u = |t: f64| -> Result<(f64, f64, f64)> {
        let phi = phi_table.at(&omega, t)?;
        let (w, dw) = ew.omega(t)?;
        Ok((0.5 * sign * phi, 0.5 * sign * w, 0.5 * sign * dw))
    };
    let warp = conformal_to_warped(metric, u)?;
    let tag = if sign > 0.0 { "+" } else { "-" };
    let name = format!("conformally_einstein[{tag}]");
    let mut s = Sampler::new(metric, spec.seed, &name);
    let mut gaps = Vec::with_capacity(spec.samples);
    let mut lambdas = Vec::with_capacity(spec.samples);
    for _ in 0..spec.samples {
        let pt = warp.at(s.time())?;
        gaps.push((pt.lambda - pt.mu).abs());
        lambdas.push(pt.lambda);
    }
    let fam = family_label(metric);
    let mut out =
        vec![ResidualReport::from_residuals(&name, &fam, tol::CONFORMAL_EINSTEIN, spec.seed, &gaps)];
    if metric.profile().family() == Family::Compact && !lambdas.is_empty() {
        let first = lambdas[0];
        let drift: Vec<f64> = lambdas.iter().map(|l| (l - first).abs()).collect();
        out.push(ResidualReport::from_residuals(
            format!("round_sphere[{tag}]"),
            &fam,
            tol::ROUNDNESS,
            spec.seed,
            &drift,
        ));
    }
    Ok(out)
}

/// Selectable check groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Gray,
    Killing,
    Ew,
    Invariants,
    Relations,
    ConfEinstein,
    Distribution,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Gray,
        Check::Killing,
        Check::Ew,
        Check::Invariants,
        Check::Relations,
        Check::ConfEinstein,
        Check::Distribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Gray => "gray",
            Check::Killing => "killing",
            Check::Ew => "ew",
            Check::Invariants => "invariants",
            Check::Relations => "relations",
            Check::ConfEinstein => "conf-einstein",
            Check::Distribution => "distribution",
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::InvalidParams(format!("unknown check `{s}`")))
    }
}

fn sampled<F>(metric: &WarpedMetric, name: &str, tolerance: f64, spec: SampleSpec, mut eval: F) -> ResidualReport
where
    F: FnMut(&mut Sampler) -> Result<f64>,
{
    let mut s = Sampler::new(metric, spec.seed, name);
    let mut res = Vec::with_capacity(spec.samples);
    for _ in 0..spec.samples {
        match eval(&mut s) {
            Ok(r) => res.push(r),
            Err(_) => return ResidualReport::failed(name, family_label(metric), tolerance, spec.seed),
        }
    }
    ResidualReport::from_residuals(name, family_label(metric), tolerance, spec.seed, &res)
}

/// Runs the selected checks. With `expect_no_ew`, a `NegativeGap`
/// obstruction is the expected outcome of the Einstein-Weyl checks and an
/// existing structure counts as a failure.
pub fn run_checks(
    metric: &WarpedMetric,
    checks: &[Check],
    spec: SampleSpec,
    expect_no_ew: bool,
) -> Vec<ResidualReport> {
    let fam = family_label(metric);
    let mut out = Vec::new();
    for &check in checks {
        match check {
            Check::Gray => out.push(sampled(metric, "gray", tol::GRAY, spec, |s| {
                let t = s.time();
                let (x, y, z) = (s.vector(), s.vector(), s.vector());
                gray_residual(metric, t, &x, &y, &z)
            })),
            Check::Killing => out.push(sampled(metric, "killing", tol::KILLING, spec, |s| {
                let t = s.time();
                killing_residual(metric, t, &s.vector())
            })),
            Check::Distribution => {
                out.push(sampled(metric, "distribution", tol::DISTRIBUTION, spec, |s| {
                    let t = s.time();
                    let mut x = s.vector();
                    x.r = 0.0;
                    let y = TangentVector::radial(s.uniform(-1.0, 1.0));
                    distribution_identities_residual(metric, t, &x, &y)
                }))
            }
            Check::Relations => out.push(sampled(metric, "relations", tol::RELATIONS, spec, |s| {
                let (r1, r2) = relations_residual(metric, s.time())?;
                Ok(r1.max(r2))
            })),
            Check::Invariants => match invariants_scan(metric, spec) {
                Ok(v) => out.extend(v),
                Err(_) => out.push(ResidualReport::failed("invariants", &fam, tol::C0, spec.seed)),
            },
            Check::Ew => {
                for sign in [1.0, -1.0] {
                    let name = if sign > 0.0 { "einstein_weyl[+]" } else { "einstein_weyl[-]" };
                    out.push(match einstein_weyl_check(metric, sign, spec) {
                        Ok((_, mut rep)) => {
                            if expect_no_ew {
                                rep.check_name = format!("{name}:expected_obstruction");
                                rep.pass = false;
                            }
                            rep
                        }
                        Err(Error::NegativeGap { .. }) if expect_no_ew => obstruction_report(
                            metric,
                            &format!("{name}:negative_gap"),
                            spec,
                        ),
                        Err(_) => ResidualReport::failed(name, &fam, tol::EINSTEIN_WEYL, spec.seed),
                    });
                }
            }
            Check::ConfEinstein => {
                for sign in [1.0, -1.0] {
                    let tag = if sign > 0.0 { "+" } else { "-" };
                    let name = format!("conformally_einstein[{tag}]");
                    match conformally_einstein_residual(metric, sign, spec) {
                        Ok(mut v) => {
                            if expect_no_ew {
                                for r in &mut v {
                                    r.pass = false;
                                }
                            }
                            out.extend(v)
                        }
                        Err(Error::NegativeGap { .. }) if expect_no_ew => out.push(
                            obstruction_report(metric, &format!("{name}:negative_gap"), spec),
                        ),
                        Err(_) => out.push(ResidualReport::failed(
                            name,
                            &fam,
                            tol::CONFORMAL_EINSTEIN,
                            spec.seed,
                        )),
                    }
                }
            }
        }
    }
    out
}

/// Report for an expected obstruction: residual `max(lambda - mu, 0)` over
/// the scan grid, which must vanish (`lambda <= mu` everywhere).
fn obstruction_report(metric: &WarpedMetric, name: &str, spec: SampleSpec) -> ResidualReport {
    let mut res = Vec::new();
    for t in scan_grid(metric) {
        match metric.ricci_eigenvalues(t) {
            Ok((l, m)) => res.push((l - m).max(0.0)),
            Err(_) => return ResidualReport::failed(name, family_label(metric), 1e-12, spec.seed),
        }
    }
    ResidualReport::from_residuals(name, family_label(metric), 1e-12, spec.seed, &res)
}
