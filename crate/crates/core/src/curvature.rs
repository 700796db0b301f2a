//! Pointwise geometry of `g = dt^2 + f(t)^2 g_F`, `Ric_F = tau g_F`.
//!
//! The Ricci endomorphism has two eigenvalues: `mu` on the radial line and
//! `lambda` (multiplicity `n`) on the fiber. Tensors here are invariant under
//! fiber isometries, so a tangent vector is modeled by its radial component
//! and a short fiber representative; fiber traces always use `n` itself.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::params::FamilyParams;
use crate::profile::{Jet, Profile};
use crate::quad;

/// Below this value of `f` the eigenvalues use the pole expansion.
pub const POLE_THRESHOLD: f64 = 1e-3;

/// Length of the fiber representative of a tangent vector.
pub const FIBER_REP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TangentVector {
    pub r: f64,
    pub v: [f64; FIBER_REP],
}

impl TangentVector {
    pub fn new(r: f64, v: [f64; FIBER_REP]) -> Self {
        Self { r, v }
    }

    pub fn radial(r: f64) -> Self {
        Self { r, v: [0.0; FIBER_REP] }
    }

    pub fn fiber(v: [f64; FIBER_REP]) -> Self {
        Self { r: 0.0, v }
    }

    pub fn dt_component(&self) -> f64 {
        self.r
    }

    fn fiber_dot(&self, other: &Self) -> f64 {
        self.v.iter().zip(&other.v).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0.0 && self.v.iter().all(|&x| x == 0.0)
    }
}

/// Ricci eigenvalues and their radial derivatives at one point.
#[derive(Clone, Copy, Debug)]
pub struct RicciJet {
    pub jet: Jet,
    pub lambda: f64,
    pub mu: f64,
    pub dlambda: f64,
    pub dmu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenData {
    pub lambda: f64,
    pub mu: f64,
    pub scal: f64,
    pub lambda_s: f64,
    pub mu_s: f64,
    pub alpha: f64,
    pub xi_r: f64,
}

/// Ricci eigenvalues `(lambda, mu)` of a warped product from `f, f', f''`,
/// with no assumption that `f` solves the profile ODE.
pub fn eigenvalues_from_jet(params: &FamilyParams, f: f64, fp: f64, fpp: f64) -> (f64, f64) {
    let n = params.nf();
    let lambda = (params.tau - f * fpp - (n - 1.0) * fp * fp) / (f * f);
    let mu = -n * fpp / f;
    (lambda, mu)
}

#[derive(Clone, Debug)]
pub struct WarpedMetric {
    params: FamilyParams,
    profile: Profile,
}

impl WarpedMetric {
    pub fn new(profile: Profile) -> Self {
        Self { params: *profile.params(), profile }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Total dimension `n + 1`.
    pub fn m(&self) -> usize {
        self.params.n as usize + 1
    }

    pub fn ricci_jet(&self, t: f64) -> Result<RicciJet> {
        let jet = self.profile.jet(t)?;
        let p = &self.params;
        let n = p.nf();
        let Jet { f, fp, fpp, fppp } = jet;
        if f.abs() < POLE_THRESHOLD {
            let (a, e) = (p.a, p.eps());
            return Ok(RicciJet {
                jet,
                lambda: -n * a - (n + 1.0) * e * f * f,
                mu: -n * a - 2.0 * n * e * f * f,
                dlambda: -2.0 * (n + 1.0) * e * f * fp,
                dmu: -4.0 * n * e * f * fp,
            });
        }
        let (lambda, mu) = eigenvalues_from_jet(p, f, fp, fpp);
        let dnum = -fp * fpp - f * fppp - 2.0 * (n - 1.0) * fp * fpp;
        let dlambda = (dnum - 2.0 * lambda * f * fp) / (f * f);
        let dmu = -n * (fppp * f - fpp * fp) / (f * f);
        Ok(RicciJet { jet, lambda, mu, dlambda, dmu })
    }

    /// `(lambda, mu)`; at poles both tend to `-n A`.
    pub fn ricci_eigenvalues(&self, t: f64) -> Result<(f64, f64)> {
        let r = self.ricci_jet(t)?;
        Ok((r.lambda, r.mu))
    }

    /// Scalar curvature, Killing-tensor eigenvalues and conformal field data.
    pub fn scalar_and_shifted(&self, t: f64) -> Result<EigenData> {
        let r = self.ricci_jet(t)?;
        Ok(self.eigen_data(&r))
    }

    pub(crate) fn eigen_data(&self, r: &RicciJet) -> EigenData {
        let n = self.params.nf();
        let m = n + 1.0;
        let scal = r.mu + n * r.lambda;
        let shift = 2.0 * scal / (m + 2.0);
        let root_c = self.params.c.abs().sqrt();
        EigenData {
            lambda: r.lambda,
            mu: r.mu,
            scal,
            lambda_s: r.lambda - shift,
            mu_s: r.mu - shift,
            alpha: 2.0 * root_c * r.jet.fp,
            xi_r: root_c * r.jet.f,
        }
    }

    fn f_nonzero(&self, t: f64) -> Result<Jet> {
        let j = self.profile.jet(t)?;
        if j.f == 0.0 {
            return Err(Error::PoleEvaluation { t });
        }
        Ok(j)
    }

    /// `g(X, Y) = X.r Y.r + f^2 <X.v, Y.v>`.
    pub fn inner(&self, t: f64, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        let j = self.f_nonzero(t)?;
        Ok(x.r * y.r + j.f * j.f * x.fiber_dot(y))
    }

    /// `(nabla_X rho)(Y, Z)` for `rho = lambda g + (mu - lambda) dt (x) dt`,
    /// using `nabla dt = (f'/f)(g - dt (x) dt)`.
    pub fn nabla_ricci(
        &self,
        t: f64,
        x: &TangentVector,
        y: &TangentVector,
        z: &TangentVector,
    ) -> Result<f64> {
        let r = self.ricci_jet(t)?;
        if r.jet.f == 0.0 {
            return Err(Error::PoleEvaluation { t });
        }
        Ok(nabla_two_eigen(
            r.jet.f,
            r.jet.fp,
            (r.lambda, r.dlambda),
            (r.mu, r.dmu),
            x,
            y,
            z,
        ))
    }

    /// Eigenvalue track over the profile grid, as CSV
    /// `t,lambda,mu,scal,lambda_S,mu_S,alpha`.
    pub fn write_eigen_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,lambda,mu,scal,lambda_S,mu_S,alpha")?;
        for t in self.profile.grid() {
            let e = self.scalar_and_shifted(t).map_err(io::Error::other)?;
            let row = [t, e.lambda, e.mu, e.scal, e.lambda_s, e.mu_s, e.alpha]
                .map(sig17::fmt)
                .join(",");
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// Covariant derivative of a symmetric tensor `a g + (b - a) dt (x) dt`
/// whose coefficients depend on `t` only.
pub(crate) fn nabla_two_eigen(
    f: f64,
    fp: f64,
    (a, da): (f64, f64),
    (b, db): (f64, f64),
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> f64 {
    let f2 = f * f;
    let g = |u: &TangentVector, w: &TangentVector| u.r * w.r + f2 * u.fiber_dot(w);
    let gap = b - a;
    da * x.r * g(y, z)
        + (db - da) * x.r * y.r * z.r
        + gap * (fp / f) * ((g(x, y) - x.r * y.r) * z.r + y.r * (g(x, z) - x.r * z.r))
}

/// Radial conformal factor `u(t)` with its first two derivatives.
pub trait ConformalFactor {
    fn eval(&self, t: f64) -> Result<(f64, f64, f64)>;
}

impl<F> ConformalFactor for F
where
    F: Fn(f64) -> Result<(f64, f64, f64)>,
{
    fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        self(t)
    }
}

/// The metric `e^{2u} g` rewritten as `d sigma^2 + F(sigma)^2 g_F`.
pub struct ConformalWarp<'a, U> {
    metric: &'a WarpedMetric,
    u: U,
    sigma: quad::Cumulative,
}

/// One point of a reparametrized warped metric.
#[derive(Clone, Copy, Debug)]
pub struct ConformalPoint {
    pub sigma: f64,
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Panels of the tabulated `sigma(t)` over the sampling window.
const SIGMA_PANELS: usize = 1000;

/// `sigma(t) = int_0^t e^u`, `F = e^u f`, `dF/dsigma = u' f + f'`.
pub fn conformal_to_warped<U: ConformalFactor>(
    metric: &WarpedMetric,
    u: U,
) -> Result<ConformalWarp<'_, U>> {
    let (lo, hi) = metric.profile.sampling_interval();
    let sigma =
        quad::Cumulative::new(&|s| u.eval(s).map(|(v, _, _)| v.exp()), lo, hi, SIGMA_PANELS)?;
    Ok(ConformalWarp { metric, u, sigma })
}

impl<U: ConformalFactor> ConformalWarp<'_, U> {
    pub fn at(&self, t: f64) -> Result<ConformalPoint> {
        let j = self.metric.profile.jet(t)?;
        let (u, du, ddu) = self.u.eval(t)?;
        let sigma = self.sigma.at(&|s| self.u.eval(s).map(|(v, _, _)| v.exp()), t)?;
        let eu = u.exp();
        let f = eu * j.f;
        let df = du * j.f + j.fp;
        let ddf = (ddu * j.f + du * j.fp + j.fpp) / eu;
        let (lambda, mu) = eigenvalues_from_jet(self.metric.params(), f, df, ddf);
        Ok(ConformalPoint { sigma, f, df, ddf, lambda, mu })
    }
}
