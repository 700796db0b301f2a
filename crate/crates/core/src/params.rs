use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which solution regime of the warp ODE a profile represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Closes up at two poles: a metric on the sphere.
    Compact,
    /// One pole at t = 0, open towards infinity (or finite-time blow-up).
    Ray,
    /// Oscillates between two positive quartic roots; no poles.
    Periodic,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Compact => "compact",
            Family::Ray => "ray",
            Family::Periodic => "periodic",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compact" => Ok(Family::Compact),
            "ray" => Ok(Family::Ray),
            "periodic" => Ok(Family::Periodic),
            other => Err(Error::InvalidParams(format!("unknown family `{other}`"))),
        }
    }
}

/// Constants defining one warp-profile family.
///
/// The warp function obeys the first integral
/// `(f')^2 = tau/(n-1) + A f^2 + C/(n-1) f^4`, with the fiber an Einstein
/// manifold of dimension `n` and `Ric = tau g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: u32,
    pub tau: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl FamilyParams {
    pub fn new(n: u32, tau: f64, a: f64, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("fiber dimension n = {n} < 2")));
        }
        if !(tau.is_finite() && a.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParams("non-finite constant".into()));
        }
        if c == 0.0 {
            return Err(Error::InvalidParams("C must be nonzero".into()));
        }
        Ok(Self { n, tau, a, c })
    }

    /// Round-sphere fiber (`tau = n - 1`) with `C = eps (n - 1)`.
    pub fn sphere(n: u32, eps: f64, a: f64) -> Result<Self> {
        if eps != 1.0 && eps != -1.0 {
            return Err(Error::InvalidParams(format!("eps must be +1 or -1, got {eps}")));
        }
        let nm1 = n.saturating_sub(1) as f64;
        Self::new(n, nm1, a, eps * nm1)
    }

    /// Negatively curved Einstein fiber with `C = -(n - 1)`.
    pub fn periodic(n: u32, tau: f64, a: f64) -> Result<Self> {
        let nm1 = n.saturating_sub(1) as f64;
        Self::new(n, tau, a, -nm1)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Total dimension `m = n + 1`.
    pub fn m(&self) -> f64 {
        self.nf() + 1.0
    }

    /// `tau / (n - 1)`.
    pub fn tau_norm(&self) -> f64 {
        self.tau / (self.nf() - 1.0)
    }

    /// `C / (n - 1)`; equals the sign `eps` for normalized families.
    pub fn eps(&self) -> f64 {
        self.c / (self.nf() - 1.0)
    }

    pub fn is_sphere_fiber(&self) -> bool {
        (self.tau - (self.nf() - 1.0)).abs() <= 1e-12 * self.nf()
    }

    /// Short human-readable label used in reports.
    pub fn label(&self, family: Family) -> String {
        format!("{family}(n={},tau={},A={},C={})", self.n, self.tau, self.a, self.c)
    }
}
