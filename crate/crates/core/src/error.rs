use thiserror::Error;

use crate::profile::Profile;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("quartic has no admissible positive roots (discriminant {discriminant})")]
    NoRealRoots { discriminant: f64 },
    #[error("profile blew up at t = {t}")]
    BlowUp { t: f64, profile: Box<Profile> },
    #[error("t = {t} is outside the profile domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("evaluation at a pole (t = {t}, f = 0)")]
    PoleEvaluation { t: f64 },
    #[error("eigenvalue gap degenerate at t = {t}")]
    DegenerateGap { t: f64 },
    #[error("lambda - mu < 0 at t = {t}: no Einstein-Weyl pair")]
    NegativeGap { t: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Short machine-readable tag, used in sweep rows and CLI messages.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::FamilyMismatch(_) => "FamilyMismatch",
            Error::NoRealRoots { .. } => "NoRealRoots",
            Error::BlowUp { .. } => "BlowUp",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::PoleEvaluation { .. } => "PoleEvaluation",
            Error::DegenerateGap { .. } => "DegenerateGap",
            Error::NegativeGap { .. } => "NegativeGap",
            Error::Integration(_) => "Integration",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
