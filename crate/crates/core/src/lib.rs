//! Warp-profile solvers, curvature evaluation and residual checks for
//! warped-product metrics `dt^2 + f(t)^2 g_F` over Einstein fibers whose
//! Ricci tensor satisfies Gray's cyclic condition.

pub mod curvature;
pub mod error;
pub mod fmt;
pub mod geodesic;
mod ode;
pub mod params;
pub mod profile;
pub mod quad;
pub mod verify;

pub use curvature::{EigenData, TangentVector, WarpedMetric};
pub use error::{Error, Result};
pub use geodesic::{GeodesicPath, GeodesicState, Termination};
pub use params::{Family, FamilyParams};
pub use profile::{Jet, Profile, ProfileKind, StepControl};
pub use verify::{EwStructure, ResidualReport};
