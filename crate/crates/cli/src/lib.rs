//! Command-line front end for the warpgray solvers and checks.

pub mod config;
pub mod run;
