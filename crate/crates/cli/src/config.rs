//! Run configuration: a JSON document mirrored by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use warpgray::verify::Check;
use warpgray::{Family, FamilyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Verify,
    Sweep,
    Geodesic,
}

/// Everything needed to reproduce a run. Missing fields take defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub family: Option<Family>,
    pub n: Option<u32>,
    pub tau: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub eps: Option<f64>,
    pub numeric: Option<bool>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub checks: Option<Vec<Check>>,
    pub perturb: Option<f64>,
    pub perturb_k: Option<f64>,
    pub expect_no_ew: Option<bool>,
    pub a_from: Option<f64>,
    pub a_to: Option<f64>,
    pub steps: Option<usize>,
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub t0: Option<f64>,
    pub duration: Option<f64>,
    pub dir: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        overlay!(self, other; command, family, n, tau, a, c, eps, numeric, rtol, atol, samples,
            seed, checks, perturb, perturb_k, expect_no_ew, a_from, a_to, steps, energy, l, t0,
            duration, dir, out_dir);
    }

    pub fn n(&self) -> u32 {
        self.n.unwrap_or(3)
    }

    pub fn family(&self) -> Result<Family> {
        self.family.context("missing --family (compact, ray or periodic)")
    }

    /// Family constants with `A` supplied separately (sweeps vary it).
    pub fn params_with_a(&self, a: f64) -> Result<FamilyParams> {
        let family = self.family()?;
        let n = self.n();
        let nf = n as f64;
        let tau = match (self.tau, family) {
            (Some(t), _) => t,
            (None, Family::Periodic) => bail!("periodic families need --tau"),
            (None, _) => nf - 1.0,
        };
        let c = match (self.c, self.eps) {
            (Some(c), _) => c,
            (None, Some(e)) => {
                if e != 1.0 && e != -1.0 {
                    bail!("--eps must be +1 or -1, got {e}");
                }
                e * (nf - 1.0)
            }
            (None, None) if family == Family::Periodic => -(nf - 1.0),
            (None, None) => nf - 1.0,
        };
        Ok(FamilyParams::new(n, tau, a, c)?)
    }

    pub fn params(&self) -> Result<FamilyParams> {
        self.params_with_a(self.a.context("missing --A")?)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(100)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn checks(&self) -> Vec<Check> {
        self.checks.clone().unwrap_or_else(|| Check::ALL.to_vec())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Debug, Parser)]
#[command(name = "warpgray", version, about = "Gray warped-product profiles: solve, verify, sweep, geodesics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve a profile; writes profile.csv, eigen.csv and meta.json.
    Solve(Flags),
    /// Run residual checks; writes report.json.
    Verify(Flags),
    /// Scan A over a range; writes sweep.csv.
    Sweep(Flags),
    /// Integrate a geodesic; writes geodesic.csv.
    Geodesic(Flags),
}

impl CliCommand {
    pub fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Solve(f) => (Command::Solve, f),
            CliCommand::Verify(f) => (Command::Verify, f),
            CliCommand::Sweep(f) => (Command::Sweep, f),
            CliCommand::Geodesic(f) => (Command::Geodesic, f),
        }
    }
}

#[derive(Debug, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct Flags {
    /// JSON config; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    #[arg(long)]
    pub family: Option<FamilyArg>,
    /// Fiber dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Fiber Einstein constant (defaults to n-1 for compact and ray).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "C", conflicts_with = "eps")]
    pub c: Option<f64>,
    /// Sign of C with |C| = n-1.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Integrate numerically even when a closed form exists.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated: gray,killing,ew,invariants,relations,conf-einstein,distribution.
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Multiply f by 1 + amplitude sin(k t).
    #[arg(long)]
    pub perturb: Option<f64>,
    #[arg(long)]
    pub perturb_k: Option<f64>,
    /// Treat a negative eigenvalue gap as the expected outcome of the Einstein-Weyl checks.
    #[arg(long)]
    pub expect_no_ew: bool,
    #[arg(long = "A-from")]
    pub a_from: Option<f64>,
    #[arg(long = "A-to")]
    pub a_to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Geodesic energy.
    #[arg(long = "E")]
    pub energy: Option<f64>,
    /// Clairaut constant.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Initial radius of the geodesic.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    /// Sign of the initial radial velocity.
    #[arg(long)]
    pub dir: Option<f64>,
    /// Directory for output files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Compact,
    Ray,
    Periodic,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Compact => Family::Compact,
            FamilyArg::Ray => Family::Ray,
            FamilyArg::Periodic => Family::Periodic,
        }
    }
}

impl Flags {
    /// Config file (if any) overlaid with the explicit flags.
    pub fn resolve(&self, command: Command) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let checks = match &self.checks {
            Some(v) => Some(v.iter().map(|s| s.parse::<Check>()).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        let flags = RunConfig {
            command: Some(command),
            family: self.family.map(Family::from),
            n: self.n,
            tau: self.tau,
            a: self.a,
            c: self.c,
            eps: self.eps,
            numeric: self.numeric.then_some(true),
            rtol: self.rtol,
            atol: self.atol,
            samples: self.samples,
            seed: self.seed,
            checks,
            perturb: self.perturb,
            perturb_k: self.perturb_k,
            expect_no_ew: self.expect_no_ew.then_some(true),
            a_from: self.a_from,
            a_to: self.a_to,
            steps: self.steps,
            energy: self.energy,
            l: self.l,
            t0: self.t0,
            duration: self.duration,
            dir: self.dir,
            out_dir: self.out_dir.clone(),
        };
        if flags.c.is_some() && cfg.eps.is_some() {
            cfg.eps = None;
        }
        if flags.eps.is_some() && cfg.c.is_some() {
            cfg.c = None;
        }
        cfg.overlay(&flags);
        Ok(cfg)
    }
}
