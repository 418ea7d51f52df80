//! Experiment drivers. Each computes a [`RunOutput`]; [`run_and_write`] saves
//! the table with its digest sidecar, prints the summary and turns failed
//! checks into exit code 2.

mod continuity;
pub mod report;
mod schwinger;
mod sweep;
mod verify;

use std::fmt;
use std::path::PathBuf;

use hole_qft::hole_theory::{chi_from_current, natural_lambda_unit, packet_two_mode, PositivePacket};
use hole_qft::GaugePulse;

use crate::columnar::{self, Table};
use crate::config::{LambdaUnits, PulseKind, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    VerifyEvolution,
    HtSweep,
    Schwinger,
    Continuity,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::VerifyEvolution, Kind::HtSweep, Kind::Schwinger, Kind::Continuity];

    pub fn command(self) -> &'static str {
        match self {
            Kind::VerifyEvolution => "verify-evolution",
            Kind::HtSweep => "ht-sweep",
            Kind::Schwinger => "schwinger",
            Kind::Continuity => "continuity",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Kind::VerifyEvolution => "verify_evolution",
            Kind::HtSweep => "ht_sweep",
            Kind::Schwinger => "schwinger",
            Kind::Continuity => "continuity",
        }
    }

    /// Config sections the output depends on.
    pub fn sections(self) -> &'static [&'static str] {
        match self {
            Kind::VerifyEvolution => &["sim", "pulse", "packet", "integrator"],
            Kind::HtSweep => &["sim", "pulse", "packet"],
            Kind::Schwinger => &["sim", "fock"],
            Kind::Continuity => &["sim", "pulse", "packet", "fock", "integrator"],
        }
    }

    pub fn path(self, cfg: &RunConfig) -> PathBuf {
        cfg.output.dir.join(self.file_name())
    }

    pub fn compute(self, cfg: &RunConfig) -> Result<RunOutput, CliError> {
        match self {
            Kind::VerifyEvolution => verify::compute(cfg),
            Kind::HtSweep => sweep::compute(cfg),
            Kind::Schwinger => schwinger::compute(cfg),
            Kind::Continuity => continuity::compute(cfg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Below(f64),
    Above(f64),
    Within { target: f64, tolerance: f64 },
}

/// One tolerance check with its measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
        }
    }

    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::Below(limit) => self.measured < limit,
            Bound::Above(limit) => self.measured > limit,
            Bound::Within { target, tolerance } => (self.measured - target).abs() <= tolerance,
        }
    }
}

impl Check {
    /// `name: measured X, required B`.
    pub fn describe(&self) -> String {
        let bound = match self.bound {
            Bound::Below(l) => format!("< {l:e}"),
            Bound::Above(l) => format!("> {l:e}"),
            Bound::Within { target, tolerance } => format!("{target} ± {tolerance}"),
        };
        format!("{}: measured {:.6e}, required {bound}", self.name, self.measured)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.pass() { "ok  " } else { "FAIL" }, self.describe())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    /// Human-readable summary lines.
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
    /// Extra files to write next to the table.
    pub extra: Vec<(String, Table)>,
}

impl RunOutput {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }
}

pub fn write_output(cfg: &RunConfig, kind: Kind, out: &RunOutput) -> Result<(), CliError> {
    let digest = cfg.digest(kind.sections());
    columnar::write(&kind.path(cfg), &out.table, kind.command(), &digest)?;
    for (name, table) in &out.extra {
        columnar::write(&cfg.output.dir.join(name), table, kind.command(), &digest)?;
    }
    Ok(())
}

pub fn run_and_write(cfg: &RunConfig, kind: Kind) -> Result<(), CliError> {
    let out = kind.compute(cfg)?;
    write_output(cfg, kind, &out)?;
    println!("{}", kind.command());
    for line in &out.lines {
        println!("  {line}");
    }
    for check in &out.checks {
        println!("  {check}");
    }
    println!("  wrote {}", kind.path(cfg).display());
    match out.failures().first() {
        None => Ok(()),
        Some(c) => Err(CliError::Tolerance(c.describe())),
    }
}

pub(crate) fn packet(cfg: &RunConfig) -> Result<PositivePacket, CliError> {
    Ok(packet_two_mode(cfg.packet.r, cfg.packet.s, &cfg.sim())?)
}

/// A packet without current slope cannot define the derived pulse; that is a
/// property of `packet.r`/`packet.s`, so report it against them.
pub(crate) fn slope_error(e: hole_qft::Error) -> CliError {
    match e {
        hole_qft::Error::CurrentDerivativeVanishes => CliError::Config {
            key: "packet.s".into(),
            reason: format!("{e} (single modes and r = -s pairs carry a flat current)"),
        },
        other => other.into(),
    }
}

/// `pulse.lambda` converted to physical units.
pub(crate) fn physical_lambdas(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let unit = match cfg.pulse.lambda_units {
        LambdaUnits::Physical => 1.0,
        LambdaUnits::Slope => natural_lambda_unit(&packet(cfg)?, &cfg.sim()).map_err(slope_error)?,
    };
    Ok(cfg.pulse.lambda.iter().map(|l| l * unit).collect())
}

/// Pulse used by the single-pulse commands: explicit harmonics, or the
/// derived pulse at the largest `|λ|`.
pub(crate) fn selected_pulse(cfg: &RunConfig) -> Result<GaugePulse, CliError> {
    match cfg.pulse.kind {
        PulseKind::Harmonics => cfg.harmonic_pulse(),
        PulseKind::FromCurrent => {
            let lambda = physical_lambdas(cfg)?
                .into_iter()
                .fold(0.0f64, |m, l| if l.abs() > m.abs() { l } else { m });
            let sim = cfg.sim();
            chi_from_current(&packet(cfg)?, lambda, sim.t1, &sim).map_err(slope_error)
        }
    }
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
