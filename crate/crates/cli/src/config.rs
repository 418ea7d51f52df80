//! Run configuration: a sectioned TOML file, `--set section.key=value`
//! overrides, and an environment fallback for the output directory.
//!
//! Precedence, highest first: `--set`/`--out`, `HOLE_QFT_OUT_DIR`, the file,
//! built-in defaults.

use std::path::{Path, PathBuf};

use hole_qft::{Envelope, GaugePulse, SimConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const OUT_DIR_ENV: &str = "HOLE_QFT_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub sim: SimSection,
    pub pulse: PulseSection,
    pub packet: PacketSection,
    pub fock: FockSection,
    pub integrator: IntegratorSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub mass: f64,
    pub charge: f64,
    pub length: f64,
    pub cutoff: usize,
    pub grid_points: usize,
    pub t0: f64,
    pub t1: f64,
    pub tf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    /// `χ1(z) = Σ a_k cos(p_k z) + b_k sin(p_k z)` from `cos`/`sin`.
    Harmonics,
    /// `χ1(z) = -λ ∂J/∂z` of the packet's free current.
    FromCurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaUnits {
    /// `λ` in units of `1 / ∫(∂J/∂z)² dz`: `λ = 1` lowers the packet energy by one.
    Slope,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    SinSquared,
    Smoothstep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub kind: PulseKind,
    pub envelope: EnvelopeKind,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lambda_units: LambdaUnits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSection {
    pub r: i64,
    pub s: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockSection {
    /// `R_F` values for the Schwinger table.
    pub cutoffs: Vec<usize>,
    /// Particle-number cap `P`.
    pub cap: usize,
    /// Cutoff and cap of the space used for the `Ĥ₀` spectrum check.
    pub spectrum_cutoff: usize,
    pub spectrum_cap: usize,
    pub random_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    /// Step for the continuity study (the residual is checked at it and half).
    pub continuity_dt: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write a `trajectory` file from the continuity run.
    pub trajectory: bool,
    /// Keep every n-th step in the trajectory dump.
    pub trajectory_stride: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            sim: SimSection::default(),
            pulse: PulseSection::default(),
            packet: PacketSection::default(),
            fock: FockSection::default(),
            integrator: IntegratorSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            mass: d.mass,
            charge: d.charge,
            length: d.length,
            cutoff: d.cutoff,
            grid_points: d.grid_points,
            t0: d.t0,
            t1: d.t1,
            tf: d.tf,
        }
    }
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            kind: PulseKind::Harmonics,
            envelope: EnvelopeKind::SinSquared,
            cos: vec![0.0, 0.5],
            sin: vec![0.0, 0.0],
            lambda: vec![0.0, 1.0, 2.0, 4.0, 8.0, 16.0],
            lambda_units: LambdaUnits::Slope,
        }
    }
}

impl Default for PacketSection {
    fn default() -> Self {
        Self { r: 1, s: 0 }
    }
}

impl Default for FockSection {
    fn default() -> Self {
        Self {
            cutoffs: vec![1, 2, 3, 4],
            cap: 2,
            spectrum_cutoff: 4,
            spectrum_cap: 4,
            random_states: 1000,
        }
    }
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            dt: 5e-4,
            continuity_dt: 4e-3,
            tolerance: 1e-15,
            max_iterations: 100,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            trajectory: false,
            trajectory_stride: 10,
        }
    }
}

fn config_error(key: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

/// Parse one `section.key=value` override. The value is read as a TOML value
/// and falls back to a bare string.
fn parse_override(raw: &str) -> Result<(Vec<String>, toml::Value), CliError> {
    let (path, value) = raw
        .split_once('=')
        .ok_or_else(|| config_error(raw, "override must look like section.key=value"))?;
    let path: Vec<String> = path.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(config_error(raw, "empty key segment"));
    }
    let value = value.trim();
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_owned()));
    Ok((path, parsed))
}

fn set_path(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), CliError> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cursor = table;
    for key in parents {
        let entry = cursor
            .entry(key.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| config_error(path.join("."), format!("`{key}` is not a section")))?;
    }
    cursor.insert(last.clone(), value);
    Ok(())
}

/// First offending key in a serde error message, when it names one.
fn key_from_message(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .map_or_else(|| "config".to_owned(), str::to_owned)
}

impl RunConfig {
    /// Assemble the effective configuration.
    pub fn load(
        path: Option<&Path>,
        overrides: &[String],
        env_out_dir: Option<PathBuf>,
        out_flag: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| config_error("--config", format!("{}: {e}", p.display())))?;
                toml::from_str::<toml::Table>(&text)
                    .map_err(|e| config_error(p.display().to_string(), e.to_string()))?
            }
            None => toml::Table::new(),
        };
        let mut out_overridden = out_flag.is_some();
        for raw in overrides {
            let (key, value) = parse_override(raw)?;
            out_overridden |= key == ["output", "dir"];
            set_path(&mut table, &key, value)?;
        }
        if !out_overridden {
            if let Some(dir) = env_out_dir {
                set_path(
                    &mut table,
                    &["output".into(), "dir".into()],
                    toml::Value::String(dir.display().to_string()),
                )?;
            }
        }
        let mut cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| config_error(key_from_message(e.message()), e.message()))?;
        if let Some(dir) = out_flag {
            cfg.output.dir = dir;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sim(&self) -> SimConfig {
        let s = &self.sim;
        SimConfig {
            mass: s.mass,
            charge: s.charge,
            length: s.length,
            cutoff: s.cutoff,
            grid_points: s.grid_points,
            t0: s.t0,
            t1: s.t1,
            tf: s.tf,
        }
    }

    pub fn envelope(&self) -> Envelope {
        match self.pulse.envelope {
            EnvelopeKind::SinSquared => Envelope::SinSquared,
            EnvelopeKind::Smoothstep => Envelope::Smoothstep,
        }
    }

    /// The explicit-harmonics pulse.
    pub fn harmonic_pulse(&self) -> Result<GaugePulse, CliError> {
        let p = &self.pulse;
        let width = p.cos.len().max(p.sin.len());
        let pad = |v: &[f64]| {
            let mut v = v.to_vec();
            v.resize(width, 0.0);
            v
        };
        GaugePulse::new(pad(&p.cos), pad(&p.sin), self.envelope(), &self.sim())
            .map_err(|e| config_error("pulse.cos", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let sim = self.sim();
        sim.validate().map_err(|e| match e {
            hole_qft::Error::InvalidConfig { key, reason } => config_error(format!("sim.{key}"), reason),
            other => config_error("sim", other.to_string()),
        })?;
        self.harmonic_pulse()?;
        if self.pulse.lambda.is_empty() || self.pulse.lambda.iter().any(|l| !l.is_finite()) {
            return Err(config_error("pulse.lambda", "need at least one finite value"));
        }
        let c = sim.cutoff as i64;
        for (key, v) in [("packet.r", self.packet.r), ("packet.s", self.packet.s)] {
            if v.abs() > c {
                return Err(config_error(key, format!("|{v}| exceeds sim.cutoff = {c}")));
            }
        }
        if self.packet.r == self.packet.s {
            return Err(config_error("packet.s", "must differ from packet.r"));
        }
        if (self.packet.r - self.packet.s).unsigned_abs() as usize > sim.cutoff {
            return Err(config_error("packet.s", "|r - s| exceeds sim.cutoff"));
        }
        // Widest space with a 64-bit occupation pattern: 2(2R_F+1) <= 63.
        let fock_ok = |rf: usize| (1..=15).contains(&rf);
        if self.fock.cutoffs.is_empty() || !self.fock.cutoffs.iter().all(|&rf| fock_ok(rf)) {
            return Err(config_error("fock.cutoffs", "each R_F must lie in 1..=15"));
        }
        if self.fock.cap < 2 {
            return Err(config_error("fock.cap", "pair states need a cap of at least 2"));
        }
        if !fock_ok(self.fock.spectrum_cutoff) {
            return Err(config_error("fock.spectrum_cutoff", "must lie in 1..=15"));
        }
        let i = &self.integrator;
        for (key, v) in [("integrator.dt", i.dt), ("integrator.continuity_dt", i.continuity_dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(key, "must be positive and finite"));
            }
        }
        if i.tolerance.is_nan() || i.tolerance <= 0.0 {
            return Err(config_error("integrator.tolerance", "must be positive"));
        }
        if i.max_iterations == 0 {
            return Err(config_error("integrator.max_iterations", "must be positive"));
        }
        if self.output.trajectory_stride == 0 {
            return Err(config_error("output.trajectory_stride", "must be positive"));
        }
        Ok(())
    }

    /// SHA-256 over the serialized sections a command depends on.
    pub fn digest(&self, sections: &[&str]) -> String {
        let full = toml::Table::try_from(self).expect("config serializes");
        let mut picked = toml::Table::new();
        for &name in sections {
            if let Some(v) = full.get(name) {
                picked.insert(name.to_owned(), v.clone());
            }
        }
        let text = toml::to_string(&picked).expect("table serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(overrides: &[&str]) -> Result<RunConfig, CliError> {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        RunConfig::load(None, &o, None, None)
    }

    #[test]
    fn defaults_validate() {
        assert_eq!(load(&[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides_apply_and_typecheck() {
        let c = load(&["sim.cutoff=8", "sim.grid_points=256", "pulse.kind=from-current"]).unwrap();
        assert_eq!(c.sim.cutoff, 8);
        assert_eq!(c.pulse.kind, PulseKind::FromCurrent);
        let err = load(&["sim.cutoff=eight"]).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn invariant_failures_name_the_key() {
        let key = |o: &[&str]| match load(o).unwrap_err() {
            CliError::Config { key, .. } => key,
            e => panic!("{e}"),
        };
        assert_eq!(key(&["sim.grid_points=100"]), "sim.grid_points");
        assert_eq!(key(&["packet.s=1"]), "packet.s");
        assert_eq!(key(&["fock.cap=1"]), "fock.cap");
        assert_eq!(key(&["integrator.dt=0"]), "integrator.dt");
        assert_eq!(key(&["sim.nonsense=1"]), "nonsense");
        assert_eq!(key(&["pulse.cos=[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]"]), "pulse.cos");
    }

    #[test]
    fn output_dir_precedence() {
        let env = Some(PathBuf::from("from-env"));
        let a = RunConfig::load(None, &[], env.clone(), None).unwrap();
        assert_eq!(a.output.dir, PathBuf::from("from-env"));
        let b = RunConfig::load(None, &["output.dir=from-flag".into()], env.clone(), None).unwrap();
        assert_eq!(b.output.dir, PathBuf::from("from-flag"));
        let c = RunConfig::load(None, &[], env, Some("out-flag".into())).unwrap();
        assert_eq!(c.output.dir, PathBuf::from("out-flag"));
    }

    #[test]
    fn digest_tracks_only_named_sections() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.fock.cap = 3;
        assert_eq!(a.digest(&["sim", "packet"]), b.digest(&["sim", "packet"]));
        assert_ne!(a.digest(&["sim", "fock"]), b.digest(&["sim", "fock"]));
        assert_eq!(a.digest(&["sim"]).len(), 64);
    }
}
