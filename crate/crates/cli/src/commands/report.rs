//! Consolidated markdown summary. Existing outputs whose sidecar digest matches
//! the current config are reused; missing or stale ones are recomputed.

use std::fmt::Write as _;

use hole_qft::fock::{build_h0, energy_expectation, FockBasis};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{write_output, Kind};
use crate::columnar::{self, Existing, Table};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Reused,
    Missing,
    Stale { recorded: String },
}

struct Section {
    kind: Kind,
    table: Table,
    provenance: Provenance,
    failures: Vec<String>,
}

fn obtain(cfg: &RunConfig, kind: Kind) -> Result<Section, CliError> {
    let digest = cfg.digest(kind.sections());
    let provenance = match columnar::read(&kind.path(cfg), &digest) {
        Existing::Fresh(table) => {
            return Ok(Section {
                kind,
                table,
                provenance: Provenance::Reused,
                failures: Vec::new(),
            })
        }
        Existing::Missing => Provenance::Missing,
        Existing::Stale(recorded) => Provenance::Stale { recorded },
    };
    let out = kind.compute(cfg)?;
    write_output(cfg, kind, &out)?;
    Ok(Section {
        kind,
        failures: out.failures().iter().map(|c| c.to_string()).collect(),
        table: out.table,
        provenance,
    })
}

/// Spectrum of `Ĥ₀` and its expectation over random states.
pub struct SpectrumCheck {
    pub dim: usize,
    pub vacuum: f64,
    pub zero_modes: usize,
    pub min_excited: f64,
    pub min_random: f64,
    pub samples: usize,
}

pub fn spectrum_check(cfg: &RunConfig) -> Result<SpectrumCheck, CliError> {
    let basis = FockBasis::new(cfg.fock.spectrum_cutoff, Some(cfg.fock.spectrum_cap))?;
    let h0 = build_h0(&basis, &cfg.sim());
    let diag = h0.diagonal_values().expect("free Hamiltonian is diagonal");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut min_random = f64::INFINITY;
    for _ in 0..cfg.fock.random_states {
        let mut v: Vec<Complex64> = (0..basis.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= norm);
        min_random = min_random.min(energy_expectation(&h0, &v)?);
    }
    Ok(SpectrumCheck {
        dim: basis.dim(),
        vacuum: diag[0],
        zero_modes: diag.iter().filter(|&&e| e == 0.0).count(),
        min_excited: diag[1..].iter().cloned().fold(f64::INFINITY, f64::min),
        min_random,
        samples: cfg.fock.random_states,
    })
}

fn markdown_table(table: &Table) -> String {
    let mut s = format!("| {} |\n|{}\n", table.header.join(" | "), "---|".repeat(table.header.len()));
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                columnar::Cell::Int(i) => i.to_string(),
                columnar::Cell::Float(x) => format!("{x:.10e}"),
            })
            .collect();
        let _ = writeln!(s, "| {} |", cells.join(" | "));
    }
    s
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn render(cfg: &RunConfig) -> Result<String, CliError> {
    let sections = Kind::ALL
        .iter()
        .map(|&k| obtain(cfg, k))
        .collect::<Result<Vec<_>, _>>()?;
    let get = |k: Kind| sections.iter().find(|s| s.kind == k).expect("all kinds obtained");
    let spectrum = spectrum_check(cfg)?;
    let sim = cfg.sim();

    let mut doc = String::from("# Hole theory versus field theory: run summary\n\n");
    let _ = writeln!(
        doc,
        "Mass {}, charge {}, period {:.6}, hole-theory cutoff R = {}, {} grid points, window [{}, {}] then free to {}.\n",
        sim.mass, sim.charge, sim.length, sim.cutoff, sim.grid_points, sim.t0, sim.t1, sim.tf
    );

    let sweep = &get(Kind::HtSweep).table;
    let e_tf = sweep.column("E_TR_tf").unwrap_or_default();
    let hvac = sweep.column("dE_hvac").unwrap_or_default();
    let diffs = sweep.column("abs_diff").unwrap_or_default();
    let lowest = min_of(&e_tf);
    doc.push_str("## Hole theory: energy below the unperturbed vacuum\n\n");
    let _ = writeln!(
        doc,
        "Packet ({}, {}) driven by a pulse proportional to minus the slope of its own free current. \
         Energies are relative to the unperturbed sea.\n",
        cfg.packet.r, cfg.packet.s
    );
    doc.push_str(&markdown_table(sweep));
    let _ = writeln!(
        doc,
        "\n- Lowest total energy: {lowest:.10e} ({}).\n- Largest sea energy change: {:.3e}.\n- Largest deviation from the linear prediction: {:.3e}.\n",
        if lowest < 0.0 { "below the vacuum" } else { "not below the vacuum" },
        hvac.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        diffs.iter().fold(0.0f64, |m, v| m.max(*v)),
    );

    doc.push_str("## Field theory: free Hamiltonian is bounded below\n\n");
    let _ = writeln!(
        doc,
        "Fock space R_F = {}, particle cap {}: dimension {}. Vacuum eigenvalue {}, {} zero eigenvalue(s), \
         smallest excitation {:.10e}. Minimum of <H0> over {} seeded random states: {:.10e} ({}).\n",
        cfg.fock.spectrum_cutoff,
        cfg.fock.spectrum_cap,
        spectrum.dim,
        spectrum.vacuum,
        spectrum.zero_modes,
        spectrum.min_excited,
        spectrum.samples,
        spectrum.min_random,
        if spectrum.min_random >= -1e-12 && spectrum.min_excited > 0.0 { "all nonnegative" } else { "NEGATIVE VALUE FOUND" }
    );

    doc.push_str("## Field theory: Schwinger term\n\n");
    let sch = &get(Kind::Schwinger).table;
    doc.push_str(&markdown_table(sch));
    let s = sch.column("S_spectral").unwrap_or_default();
    let _ = writeln!(
        doc,
        "\nS is {} and {} with the cutoff, so the current and density cannot commute and the \
         naive operator continuity equation fails.\n",
        if s.iter().all(|&v| v > 0.0) { "positive" } else { "NOT positive" },
        if s.windows(2).all(|w| w[1] > w[0]) { "grows" } else { "does not grow monotonically" }
    );

    doc.push_str("## Continuity of the single-particle evolution\n\n");
    doc.push_str(&markdown_table(&get(Kind::Continuity).table));
    doc.push_str("\n## Closed form against time stepping\n\n");
    doc.push_str(&markdown_table(&get(Kind::VerifyEvolution).table));

    doc.push_str("\n## Conclusion\n\n");
    let _ = writeln!(
        doc,
        "Hole theory: total energy reaches {lowest:.6e} relative to the unperturbed vacuum. \
         Field theory: no state of the truncated Fock space has energy below the vacuum (minimum {:.6e}). \
         The two descriptions give different answers for the same pulse.\n",
        spectrum.min_excited.min(spectrum.min_random).min(spectrum.vacuum)
    );

    doc.push_str("## Provenance\n\n");
    for sec in &sections {
        let what = match &sec.provenance {
            Provenance::Reused => "reused (config digest matches)".to_owned(),
            Provenance::Missing => "recomputed (missing)".to_owned(),
            Provenance::Stale { recorded } => format!("recomputed (stale: recorded digest {recorded})"),
        };
        let _ = writeln!(doc, "- `{}`: {what}", sec.kind.file_name());
        for f in &sec.failures {
            let _ = writeln!(doc, "  - {f}");
        }
    }
    Ok(doc)
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let doc = render(cfg)?;
    let path = cfg.output.dir.join("report.md");
    std::fs::create_dir_all(&cfg.output.dir).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&path, &doc).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for line in doc.lines().filter(|l| l.starts_with("- `")) {
        println!("{line}");
    }
    println!("wrote {}", path.display());
    Ok(())
}
