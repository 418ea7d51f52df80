use hole_qft::fock::{continuity_violation_report, FockBasis};
use hole_qft::hole_theory::occupied_orbitals;
use hole_qft::oracle::{continuity_residual, summed_continuity_residual, Integrator, IntegratorConfig, Recording};
use hole_qft::spectral::{charge_current_density, SpectralGrid};

use super::{packet, selected_pulse, Bound, Check, RunOutput};
use crate::columnar::{Cell, Table};
use crate::config::RunConfig;
use crate::CliError;

const RATIO_TOLERANCE: f64 = 0.5;
/// Residuals below this are round-off; no convergence order is read from them.
const RATIO_FLOOR: f64 = 1e-11;

pub fn compute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sim = cfg.sim();
    let pulse = selected_pulse(cfg)?;
    let p = packet(cfg)?;
    let grid = SpectralGrid::new(&sim);
    let packet_state = grid.synthesize(&p.at_t0(&sim), sim.t0)?;
    let occupied = occupied_orbitals(&p, &sim)
        .iter()
        .map(|x| grid.synthesize(x, sim.t0))
        .collect::<Result<Vec<_>, _>>()?;
    let icfg = |dt: f64| IntegratorConfig {
        dt,
        tolerance: cfg.integrator.tolerance,
        max_iterations: cfg.integrator.max_iterations,
    };

    let dt = cfg.integrator.continuity_dt;
    let mut table = Table::new(&["dt", "residual_packet", "residual_occupied"]);
    let mut res = Vec::new();
    for h in [dt, dt / 2.0] {
        let single = summed_continuity_residual(std::slice::from_ref(&packet_state), &pulse, &sim, icfg(h))?;
        let all = summed_continuity_residual(&occupied, &pulse, &sim, icfg(h))?;
        table.push(vec![Cell::Float(h), Cell::Float(single), Cell::Float(all)]);
        res.push((single, all));
    }

    let rf = *cfg.fock.cutoffs.iter().max().expect("validated non-empty");
    let basis = FockBasis::new(rf, Some(cfg.fock.cap))?;
    let report = continuity_violation_report(sim.grid_point(0), sim.grid_point(sim.grid_points / 4), &basis, &sim)?;

    let mut lines = vec![
        format!(
            "single packet: residual {:.4e} -> {:.4e}; {} occupied orbitals: {:.4e} -> {:.4e}",
            res[0].0,
            res[1].0,
            occupied.len(),
            res[0].1,
            res[1].1
        ),
        format!(
            "Fock space R_F = {rf}: <0|[∂J/∂z, ρ]|0> = {:.10e} i, Schwinger term S = {:.10e}",
            report.current_commutator_slope.im, report.schwinger
        ),
        format!(
            "operator continuity residual {:.3e}, <0|[ρ(z'), ρ(z)]|0> = {:.3e}",
            report.operator_continuity_residual,
            report.density_commutator.norm()
        ),
    ];
    let mut checks = Vec::new();
    for (name, a, b) in [("packet", res[0].0, res[1].0), ("occupied", res[0].1, res[1].1)] {
        if b > RATIO_FLOOR {
            checks.push(Check::new(
                format!("{name} residual halving ratio"),
                a / b,
                Bound::Within {
                    target: 4.0,
                    tolerance: RATIO_TOLERANCE,
                },
            ));
        } else {
            checks.push(Check::new(format!("{name} residual"), a.max(b), Bound::Below(RATIO_FLOOR)));
        }
    }
    checks.push(Check::new("Schwinger obstruction S", report.schwinger, Bound::Above(0.0)));

    let mut extra = Vec::new();
    if cfg.output.trajectory {
        let integrator = Integrator::new(&pulse, &sim, icfg(dt))?;
        let traj = integrator.integrate(&packet_state, Recording::EveryStep)?;
        lines.push(format!("trajectory residual (recorded run) {:.4e}", continuity_residual(&traj, &sim)));
        let mut dump = Table::new(&["t", "z", "re_upper", "im_upper", "re_lower", "im_lower", "rho", "J"]);
        for (t, f) in traj.times.iter().zip(&traj.states).step_by(cfg.output.trajectory_stride) {
            let d = charge_current_density(f, sim.charge);
            for (j, s) in f.samples.iter().enumerate() {
                dump.push(
                    [*t, sim.grid_point(j), s[0].re, s[0].im, s[1].re, s[1].im, d.rho[j], d.current[j]]
                        .into_iter()
                        .map(Cell::Float)
                        .collect(),
                );
            }
        }
        extra.push(("trajectory".to_owned(), dump));
    }
    Ok(RunOutput {
        table,
        lines,
        checks,
        extra,
    })
}
