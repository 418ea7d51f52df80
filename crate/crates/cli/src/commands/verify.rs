use hole_qft::evolution::{free_propagate, ExactPropagator};
use hole_qft::oracle::{integrate, IntegratorConfig};
use hole_qft::spectral::{InnerProduct, SpectralGrid};

use super::{packet, selected_pulse, Bound, Check, RunOutput};
use crate::columnar::{Cell, Table};
use crate::config::RunConfig;
use crate::CliError;

const FIDELITY: f64 = 1e-6;
const RATIO_TOLERANCE: f64 = 0.5;
const NORM_DRIFT: f64 = 1e-9;
const ROUND_OFF: f64 = 1e-12;
/// Below this the error is round-off and its halving ratio is meaningless.
const RATIO_FLOOR: f64 = 1e-11;

pub fn compute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sim = cfg.sim();
    let pulse = selected_pulse(cfg)?;
    let x0 = packet(cfg)?.at_t0(&sim);
    let grid = SpectralGrid::new(&sim);
    let exact = ExactPropagator::new(&pulse, &sim)?.final_state(&x0)?;
    let exact_grid = grid.synthesize(&exact.state, 0.0)?;
    let psi0 = grid.synthesize(&x0, sim.t0)?;

    let icfg = |dt: f64| IntegratorConfig {
        dt,
        tolerance: cfg.integrator.tolerance,
        max_iterations: cfg.integrator.max_iterations,
    };
    let mut table = Table::new(&["dt", "l2_error", "norm_drift"]);
    let mut errors = Vec::new();
    for dt in [cfg.integrator.dt, cfg.integrator.dt / 2.0] {
        let end = integrate(&psi0, &pulse, &sim, icfg(dt))?;
        let err = end.l2_distance(&exact_grid)?;
        let drift = (end.norm() - psi0.norm()).abs();
        table.push(vec![Cell::Float(dt), Cell::Float(err), Cell::Float(drift)]);
        errors.push((err, drift));
    }
    let ratio = errors[0].0 / errors[1].0;

    let mut lines = vec![
        format!("packet ({}, {}), pulse harmonics up to k = {}", cfg.packet.r, cfg.packet.s, pulse.harmonics()),
        format!("L2 error {:.6e} at dt = {:.3e}, {:.6e} at dt/2", errors[0].0, cfg.integrator.dt, errors[1].0),
        format!("convergence ratio {ratio:.4}, leakage {:.3e}", exact.leakage),
    ];
    let mut checks = vec![
        Check::new("l2_error", errors[0].0, Bound::Below(FIDELITY)),
        Check::new("norm_drift", errors[0].1.max(errors[1].1), Bound::Below(NORM_DRIFT)),
    ];
    if errors[1].0 > RATIO_FLOOR {
        checks.push(Check::new(
            "convergence_ratio",
            ratio,
            Bound::Within {
                target: 4.0,
                tolerance: RATIO_TOLERANCE,
            },
        ));
    }
    if pulse.is_zero() {
        let free = free_propagate(&x0, sim.tf - sim.t0, &sim).widen(exact.state.cutoff())?;
        let diff = free.max_abs_diff(&exact.state);
        lines.push(format!("zero pulse: closed form vs free evolution {diff:.3e}"));
        checks.push(Check::new("zero_pulse_exact_vs_free", diff, Bound::Below(ROUND_OFF)));
    }
    Ok(RunOutput {
        table,
        lines,
        checks,
        extra: Vec::new(),
    })
}
