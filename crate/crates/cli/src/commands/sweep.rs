use hole_qft::hole_theory::{ht_energy_sweep, slope_integral};

use super::{max_abs, packet, physical_lambdas, Bound, Check, RunOutput};
use crate::columnar::{Cell, Table};
use crate::config::RunConfig;
use crate::CliError;

const LINE: f64 = 1e-6;
const PER_MODE_SEA: f64 = 1e-10;

pub const COLUMNS: [&str; 7] = [
    "lambda",
    "E_TR_t0",
    "dE_hvac",
    "d_xi_fp",
    "E_TR_tf",
    "predicted_E48",
    "abs_diff",
];

/// Least-squares slope and intercept.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

pub fn compute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sim = cfg.sim();
    let p = packet(cfg)?;
    let lambdas = physical_lambdas(cfg)?;
    let rows = ht_energy_sweep(&p, &lambdas, &sim).map_err(super::slope_error)?;
    let integral = slope_integral(&p, sim.t1, &sim)?;

    let mut table = Table::new(&COLUMNS);
    for r in &rows {
        table.push(
            [r.lambda, r.e_tr_t0, r.de_hvac, r.d_xi_fp, r.e_tr_tf, r.predicted, r.abs_diff()]
                .into_iter()
                .map(Cell::Float)
                .collect(),
        );
    }
    let x: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.e_tr_tf).collect();
    let (slope, intercept) = fit_line(&x, &y);
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let monotone = sorted.windows(2).all(|w| w[1].e_tr_tf < w[0].e_tr_tf);
    let below = rows.iter().filter(|r| r.e_tr_tf < 0.0).count();

    let mut lines = vec![
        format!("packet ({}, {}), ∫(∂J/∂z)² dz = {integral:.10e}", cfg.packet.r, cfg.packet.s),
        format!("fitted slope {slope:.10e} (quadrature {:.10e})", -integral),
    ];
    if slope < 0.0 {
        lines.push(format!("E_TR(tf) crosses zero at λ* = {:.10e}", -intercept / slope));
    }
    lines.push(format!(
        "E_TR(tf) {} in λ; {below} of {} points below the unperturbed vacuum",
        if monotone { "strictly decreasing" } else { "not monotone" },
        rows.len()
    ));
    let sea_limit = (2 * sim.cutoff + 1) as f64 * PER_MODE_SEA;
    let checks = vec![
        Check::new("max |E_TR_tf - predicted_E48|", max_abs(rows.iter().map(|r| r.abs_diff())), Bound::Below(LINE)),
        Check::new("max |dE_hvac|", max_abs(rows.iter().map(|r| r.de_hvac)), Bound::Below(sea_limit)),
    ];
    Ok(RunOutput {
        table,
        lines,
        checks,
        extra: Vec::new(),
    })
}
