use hole_qft::fock::{schwinger_direct, schwinger_sum, FockBasis};

use super::{Bound, Check, RunOutput};
use crate::columnar::{Cell, Table};
use crate::config::RunConfig;
use crate::CliError;

const ROUTES: f64 = 1e-12;
const Z_SPREAD: f64 = 1e-10;

pub fn compute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sim = cfg.sim();
    let n = sim.grid_points;
    let zs = [sim.grid_point(0), sim.grid_point(n / 3), sim.grid_point(n / 2 + 1)];
    let mut table = Table::new(&["R_F", "S_spectral", "S_direct", "abs_diff", "dim"]);
    let (mut worst_route, mut worst_spread, mut min_s) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut values = Vec::new();
    for &rf in &cfg.fock.cutoffs {
        let basis = FockBasis::new(rf, Some(cfg.fock.cap))?;
        let spectral = zs
            .iter()
            .map(|&z| schwinger_sum(z, &basis, &sim))
            .collect::<Result<Vec<_>, _>>()?;
        let direct = zs
            .iter()
            .map(|&z| schwinger_direct(z, &basis, &sim))
            .collect::<Result<Vec<_>, _>>()?;
        for (a, b) in spectral.iter().zip(&direct) {
            worst_route = worst_route.max((a - b).abs());
        }
        worst_spread = worst_spread.max(super::max_abs(spectral.iter().map(|s| s - spectral[0])));
        min_s = min_s.min(spectral[0]);
        values.push((rf, spectral[0]));
        table.push(vec![
            Cell::Int(rf as i64),
            Cell::Float(spectral[0]),
            Cell::Float(direct[0]),
            Cell::Float((spectral[0] - direct[0]).abs()),
            Cell::Int(basis.dim() as i64),
        ]);
    }
    let mut sorted = values.clone();
    sorted.sort_by_key(|v| v.0);
    let increasing = sorted.windows(2).all(|w| w[1].1 > w[0].1);
    let lines = vec![
        format!("particle cap {}, z sampled at {:?}", cfg.fock.cap, zs),
        format!(
            "S(R_F) {} with the cutoff (divergent as R_F grows)",
            if increasing { "strictly increasing" } else { "NOT monotone" }
        ),
    ];
    let checks = vec![
        Check::new("min S_spectral", min_s, Bound::Above(0.0)),
        Check::new("max |S_spectral - S_direct|", worst_route, Bound::Below(ROUTES)),
        Check::new("max z spread of S", worst_spread, Bound::Below(Z_SPREAD)),
    ];
    Ok(RunOutput {
        table,
        lines,
        checks,
        extra: Vec::new(),
    })
}
