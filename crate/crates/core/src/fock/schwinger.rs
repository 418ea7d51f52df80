use num_complex::Complex64;

use super::operators::{build_current_derivative, build_h0, build_rho};
use super::{FockBasis, FockOperator};
use crate::spectral::{spinor, EnergySign, SimConfig};
use crate::{Error, Result};

/// One excited basis state reachable from the vacuum by `ρ̂(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAmplitude {
    pub pattern: u64,
    /// `ε(|k⟩)`, the `Ĥ₀` eigenvalue.
    pub energy: f64,
    /// `<0|ρ̂(z)|k⟩`.
    pub amplitude: Complex64,
}

fn require_pairs(basis: &FockBasis) -> Result<()> {
    match basis.cap() {
        Some(cap) if cap < 2 => Err(Error::ParticleCapTooSmall { cap, needed: 2 }),
        _ => Ok(()),
    }
}

/// Nonzero `<0|ρ̂(z)|k⟩` for `k ≠ 0`, read off row zero of `ρ̂(z)`.
pub fn pair_amplitudes(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<Vec<PairAmplitude>> {
    require_pairs(basis)?;
    let rho = build_rho(z, basis, cfg)?;
    let energies = build_h0(basis, cfg)
        .diagonal_values()
        .expect("free Hamiltonian is diagonal");
    Ok(rho
        .row(0)
        .iter()
        .filter(|(k, _)| *k != 0)
        .map(|&(k, amplitude)| PairAmplitude {
            pattern: basis.state(k),
            energy: energies[k],
            amplitude,
        })
        .collect())
}

/// `S = 2 Σ_k ε(|k⟩) |<0|ρ̂(z)|k⟩|²`, the coefficient of `i` in
/// `∂_{z'} <0|[Ĵ(z'), ρ̂(z)]|0>` at `z = z'`.
pub fn schwinger_sum(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<f64> {
    Ok(2.0
        * pair_amplitudes(z, basis, cfg)?
            .iter()
            .map(|a| a.energy * a.amplitude.norm_sqr())
            .sum::<f64>())
}

/// `<0|ρ̂(z')Hρ̂(z)|0> + <0|ρ̂(z)Hρ̂(z')|0>` for an arbitrary `H`.
pub fn commutator_derivative_with(
    h: &FockOperator,
    z: f64,
    z_prime: f64,
    basis: &FockBasis,
    cfg: &SimConfig,
) -> Result<Complex64> {
    require_pairs(basis)?;
    let vacuum = basis.unit_vector(0).expect("vacuum is always present");
    let a = build_rho(z, basis, cfg)?.matvec(&vacuum)?;
    let b = build_rho(z_prime, basis, cfg)?.matvec(&vacuum)?;
    Ok(h.sandwich(&b, &a)? + h.sandwich(&a, &b)?)
}

/// Direct sparse-product route with `H = Ĥ₀`.
pub fn commutator_derivative_direct(
    z: f64,
    z_prime: f64,
    basis: &FockBasis,
    cfg: &SimConfig,
) -> Result<Complex64> {
    commutator_derivative_with(&build_h0(basis, cfg), z, z_prime, basis, cfg)
}

/// `2<0|ρ̂(z)Ĥ₀ρ̂(z)|0>`.
pub fn schwinger_direct(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<f64> {
    Ok(commutator_derivative_direct(z, z, basis, cfg)?.re)
}

/// `<0|[∂Ĵ(z)/∂z, ρ̂(z)]|0>` from the operators themselves; equals `iS`.
pub fn current_commutator_slope(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<Complex64> {
    require_pairs(basis)?;
    let vacuum = basis.unit_vector(0).expect("vacuum is always present");
    let rho = build_rho(z, basis, cfg)?;
    let dj = build_current_derivative(z, basis, cfg)?;
    let rho0 = rho.matvec(&vacuum)?;
    let dj0 = dj.matvec(&vacuum)?;
    Ok(dj.sandwich(&vacuum, &rho0)? - rho.sandwich(&vacuum, &dj0)?)
}

/// `2q² Σ_{r,s} (E_r + E_s) (u_{+1,r}·u_{-1,s})²` with no Fock machinery.
pub fn schwinger_closed_form(cutoff: usize, cfg: &SimConfig) -> f64 {
    let c = cutoff as i64;
    let mut total = 0.0;
    for r in -c..=c {
        let ur = spinor(cfg.momentum(r), EnergySign::Positive, cfg.mass, cfg.length);
        for s in -c..=c {
            let us = spinor(cfg.momentum(s), EnergySign::Negative, cfg.mass, cfg.length);
            let overlap = ur[0] * us[0] + ur[1] * us[1];
            total += (cfg.energy(r) + cfg.energy(s)) * overlap * overlap;
        }
    }
    2.0 * cfg.charge * cfg.charge * total
}

/// Which naive continuity relations survive on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub z: f64,
    pub z_prime: f64,
    /// `max |i[Ĥ₀, ρ̂(z)] + ∂Ĵ/∂z|` entrywise.
    pub operator_continuity_residual: f64,
    /// `S`; `[Ĵ(z'), ρ̂(z)] = 0` would force it to vanish.
    pub schwinger: f64,
    /// `<0|[∂Ĵ/∂z, ρ̂]|0>` at `z`, to compare with `iS`.
    pub current_commutator_slope: Complex64,
    /// `<0|[ρ̂(z'), ρ̂(z)]|0>`.
    pub density_commutator: Complex64,
    pub tolerance: f64,
}

impl ContinuityReport {
    pub fn operator_continuity_holds(&self) -> bool {
        self.operator_continuity_residual <= self.tolerance
    }

    pub fn current_density_commutes(&self) -> bool {
        self.schwinger <= self.tolerance
    }

    pub fn densities_commute(&self) -> bool {
        self.density_commutator.norm() <= self.tolerance
    }
}

pub fn continuity_violation_report(
    z: f64,
    z_prime: f64,
    basis: &FockBasis,
    cfg: &SimConfig,
) -> Result<ContinuityReport> {
    require_pairs(basis)?;
    let tolerance = 1e-12;
    let h0 = build_h0(basis, cfg);
    let rho = build_rho(z, basis, cfg)?;
    let dj = build_current_derivative(z, basis, cfg)?;
    let lhs = h0.commutator(&rho)?.scale(Complex64::new(0.0, 1.0));
    let residual = lhs.max_abs_diff(&dj.scale(Complex64::new(-1.0, 0.0)))?;

    let vacuum = basis.unit_vector(0).expect("vacuum is always present");
    let rho_p = build_rho(z_prime, basis, cfg)?;
    let a = rho.matvec(&vacuum)?;
    let b = rho_p.matvec(&vacuum)?;
    let density_commutator = rho_p.sandwich(&vacuum, &a)? - rho.sandwich(&vacuum, &b)?;

    Ok(ContinuityReport {
        z,
        z_prime,
        operator_continuity_residual: residual,
        schwinger: schwinger_sum(z, basis, cfg)?,
        current_commutator_slope: current_commutator_slope(z, basis, cfg)?,
        density_commutator,
        tolerance,
    })
}
