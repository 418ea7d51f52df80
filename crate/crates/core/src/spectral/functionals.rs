use num_complex::Complex64;

use super::{GridField, InnerProduct, ModeExpansion, SimConfig, SpectralGrid};
use crate::{Error, Result};

/// Potential `(A0, Az)` sampled on the grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSamples {
    pub a0: Vec<f64>,
    pub az: Vec<f64>,
}

impl PotentialSamples {
    pub fn zero(cfg: &SimConfig) -> Self {
        Self {
            a0: vec![0.0; cfg.grid_points],
            az: vec![0.0; cfg.grid_points],
        }
    }
}

/// Charge and current densities `ρ = qψ†ψ`, `J = qψ†σ_xψ` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Densities {
    pub rho: Vec<f64>,
    pub current: Vec<f64>,
}

/// `ξ_f = Σ λ E_r |c_{λ,r}|²`.
pub fn free_energy(x: &ModeExpansion, cfg: &SimConfig) -> f64 {
    x.iter()
        .map(|(sign, r, c)| sign.value() * cfg.energy(r) * c.norm_sqr())
        .sum()
}

/// `∫ψ†H0ψ dz` evaluated on the grid with the spectral derivative.
pub fn grid_free_energy(f: &GridField, grid: &SpectralGrid) -> f64 {
    let h = grid.apply_free_hamiltonian(f);
    // f and h share a length by construction
    f.inner(&h).map(|c| c.re).unwrap_or(f64::NAN)
}

/// `∫ψ†(H0 + qV)ψ dz` with `V = -σ_x Az + A0`.
pub fn full_energy(f: &GridField, pot: &PotentialSamples, cfg: &SimConfig) -> Result<f64> {
    for len in [pot.a0.len(), pot.az.len(), f.len()] {
        if len != cfg.grid_points {
            return Err(Error::SizeMismatch {
                left: len,
                right: cfg.grid_points,
            });
        }
    }
    let grid = SpectralGrid::new(cfg);
    let free = grid_free_energy(f, &grid);
    let dens = charge_current_density(f, cfg.charge);
    let interaction: f64 = dens
        .rho
        .iter()
        .zip(&dens.current)
        .zip(pot.a0.iter().zip(&pot.az))
        .map(|((rho, j), (a0, az))| rho * a0 - j * az)
        .sum();
    Ok(free + interaction * f.weight())
}

pub fn charge_current_density(f: &GridField, charge: f64) -> Densities {
    let (rho, current) = f
        .samples
        .iter()
        .map(|s| {
            let density = s[0].norm_sqr() + s[1].norm_sqr();
            let cross: Complex64 = s[0].conj() * s[1];
            (charge * density, charge * 2.0 * cross.re)
        })
        .unzip();
    Densities { rho, current }
}
