use num_complex::Complex64;

use super::{FockBasis, FockMode, FockOperator, Ladder};
use crate::spectral::{spinor, EnergySign, SimConfig};
use crate::Result;

/// Which field bilinear `q ψ̂†Mψ̂` to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bilinear {
    /// `ρ̂ = qψ̂†ψ̂`.
    Density,
    /// `Ĵ = qψ̂†σ_xψ̂`.
    Current,
    /// `∂Ĵ/∂z`.
    CurrentSlope,
}

fn single(basis: &FockBasis, op: Ladder) -> Result<FockOperator> {
    let mut triplets = Vec::new();
    for (j, &s) in basis.states().iter().enumerate() {
        if let Some((out, sign)) = basis.apply(&[op], s)? {
            if let Some(i) = basis.index_of(out) {
                triplets.push((i, j, Complex64::new(sign, 0.0)));
            }
        }
    }
    Ok(FockOperator::from_triplets(basis.dim(), triplets))
}

pub fn creator(mode: FockMode, basis: &FockBasis) -> Result<FockOperator> {
    single(basis, Ladder::Create(mode))
}

pub fn annihilator(mode: FockMode, basis: &FockBasis) -> Result<FockOperator> {
    single(basis, Ladder::Annihilate(mode))
}

/// `Ĥ₀ = Σ_r E_r (b_r†b_r + d_r†d_r)`, already normal ordered.
pub fn build_h0(basis: &FockBasis, cfg: &SimConfig) -> FockOperator {
    let energies: Vec<(u32, u32, f64)> = basis
        .modes()
        .map(|r| {
            (
                basis.bit(FockMode::Electron(r)).unwrap(),
                basis.bit(FockMode::Positron(r)).unwrap(),
                cfg.energy(r),
            )
        })
        .collect();
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|&s| {
            energies
                .iter()
                .map(|&(b, d, e)| e * (((s >> b) & 1) + ((s >> d) & 1)) as f64)
                .sum()
        })
        .collect();
    FockOperator::diagonal(&diag)
}

/// Generic `q Σ_{a,b} w(p_a, p_b) (u_a†Mu_b) â_a† â_b` over the four blocks,
/// where `â_{+,r} = b_r` and `â_{-,r} = d_r†`.
fn bilinear(
    basis: &FockBasis,
    cfg: &SimConfig,
    sigma_x: bool,
    weight: impl Fn(f64, f64) -> Complex64,
) -> Result<FockOperator> {
    let modes: Vec<i64> = basis.modes().collect();
    let mut terms = Vec::new();
    for &r in &modes {
        for &s in &modes {
            for (sa, sb) in [
                (EnergySign::Positive, EnergySign::Positive),
                (EnergySign::Positive, EnergySign::Negative),
                (EnergySign::Negative, EnergySign::Positive),
                (EnergySign::Negative, EnergySign::Negative),
            ] {
                let (pa, pb) = (cfg.momentum(r), cfg.momentum(s));
                let ua = spinor(pa, sa, cfg.mass, cfg.length);
                let ub = spinor(pb, sb, cfg.mass, cfg.length);
                let m = if sigma_x {
                    ua[0] * ub[1] + ua[1] * ub[0]
                } else {
                    ua[0] * ub[0] + ua[1] * ub[1]
                };
                let coeff = weight(pa, pb) * (cfg.charge * m);
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let left = match sa {
                    EnergySign::Positive => Ladder::Create(FockMode::Electron(r)),
                    EnergySign::Negative => Ladder::Annihilate(FockMode::Positron(r)),
                };
                let right = match sb {
                    EnergySign::Positive => Ladder::Annihilate(FockMode::Electron(s)),
                    EnergySign::Negative => Ladder::Create(FockMode::Positron(s)),
                };
                terms.push(([left, right], coeff));
            }
        }
    }
    let mut triplets = Vec::new();
    for (j, &state) in basis.states().iter().enumerate() {
        for (ops, coeff) in &terms {
            if let Some((out, sign)) = basis.apply(ops, state)? {
                if let Some(i) = basis.index_of(out) {
                    triplets.push((i, j, coeff * sign));
                }
            }
        }
    }
    Ok(FockOperator::from_triplets(basis.dim(), triplets))
}

fn phase(z: f64) -> impl Fn(f64, f64) -> Complex64 {
    move |pa, pb| Complex64::from_polar(1.0, (pb - pa) * z)
}

/// Field bilinear at position `z`; not normal ordered.
pub fn build_bilinear(
    kind: Bilinear,
    z: f64,
    basis: &FockBasis,
    cfg: &SimConfig,
) -> Result<FockOperator> {
    match kind {
        Bilinear::Density => bilinear(basis, cfg, false, phase(z)),
        Bilinear::Current => bilinear(basis, cfg, true, phase(z)),
        Bilinear::CurrentSlope => bilinear(basis, cfg, true, move |pa, pb| {
            Complex64::new(0.0, pb - pa) * phase(z)(pa, pb)
        }),
    }
}

pub fn build_rho(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<FockOperator> {
    build_bilinear(Bilinear::Density, z, basis, cfg)
}

pub fn build_current(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<FockOperator> {
    build_bilinear(Bilinear::Current, z, basis, cfg)
}

pub fn build_current_derivative(z: f64, basis: &FockBasis, cfg: &SimConfig) -> Result<FockOperator> {
    build_bilinear(Bilinear::CurrentSlope, z, basis, cfg)
}

/// `∫ρ̂ dz` over the period, integrated analytically mode by mode.
pub fn build_charge(basis: &FockBasis, cfg: &SimConfig) -> Result<FockOperator> {
    let length = cfg.length;
    bilinear(basis, cfg, false, move |pa, pb| {
        if pa == pb {
            Complex64::new(length, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `<Ω|Ĥ₀|Ω>` for a state vector over the basis of `h0`.
pub fn energy_expectation(h0: &FockOperator, state: &[Complex64]) -> Result<f64> {
    Ok(h0.sandwich(state, state)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig {
            cutoff: 4,
            grid_points: 64,
            ..Default::default()
        }
    }

    #[test]
    fn h0_eigenvalues() {
        let c = cfg();
        let basis = FockBasis::full(1).unwrap();
        let h0 = build_h0(&basis, &c);
        let diag = h0.diagonal_values().unwrap();
        assert_eq!(diag[0], 0.0);
        let pair = basis
            .apply(
                &[
                    Ladder::Create(FockMode::Electron(1)),
                    Ladder::Create(FockMode::Positron(-1)),
                ],
                0,
            )
            .unwrap()
            .unwrap()
            .0;
        let i = basis.index_of(pair).unwrap();
        assert!((diag[i] - 2.0 * c.energy(1)).abs() < 1e-15);
        assert!(diag.iter().skip(1).all(|&e| e >= c.mass));
    }

    #[test]
    fn bilinears_are_hermitian() {
        let c = cfg();
        for basis in [FockBasis::full(1).unwrap(), FockBasis::new(2, Some(3)).unwrap()] {
            for z in [0.0, 0.4, -2.0] {
                for kind in [Bilinear::Density, Bilinear::Current, Bilinear::CurrentSlope] {
                    let op = build_bilinear(kind, z, &basis, &c).unwrap();
                    assert!(op.is_hermitian(1e-15), "{kind:?} at {z}");
                }
            }
        }
    }

    #[test]
    fn total_charge_counts_particles() {
        let c = cfg();
        let basis = FockBasis::full(1).unwrap();
        let charge = build_charge(&basis, &c).unwrap();
        let n = basis.modes().count() as f64;
        let diag = charge.diagonal_values().expect("charge is diagonal");
        for (i, &s) in basis.states().iter().enumerate() {
            let electrons = basis
                .modes()
                .filter(|&r| s >> basis.bit(FockMode::Electron(r)).unwrap() & 1 == 1)
                .count() as f64;
            let positrons = basis
                .modes()
                .filter(|&r| s >> basis.bit(FockMode::Positron(r)).unwrap() & 1 == 1)
                .count() as f64;
            assert!((diag[i] - c.charge * (electrons - positrons + n)).abs() < 1e-13);
        }

        // Grid quadrature of ρ̂(z) is exact for band-limited bilinears.
        let h = c.grid_spacing();
        let mut quad = FockOperator::zero(basis.dim());
        for z in c.grid() {
            quad = quad
                .add(&build_rho(z, &basis, &c).unwrap().scale(Complex64::new(h, 0.0)))
                .unwrap();
        }
        assert!(quad.max_abs_diff(&charge).unwrap() < 1e-12);
    }

    #[test]
    fn vacuum_density_pair_amplitude() {
        let c = cfg();
        let basis = FockBasis::full(1).unwrap();
        let z = 0.3;
        let rho = build_rho(z, &basis, &c).unwrap();
        let (r, s) = (1, -1);
        let (pair, sign) = basis
            .apply(
                &[
                    Ladder::Create(FockMode::Electron(r)),
                    Ladder::Create(FockMode::Positron(s)),
                ],
                0,
            )
            .unwrap()
            .unwrap();
        let ur = spinor(c.momentum(r), EnergySign::Positive, c.mass, c.length);
        let us = spinor(c.momentum(s), EnergySign::Negative, c.mass, c.length);
        let want = Complex64::from_polar(
            c.charge * (ur[0] * us[0] + ur[1] * us[1]) * sign,
            (c.momentum(s) - c.momentum(r)) * z,
        );
        let got = rho.get(basis.index_of(pair).unwrap(), 0);
        assert!((got - want).norm() < 1e-15);
        assert!(got.norm() > 1e-3);
        // Vacuum expectation: q (2R_F+1) / L.
        assert!((rho.get(0, 0).re - 3.0 * c.charge / c.length).abs() < 1e-15);
    }
}
