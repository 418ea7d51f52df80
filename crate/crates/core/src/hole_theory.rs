//! Filled-sea bookkeeping.
//!
//! Every negative-energy mode `|r| <= R` carries one electron; one extra
//! electron sits in a positive-energy packet. Each orbital evolves by the
//! single-particle propagator and N-electron observables are sums over
//! orbitals. All reported energies are relative to the unperturbed sea, so the
//! cutoff-dependent constant `-Σ E_r` never enters an output.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::evolution::{ExactPropagator, GaugePulse};
use crate::spectral::{
    charge_current_density, free_energy, EnergySign, InnerProduct, ModeExpansion, SimConfig,
    SpectralGrid,
};
use crate::{Envelope, Error, Result};

/// The unperturbed Dirac sea truncated at `|r| <= R`.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumSet {
    cutoff: usize,
    unperturbed_energy: f64,
}

impl VacuumSet {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            cutoff: cfg.cutoff,
            unperturbed_energy: -cfg.modes().map(|r| cfg.energy(r)).sum::<f64>(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `-Σ_r E_r` over the retained sea.
    pub fn unperturbed_energy(&self) -> f64 {
        self.unperturbed_energy
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let c = self.cutoff as i64;
        -c..=c
    }

    /// Sea orbital `(−1, r)` as it stands at `t0`.
    pub fn orbital(&self, r: i64, cfg: &SimConfig) -> Result<ModeExpansion> {
        let mut x = ModeExpansion::zeros(self.cutoff);
        x.set(
            EnergySign::Negative,
            r,
            Complex64::from_polar(1.0, cfg.energy(r) * cfg.t0),
        )?;
        Ok(x)
    }

    pub fn orbitals(&self, cfg: &SimConfig) -> Vec<ModeExpansion> {
        self.modes()
            .map(|r| self.orbital(r, cfg).expect("mode inside own cutoff"))
            .collect()
    }
}

/// Extra electron `ψ_p(t0) = Σ_r f_r φ_{+1,r}(t0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePacket {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl PositivePacket {
    /// `coeffs[r + R] = f_r`; must be normalized.
    pub fn new(coeffs: Vec<Complex64>, cfg: &SimConfig) -> Result<Self> {
        let width = 2 * cfg.cutoff + 1;
        if coeffs.len() != width {
            return Err(Error::SizeMismatch {
                left: coeffs.len(),
                right: width,
            });
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            cutoff: cfg.cutoff,
            coeffs,
        })
    }

    pub fn single_mode(r: i64, cfg: &SimConfig) -> Result<Self> {
        check_mode(r, cfg)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * cfg.cutoff + 1];
        coeffs[(r + cfg.cutoff as i64) as usize] = Complex64::new(1.0, 0.0);
        Self::new(coeffs, cfg)
    }

    pub fn coefficient(&self, r: i64) -> Complex64 {
        let c = self.cutoff as i64;
        if r.abs() > c {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(r + c) as usize]
        }
    }

    /// Indices with nonzero weight.
    pub fn support(&self) -> Vec<i64> {
        let c = self.cutoff as i64;
        (-c..=c)
            .filter(|&r| self.coefficient(r) != Complex64::new(0.0, 0.0))
            .collect()
    }

    /// Mode amplitudes at `t0` (`f_r e^{-iE_r t0}` on the stationary modes).
    pub fn at_t0(&self, cfg: &SimConfig) -> ModeExpansion {
        ModeExpansion::from_fn(self.cutoff, |sign, r| match sign {
            EnergySign::Positive => {
                self.coefficient(r) * Complex64::from_polar(1.0, -cfg.energy(r) * cfg.t0)
            }
            EnergySign::Negative => Complex64::new(0.0, 0.0),
        })
    }

    /// `ξ_f(ψ_p(t0)) = Σ |f_r|² E_r`.
    pub fn free_energy(&self, cfg: &SimConfig) -> f64 {
        free_energy(&self.at_t0(cfg), cfg)
    }
}

fn check_mode(r: i64, cfg: &SimConfig) -> Result<()> {
    if r.unsigned_abs() as usize > cfg.cutoff {
        return Err(Error::ModeOutOfRange {
            r,
            cutoff: cfg.cutoff,
        });
    }
    Ok(())
}

/// `(φ_{+1,r} + φ_{+1,s}) / √2`.
pub fn packet_two_mode(r: i64, s: i64, cfg: &SimConfig) -> Result<PositivePacket> {
    if r == s {
        return Err(Error::DegeneratePacket(r));
    }
    check_mode(r, cfg)?;
    check_mode(s, cfg)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * cfg.cutoff + 1];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    coeffs[(r + cfg.cutoff as i64) as usize] = h;
    coeffs[(s + cfg.cutoff as i64) as usize] = h;
    PositivePacket::new(coeffs, cfg)
}

/// Current `J_p^{(0)}(z, t1)` of the packet evolved freely from `t0` to `t1`.
pub fn free_current_profile(p: &PositivePacket, t1: f64, cfg: &SimConfig) -> Result<Vec<f64>> {
    let free = crate::evolution::free_propagate(&p.at_t0(cfg), t1 - cfg.t0, cfg);
    let field = SpectralGrid::new(cfg).synthesize(&free, 0.0)?;
    Ok(charge_current_density(&field, cfg.charge).current)
}

/// `∂J_p^{(0)}/∂z` by spectral differentiation.
pub fn current_derivative(p: &PositivePacket, t1: f64, cfg: &SimConfig) -> Result<Vec<f64>> {
    let current = free_current_profile(p, t1, cfg)?;
    Ok(SpectralGrid::new(cfg).derivative_real(&current))
}

/// [`current_derivative`], rejecting a slope that is zero up to round-off
/// (single modes, or counter-propagating pairs `r = -s`).
fn nonvanishing_slope(p: &PositivePacket, t1: f64, cfg: &SimConfig) -> Result<Vec<f64>> {
    let slope = current_derivative(p, t1, cfg)?;
    let scale = cfg.charge.abs() / (cfg.length * cfg.length);
    let peak = slope.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak.is_nan() || peak <= 1e-12 * scale {
        return Err(Error::CurrentDerivativeVanishes);
    }
    Ok(slope)
}

/// `∫ (∂J_p^{(0)}/∂z)² dz`.
pub fn slope_integral(p: &PositivePacket, t1: f64, cfg: &SimConfig) -> Result<f64> {
    let d = current_derivative(p, t1, cfg)?;
    Ok(d.iter().map(|v| v * v).sum::<f64>() * cfg.grid_spacing())
}

/// Closed-form current of the two-mode packet:
/// `q/2 [u_r†σ_xu_r + u_s†σ_xu_s + 2N_rN_s(a_r + a_s) cos((E_r-E_s)t1 - (p_r-p_s)z)]`
/// with `a = p/(E+m)`.
pub fn two_mode_current(r: i64, s: i64, t1: f64, z: f64, cfg: &SimConfig) -> f64 {
    let (nr, ar, er, pr) = positive_parts(r, cfg);
    let (ns, as_, es, ps) = positive_parts(s, cfg);
    let diag = 2.0 * nr * nr * ar + 2.0 * ns * ns * as_;
    let cross = 2.0 * nr * ns * (ar + as_) * ((er - es) * t1 - (pr - ps) * z).cos();
    0.5 * cfg.charge * (diag + cross)
}

/// `∂_z` of [`two_mode_current`]:
/// `q(p_r-p_s) N_rN_s (a_s + a_r) sin((E_r-E_s)t1 - (p_r-p_s)z)`.
pub fn two_mode_current_slope(r: i64, s: i64, t1: f64, z: f64, cfg: &SimConfig) -> f64 {
    let (nr, ar, er, pr) = positive_parts(r, cfg);
    let (ns, as_, es, ps) = positive_parts(s, cfg);
    cfg.charge * (pr - ps) * nr * ns * (as_ + ar) * ((er - es) * t1 - (pr - ps) * z).sin()
}

fn positive_parts(r: i64, cfg: &SimConfig) -> (f64, f64, f64, f64) {
    let p = cfg.momentum(r);
    let e = cfg.energy(r);
    let n = ((e + cfg.mass) / (2.0 * cfg.length * e)).sqrt();
    (n, p / (e + cfg.mass), e, p)
}

/// Pulse whose profile at `t1` is `χ(z, t1) = -λ ∂J_p^{(0)}/∂z`.
///
/// The derivative is expanded in real harmonics up to the widest mode
/// separation in the packet's support; the envelope is the default one, so
/// `g(t1) = 1`.
pub fn chi_from_current(
    p: &PositivePacket,
    lambda: f64,
    t1: f64,
    cfg: &SimConfig,
) -> Result<GaugePulse> {
    let slope = nonvanishing_slope(p, t1, cfg)?;
    let support = p.support();
    let spread = support.iter().max().unwrap() - support.iter().min().unwrap();
    let harmonics = spread as usize;
    if harmonics > cfg.cutoff {
        return Err(Error::HarmonicOutOfRange {
            harmonic: harmonics,
            cutoff: cfg.cutoff,
        });
    }
    let (cos, sin) = real_harmonics(&slope, harmonics, cfg);
    let pulse = GaugePulse::new(cos, sin, Envelope::default(), cfg)?;
    Ok(pulse.scaled(-lambda))
}

/// Real Fourier coefficients `(a_k, b_k)`, `k = 0..=harmonics`, of grid samples.
fn real_harmonics(samples: &[f64], harmonics: usize, cfg: &SimConfig) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let grid = SpectralGrid::new(cfg);
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward(&mut data);
    let mut cos = vec![0.0; harmonics + 1];
    let mut sin = vec![0.0; harmonics + 1];
    for k in 0..=harmonics {
        let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = data[k] * parity / n as f64;
        if k == 0 {
            cos[0] = c.re;
        } else {
            cos[k] = 2.0 * c.re;
            sin[k] = -2.0 * c.im;
        }
    }
    (cos, sin)
}

/// Per-mode energy change of the sea and its sum.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumShift {
    /// `(r, Δε_{-1,r})`.
    pub per_mode: Vec<(i64, f64)>,
    pub total: f64,
}

impl VacuumShift {
    pub fn max_abs(&self) -> f64 {
        self.per_mode.iter().fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    fn from_modes(per_mode: Vec<(i64, f64)>) -> Self {
        let total = per_mode.iter().map(|(_, v)| v).sum();
        Self { per_mode, total }
    }
}

/// `Δε_{-1,r} = q ∫ χ(z,t1) ∂_z(φ†σ_xφ) dz` for every sea mode.
pub fn vacuum_energy_shift(pulse: &GaugePulse, cfg: &SimConfig) -> Result<VacuumShift> {
    let prop = ExactPropagator::new(pulse, cfg)?;
    let vacuum = VacuumSet::new(cfg);
    let per_mode = vacuum
        .modes()
        .map(|r| Ok((r, prop.energy_shift(&vacuum.orbital(r, cfg)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(VacuumShift::from_modes(per_mode))
}

/// Same shifts obtained by evolving each sea orbital exactly and differencing
/// its free energy.
pub fn vacuum_energy_shift_exact(pulse: &GaugePulse, cfg: &SimConfig) -> Result<(VacuumShift, f64)> {
    let prop = ExactPropagator::new(pulse, cfg)?;
    evolve_sea(&prop, cfg)
}

fn evolve_sea(prop: &ExactPropagator, cfg: &SimConfig) -> Result<(VacuumShift, f64)> {
    let vacuum = VacuumSet::new(cfg);
    let modes: Vec<i64> = vacuum.modes().collect();
    let results = modes
        .par_iter()
        .map(|&r| {
            let orbital = vacuum.orbital(r, cfg)?;
            let evolved = prop.final_state(&orbital)?;
            let shift = free_energy(&evolved.state, cfg) + cfg.energy(r);
            Ok(((r, shift), evolved.leakage))
        })
        .collect::<Result<Vec<_>>>()?;
    let leakage = results.iter().fold(0.0f64, |m, (_, l)| m.max(*l));
    Ok((
        VacuumShift::from_modes(results.into_iter().map(|(s, _)| s).collect()),
        leakage,
    ))
}

/// One row of the energy-below-vacuum sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtEnergyReport {
    pub lambda: f64,
    /// `E_{T,R}(t0) = ξ_f(ψ_p(t0))`.
    pub e_tr_t0: f64,
    pub de_hvac: f64,
    pub d_xi_fp: f64,
    /// `ξ_f(ψ_p(tf)) + ΔE_hvac`, from direct energy evaluation.
    pub e_tr_tf: f64,
    /// `ξ_f(ψ_p(t0)) - λ ∫(∂J/∂z)² dz`.
    pub predicted: f64,
    pub leakage: f64,
}

impl HtEnergyReport {
    pub fn abs_diff(&self) -> f64 {
        (self.e_tr_tf - self.predicted).abs()
    }
}

/// `1 / ∫(∂J/∂z)² dz`: the λ that lowers the packet energy by one unit.
pub fn natural_lambda_unit(p: &PositivePacket, cfg: &SimConfig) -> Result<f64> {
    let d = nonvanishing_slope(p, cfg.t1, cfg)?;
    Ok(1.0 / (d.iter().map(|v| v * v).sum::<f64>() * cfg.grid_spacing()))
}

/// Drive the packet with `χ(z, t1) = -λ ∂J/∂z` for each `λ` and account for
/// the packet and the whole sea.
pub fn ht_energy_sweep(
    p: &PositivePacket,
    lambdas: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<HtEnergyReport>> {
    cfg.validate()?;
    let integral = slope_integral(p, cfg.t1, cfg)?;
    let x0 = p.at_t0(cfg);
    let xi_t0 = free_energy(&x0, cfg);
    lambdas
        .iter()
        .map(|&lambda| {
            let pulse = chi_from_current(p, lambda, cfg.t1, cfg)?;
            let prop = ExactPropagator::new(&pulse, cfg)?;
            let packet = prop.final_state(&x0)?;
            let xi_tf = free_energy(&packet.state, cfg);
            let (sea, sea_leak) = evolve_sea(&prop, cfg)?;
            Ok(HtEnergyReport {
                lambda,
                e_tr_t0: xi_t0,
                de_hvac: sea.total,
                d_xi_fp: xi_tf - xi_t0,
                e_tr_tf: xi_tf + sea.total,
                predicted: xi_t0 - lambda * integral,
                leakage: packet.leakage.max(sea_leak),
            })
        })
        .collect()
}

/// `max_{a,b} |<ψ_a, ψ_b> - δ_ab|` of a set of states.
pub fn gram_deviation(states: &[ModeExpansion]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, sa) in states.iter().enumerate() {
        for (b, sb) in states.iter().enumerate().skip(a) {
            let d = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((sa.inner(sb)? - d).norm());
        }
    }
    Ok(worst)
}

/// Evolve every state by the same exact propagator and return the Gram
/// deviation of the results.
pub fn pauli_orthogonality_check(
    states: &[ModeExpansion],
    pulse: &GaugePulse,
    cfg: &SimConfig,
) -> Result<f64> {
    let prop = ExactPropagator::new(pulse, cfg)?;
    let evolved = states
        .par_iter()
        .map(|s| prop.final_state(s).map(|e| e.state))
        .collect::<Result<Vec<_>>>()?;
    gram_deviation(&evolved)
}

/// All sea orbitals followed by the packet, as they stand at `t0`.
pub fn occupied_orbitals(p: &PositivePacket, cfg: &SimConfig) -> Vec<ModeExpansion> {
    let mut states = VacuumSet::new(cfg).orbitals(cfg);
    states.push(p.at_t0(cfg));
    states
}
