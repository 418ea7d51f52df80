//! Gauge-type pulses and their closed-form propagator.
//!
//! A pulse is `χ(z,t) = g(t) χ1(z)` with potential `(A0, Az) = (∂_t χ, -∂_z χ)`
//! switched on in `[t0, t1]`. Because the potential is pure gauge inside the
//! window, the state at `tf > t1` is
//!
//! ```text
//! ψ(tf) = e^{-iH0(tf - t1)} e^{-iqχ(z, t1)} e^{-iH0(t1 - t0)} ψ(t0)
//! ```
//!
//! The free factors are diagonal in the mode basis; the gauge phase is applied
//! pointwise on the grid and the result is projected back onto the evolution
//! band ([`SimConfig::evolution_cutoff`]). Whatever the projection discards is
//! reported as leakage.

use num_complex::Complex64;

use crate::spectral::{
    GridField, ModeExpansion, PotentialSamples, SimConfig, SpectralGrid,
};
use crate::{Error, Result};

/// Leakage above which [`exact_final_state`] refuses to return a state.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-8;

/// Time envelope `g` on the pulse window, as a function of `s = (t - t0)/(t1 - t0)`.
///
/// Both shapes satisfy `g(0) = g'(0) = 0` and `g(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Envelope {
    /// `sin²(πs/2)`
    #[default]
    SinSquared,
    /// `3s² - 2s³`
    Smoothstep,
}

impl Envelope {
    pub fn value(self, s: f64) -> f64 {
        match self {
            Envelope::SinSquared => (0.5 * std::f64::consts::PI * s).sin().powi(2),
            Envelope::Smoothstep => s * s * (3.0 - 2.0 * s),
        }
    }

    /// `dg/ds`.
    pub fn slope(self, s: f64) -> f64 {
        match self {
            Envelope::SinSquared => 0.5 * std::f64::consts::PI * (std::f64::consts::PI * s).sin(),
            Envelope::Smoothstep => 6.0 * s * (1.0 - s),
        }
    }

    /// `max_s |dg/ds|`.
    pub fn max_slope(self) -> f64 {
        match self {
            Envelope::SinSquared => 0.5 * std::f64::consts::PI,
            Envelope::Smoothstep => 1.5,
        }
    }
}

/// `χ(z,t) = g(t) χ1(z)` with `χ1(z) = Σ_k a_k cos(p_k z) + b_k sin(p_k z)`,
/// `k = 0..=K`, `K <= R`.
///
/// The profile is periodic by construction; a non-periodic spatial profile
/// cannot be expressed.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePulse {
    cos: Vec<f64>,
    sin: Vec<f64>,
    envelope: Envelope,
    t0: f64,
    t1: f64,
    length: f64,
}

impl GaugePulse {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>, envelope: Envelope, cfg: &SimConfig) -> Result<Self> {
        let len = cos.len().max(sin.len()).max(1);
        let harmonic = len - 1;
        if harmonic > cfg.cutoff {
            return Err(Error::HarmonicOutOfRange {
                harmonic,
                cutoff: cfg.cutoff,
            });
        }
        if cos.iter().chain(&sin).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig {
                key: "pulse",
                reason: "harmonic coefficients must be finite".into(),
            });
        }
        let mut cos = cos;
        let mut sin = sin;
        cos.resize(len, 0.0);
        sin.resize(len, 0.0);
        sin[0] = 0.0;
        Ok(Self {
            cos,
            sin,
            envelope,
            t0: cfg.t0,
            t1: cfg.t1,
            length: cfg.length,
        })
    }

    pub fn zero(cfg: &SimConfig) -> Self {
        Self::new(vec![0.0], vec![0.0], Envelope::default(), cfg).expect("zero pulse is valid")
    }

    /// `χ1(z) = a cos(p_k z) + b sin(p_k z)`.
    pub fn single_harmonic(k: usize, a: f64, b: f64, cfg: &SimConfig) -> Result<Self> {
        let mut cos = vec![0.0; k + 1];
        let mut sin = vec![0.0; k + 1];
        cos[k] = a;
        sin[k] = b;
        Self::new(cos, sin, Envelope::default(), cfg)
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.cos.iter_mut().chain(out.sin.iter_mut()).for_each(|v| *v *= factor);
        out
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    /// Highest harmonic `K`.
    pub fn harmonics(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&v| v == 0.0)
    }

    fn wavenumber(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.length
    }

    /// Spatial profile `χ1(z)`.
    pub fn profile(&self, z: f64) -> f64 {
        (0..self.cos.len())
            .map(|k| {
                let (s, c) = (self.wavenumber(k) * z).sin_cos();
                self.cos[k] * c + self.sin[k] * s
            })
            .sum()
    }

    /// `χ1'(z)`.
    pub fn profile_slope(&self, z: f64) -> f64 {
        (0..self.cos.len())
            .map(|k| {
                let p = self.wavenumber(k);
                let (s, c) = (p * z).sin_cos();
                p * (self.sin[k] * c - self.cos[k] * s)
            })
            .sum()
    }

    fn phase_of(&self, t: f64) -> f64 {
        ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0)
    }

    /// `g(t)`: zero before the window, frozen at `g(t1)` after it.
    pub fn envelope_value(&self, t: f64) -> f64 {
        self.envelope.value(self.phase_of(t))
    }

    /// `g'(t)`, zero outside the window.
    pub fn envelope_rate(&self, t: f64) -> f64 {
        if t < self.t0 || t > self.t1 {
            return 0.0;
        }
        self.envelope.slope(self.phase_of(t)) / (self.t1 - self.t0)
    }

    pub fn chi(&self, z: f64, t: f64) -> f64 {
        self.envelope_value(t) * self.profile(z)
    }

    fn active(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t1
    }

    /// `(A0, Az) = (g'(t) χ1(z), -g(t) χ1'(z))` inside `[t0, t1]`, zero outside.
    pub fn potential(&self, z: f64, t: f64) -> (f64, f64) {
        if !self.active(t) {
            return (0.0, 0.0);
        }
        (
            self.envelope_rate(t) * self.profile(z),
            -self.envelope_value(t) * self.profile_slope(z),
        )
    }

    pub fn profile_samples(&self, cfg: &SimConfig) -> Vec<f64> {
        cfg.grid().into_iter().map(|z| self.profile(z)).collect()
    }

    pub fn profile_slope_samples(&self, cfg: &SimConfig) -> Vec<f64> {
        cfg.grid().into_iter().map(|z| self.profile_slope(z)).collect()
    }

    pub fn potential_samples(&self, cfg: &SimConfig, t: f64) -> PotentialSamples {
        let (a0, az) = cfg.grid().into_iter().map(|z| self.potential(z, t)).unzip();
        PotentialSamples { a0, az }
    }

    /// Upper bounds on `max|∂_t χ|` and `max|∂_z χ|` over the window.
    pub fn rate_bounds(&self) -> (f64, f64) {
        let abs_sum: f64 = self.cos.iter().zip(&self.sin).map(|(a, b)| a.hypot(*b)).sum();
        let slope_sum: f64 = (0..self.cos.len())
            .map(|k| self.wavenumber(k) * self.cos[k].hypot(self.sin[k]))
            .sum();
        let g_max = (0..=64)
            .map(|i| self.envelope.value(i as f64 / 64.0).abs())
            .fold(0.0, f64::max);
        (
            self.envelope.max_slope() / (self.t1 - self.t0) * abs_sum,
            g_max * slope_sum,
        )
    }
}

/// `c_{λ,r} -> c_{λ,r} e^{-iλE_r dt}`.
pub fn free_propagate(x: &ModeExpansion, dt: f64, cfg: &SimConfig) -> ModeExpansion {
    x.map(|sign, r, c| c * Complex64::from_polar(1.0, -sign.value() * cfg.energy(r) * dt))
}

/// `ψ(z_j) -> e^{-iqχ(z_j, t)} ψ(z_j)`.
pub fn gauge_phase_apply(f: &GridField, pulse: &GaugePulse, t: f64, cfg: &SimConfig) -> GridField {
    let g = pulse.envelope_value(t);
    let samples = f
        .samples
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let phase = Complex64::from_polar(1.0, -cfg.charge * g * pulse.profile(cfg.grid_point(j)));
            [s[0] * phase, s[1] * phase]
        })
        .collect();
    GridField {
        samples,
        length: f.length,
    }
}

/// State at `tf` together with the norm lost in the projection at `t1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub state: ModeExpansion,
    pub leakage: f64,
}

/// Closed-form propagator for one pulse, reusable across many initial states.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    cfg: SimConfig,
    grid: SpectralGrid,
    pulse: GaugePulse,
    threshold: f64,
}

impl ExactPropagator {
    pub fn new(pulse: &GaugePulse, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg: *cfg,
            grid: SpectralGrid::new(cfg),
            pulse: pulse.clone(),
            threshold: DEFAULT_LEAKAGE_THRESHOLD,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn pulse(&self) -> &GaugePulse {
        &self.pulse
    }

    /// Gauge-multiplied state right after the pulse, projected onto the
    /// evolution band but not yet propagated to `tf`.
    fn at_t1(&self, x0: &ModeExpansion) -> Result<EvolvedState> {
        let cfg = &self.cfg;
        let free = free_propagate(x0, cfg.t1 - cfg.t0, cfg);
        let grid = self.grid.synthesize(&free, 0.0)?;
        let kicked = gauge_phase_apply(&grid, &self.pulse, cfg.t1, cfg);
        let projection = self.grid.analyze(&kicked, cfg.evolution_cutoff())?;
        if projection.leakage > self.threshold {
            return Err(Error::Leakage {
                leakage: projection.leakage,
                threshold: self.threshold,
            });
        }
        Ok(EvolvedState {
            state: projection.modes,
            leakage: projection.leakage,
        })
    }

    /// `ψ(tf)` for `ψ(t0) = x0`.
    pub fn final_state(&self, x0: &ModeExpansion) -> Result<EvolvedState> {
        let mid = self.at_t1(x0)?;
        Ok(EvolvedState {
            state: free_propagate(&mid.state, self.cfg.tf - self.cfg.t1, &self.cfg),
            leakage: mid.leakage,
        })
    }

    /// Grid snapshot of the exact solution at any time `t`.
    pub fn state_at(&self, x0: &ModeExpansion, t: f64) -> Result<GridField> {
        let cfg = &self.cfg;
        if t <= cfg.t1 {
            let free = free_propagate(x0, t - cfg.t0, cfg);
            let grid = self.grid.synthesize(&free, 0.0)?;
            Ok(gauge_phase_apply(&grid, &self.pulse, t, cfg))
        } else {
            let mid = self.at_t1(x0)?;
            self.grid.synthesize(&free_propagate(&mid.state, t - cfg.t1, cfg), 0.0)
        }
    }

    /// `Δξ_f = q ∫ χ(z, t1) ∂_z(ψ0†σ_xψ0) dz` with `ψ0` the free evolution of `x0` to `t1`.
    pub fn energy_shift(&self, x0: &ModeExpansion) -> Result<f64> {
        let cfg = &self.cfg;
        let free = free_propagate(x0, cfg.t1 - cfg.t0, cfg);
        let grid = self.grid.synthesize(&free, 0.0)?;
        let current = crate::spectral::charge_current_density(&grid, 1.0).current;
        let slope = self.grid.derivative_real(&current);
        let g = self.pulse.envelope_value(cfg.t1);
        let integral: f64 = slope
            .iter()
            .enumerate()
            .map(|(j, d)| g * self.pulse.profile(cfg.grid_point(j)) * d)
            .sum();
        Ok(cfg.charge * integral * cfg.grid_spacing())
    }
}

/// `ψ(tf) = e^{-iH0(tf-t1)} e^{-iqχ(z,t1)} e^{-iH0(t1-t0)} ψ(t0)` with the
/// default leakage threshold.
pub fn exact_final_state(
    x0: &ModeExpansion,
    pulse: &GaugePulse,
    cfg: &SimConfig,
) -> Result<EvolvedState> {
    ExactPropagator::new(pulse, cfg)?.final_state(x0)
}

pub fn energy_shift_formula(x0: &ModeExpansion, pulse: &GaugePulse, cfg: &SimConfig) -> Result<f64> {
    ExactPropagator::new(pulse, cfg)?.energy_shift(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{free_energy, to_grid, EnergySign, InnerProduct};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SimConfig {
        SimConfig {
            cutoff: 8,
            grid_points: 128,
            ..Default::default()
        }
    }

    fn random_state(cutoff: usize, rng: &mut ChaCha8Rng) -> ModeExpansion {
        let x = ModeExpansion::from_fn(cutoff, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let n = x.norm();
        x.scaled(Complex64::new(1.0 / n, 0.0))
    }

    fn packet(c: &SimConfig) -> ModeExpansion {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut x = ModeExpansion::zeros(c.cutoff);
        x.set(EnergySign::Positive, 1, h).unwrap();
        x.set(EnergySign::Positive, 0, h).unwrap();
        x
    }

    #[test]
    fn envelopes_meet_initial_conditions() {
        for e in [Envelope::SinSquared, Envelope::Smoothstep] {
            assert_eq!(e.value(0.0), 0.0);
            assert_eq!(e.slope(0.0), 0.0);
            assert!((e.value(1.0) - 1.0).abs() < 1e-15);
            // finite-difference check of the analytic slope
            for &s in &[0.1, 0.45, 0.8] {
                let h = 1e-6;
                let fd = (e.value(s + h) - e.value(s - h)) / (2.0 * h);
                assert!((fd - e.slope(s)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn potential_vanishes_outside_window() {
        let c = cfg();
        let p = GaugePulse::single_harmonic(2, 0.3, -0.1, &c).unwrap();
        for &t in &[-1.0, c.t1 + 1e-9, c.tf] {
            for &z in &[-1.0, 0.0, 2.0] {
                assert_eq!(p.potential(z, t), (0.0, 0.0));
            }
        }
        assert_eq!(p.chi(0.7, c.t0), 0.0);
        assert_eq!(p.envelope_rate(c.t0), 0.0);
        let (a0, az) = p.potential(0.4, 0.5 * (c.t0 + c.t1));
        assert!(a0 != 0.0 && az != 0.0);
    }

    #[test]
    fn profile_slope_matches_finite_difference() {
        let c = cfg();
        let p = GaugePulse::new(vec![0.1, 0.2, -0.3], vec![0.0, 0.5, 0.05], Envelope::SinSquared, &c)
            .unwrap();
        for &z in &[-2.0, 0.3, 1.7] {
            let h = 1e-6;
            let fd = (p.profile(z + h) - p.profile(z - h)) / (2.0 * h);
            assert!((fd - p.profile_slope(z)).abs() < 1e-8);
            // periodicity
            assert!((p.profile(z) - p.profile(z + c.length)).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonics_above_cutoff_are_rejected() {
        let c = cfg();
        assert!(matches!(
            GaugePulse::single_harmonic(9, 1.0, 0.0, &c),
            Err(Error::HarmonicOutOfRange { harmonic: 9, cutoff: 8 })
        ));
    }

    #[test]
    fn free_propagation_group_property() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_state(c.cutoff, &mut rng);
        assert_eq!(free_propagate(&x, 0.0, &c), x);
        let two = free_propagate(&free_propagate(&x, 0.3, &c), 0.45, &c);
        let one = free_propagate(&x, 0.75, &c);
        assert!(two.max_abs_diff(&one) < 1e-14);
        assert!((one.norm_sqr() - x.norm_sqr()).abs() < 1e-14);
        assert!((free_energy(&one, &c) - free_energy(&x, &c)).abs() < 1e-13);
    }

    #[test]
    fn single_mode_phase() {
        let c = cfg();
        let x = ModeExpansion::basis_state(EnergySign::Negative, 3, c.cutoff).unwrap();
        let y = free_propagate(&x, 0.9, &c);
        let expected = Complex64::from_polar(1.0, c.energy(3) * 0.9);
        assert!((y.get(EnergySign::Negative, 3) - expected).norm() < 1e-15);
    }

    #[test]
    fn gauge_phase_is_unimodular() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = to_grid(&random_state(c.cutoff, &mut rng), &c, 0.0).unwrap();
        let p = GaugePulse::single_harmonic(1, 2.0, 1.0, &c).unwrap();
        let out = gauge_phase_apply(&g, &p, 0.6, &c);
        assert!((out.norm_sqr() - g.norm_sqr()).abs() < 1e-14);
        assert_eq!(gauge_phase_apply(&g, &GaugePulse::zero(&c), 0.6, &c), g);
    }

    #[test]
    fn constant_profile_is_a_global_phase() {
        let c = cfg();
        let x = packet(&c);
        let p = GaugePulse::new(vec![0.8], vec![], Envelope::SinSquared, &c).unwrap();
        let out = exact_final_state(&x, &p, &c).unwrap();
        let free = free_propagate(&x, c.tf - c.t0, &c).widen(c.evolution_cutoff()).unwrap();
        let phase = Complex64::from_polar(1.0, -c.charge * 0.8);
        assert!(out.state.max_abs_diff(&free.scaled(phase)) < 1e-13);
        assert!(energy_shift_formula(&x, &p, &c).unwrap().abs() < 1e-13);
    }

    #[test]
    fn zero_pulse_is_free_evolution() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_state(c.cutoff, &mut rng);
        let out = exact_final_state(&x, &GaugePulse::zero(&c), &c).unwrap();
        let free = free_propagate(&x, c.tf - c.t0, &c);
        assert!(out.state.max_abs_diff(&free) < 1e-13);
        assert!(out.leakage < 1e-13);
    }

    #[test]
    fn exact_evolution_is_unitary() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = GaugePulse::single_harmonic(2, 0.7, -0.4, &c).unwrap();
        let prop = ExactPropagator::new(&p, &c).unwrap();
        let a = random_state(c.cutoff, &mut rng);
        let b = random_state(c.cutoff, &mut rng);
        let fa = prop.final_state(&a).unwrap().state;
        let fb = prop.final_state(&b).unwrap().state;
        assert!((fa.norm_sqr() - 1.0).abs() < 1e-10);
        let before = a.inner(&b).unwrap();
        let after = fa.inner(&fb).unwrap();
        assert!((before - after).norm() < 1e-10);
    }

    #[test]
    fn energy_shift_routes_agree() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=3 {
            let p = GaugePulse::single_harmonic(k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), &c)
                .unwrap();
            for x in [packet(&c), random_state(c.cutoff, &mut rng)] {
                let out = exact_final_state(&x, &p, &c).unwrap();
                let direct = free_energy(&out.state, &c) - free_energy(&x, &c);
                let formula = energy_shift_formula(&x, &p, &c).unwrap();
                assert!((direct - formula).abs() < 1e-8, "{direct} vs {formula}");
            }
        }
    }

    #[test]
    fn plane_waves_gain_no_energy() {
        let c = cfg();
        let p = GaugePulse::single_harmonic(1, 0.0, 1.5, &c).unwrap();
        for sign in EnergySign::BOTH {
            for r in c.modes() {
                let x = ModeExpansion::basis_state(sign, r, c.cutoff).unwrap();
                assert!(energy_shift_formula(&x, &p, &c).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn only_final_envelope_value_matters() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random_state(c.cutoff, &mut rng);
        let p = GaugePulse::single_harmonic(2, 0.5, 0.2, &c).unwrap();
        let a = exact_final_state(&x, &p, &c).unwrap().state;
        let b = exact_final_state(&x, &p.clone().with_envelope(Envelope::Smoothstep), &c)
            .unwrap()
            .state;
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn gauge_identity_on_grid() {
        // e^{+iqχ} H0 e^{-iqχ} ψ = (H0 - qσ_x χ') ψ
        let c = SimConfig {
            grid_points: 256,
            ..cfg()
        };
        let grid = SpectralGrid::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = grid.synthesize(&random_state(c.cutoff, &mut rng), 0.0).unwrap();
        let p = GaugePulse::single_harmonic(1, 0.4, 0.3, &c).unwrap();
        let t = c.t1;
        let left = {
            let down = gauge_phase_apply(&psi, &p, t, &c);
            let h = grid.apply_free_hamiltonian(&down);
            gauge_phase_apply(&h, &p.scaled(-1.0), t, &c)
        };
        let h = grid.apply_free_hamiltonian(&psi);
        for (j, (l, (hs, s))) in left.samples.iter().zip(h.samples.iter().zip(&psi.samples)).enumerate() {
            let slope = p.envelope_value(t) * p.profile_slope(c.grid_point(j));
            let right = [hs[0] - c.charge * slope * s[1], hs[1] - c.charge * slope * s[0]];
            assert!((l[0] - right[0]).norm() < 1e-8);
            assert!((l[1] - right[1]).norm() < 1e-8);
        }
    }

    #[test]
    fn strong_pulse_on_coarse_grid_reports_leakage() {
        let c = cfg();
        let p = GaugePulse::single_harmonic(1, 40.0, 0.0, &c).unwrap();
        let x = ModeExpansion::basis_state(EnergySign::Negative, 8, c.cutoff).unwrap();
        assert!(matches!(exact_final_state(&x, &p, &c), Err(Error::Leakage { .. })));
    }

    #[test]
    fn state_at_is_continuous_at_t1() {
        let c = cfg();
        let p = GaugePulse::single_harmonic(1, 0.5, 0.1, &c).unwrap();
        let prop = ExactPropagator::new(&p, &c).unwrap();
        let x = packet(&c);
        let before = prop.state_at(&x, c.t1).unwrap();
        let after = prop.state_at(&x, c.t1 + 1e-12).unwrap();
        assert!(before.l2_distance(&after).unwrap() < 1e-10);
    }
}
