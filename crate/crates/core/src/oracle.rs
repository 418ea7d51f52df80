//! Brute-force time stepping of the driven Dirac equation, used to check the
//! closed-form propagator rather than to replace it.
//!
//! `i∂ψ/∂t = (H0 + q∂χ/∂t + qσ_x ∂χ/∂z)ψ` is advanced by the implicit midpoint
//! rule. The linear system `(1 + iαH) ψ_{n+1} = (1 - iαH) ψ_n`, `α = dt/2`, is
//! solved by fixed-point iteration preconditioned with the exact Fourier-space
//! inverse of `1 + iαH0`, so only the potential is iterated. Nothing here
//! touches the gauge-phase machinery of [`crate::evolution`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::evolution::GaugePulse;
use crate::spectral::{charge_current_density, join, split, GridField, SimConfig, SpectralGrid};
use crate::{Error, Result};

/// Stability budget for `dt · (E_max + q max|∂_tχ| + q max|∂_zχ|)`.
pub const STEP_BUDGET: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Stop iterating once successive iterates differ by less than this (L2).
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            tolerance: 1e-15,
            max_iterations: 100,
        }
    }

    /// `dt · (E_R + q max|∂_tχ| + q max|∂_zχ|)`, which must stay below
    /// [`STEP_BUDGET`].
    pub fn step_product(&self, pulse: &GaugePulse, cfg: &SimConfig) -> f64 {
        let (rt, rz) = pulse.rate_bounds();
        self.dt * (cfg.max_energy() + cfg.charge.abs() * (rt + rz))
    }

    pub fn validate(&self, pulse: &GaugePulse, cfg: &SimConfig) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig {
                key: "integrator.dt",
                reason: format!("must be positive and finite, got {}", self.dt),
            });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 || self.max_iterations == 0 {
            return Err(Error::InvalidConfig {
                key: "integrator.tolerance",
                reason: "tolerance and iteration budget must be positive".into(),
            });
        }
        let product = self.step_product(pulse, cfg);
        if product >= STEP_BUDGET {
            return Err(Error::StepTooLarge {
                dt: self.dt,
                product,
            });
        }
        Ok(())
    }
}

/// Which states to keep while stepping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recording {
    Endpoint,
    EveryStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridField>,
}

impl Trajectory {
    pub fn last(&self) -> &GridField {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Implicit-midpoint integrator for one pulse and grid.
#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: SimConfig,
    icfg: IntegratorConfig,
    grid: SpectralGrid,
    pulse: GaugePulse,
    profile: Vec<f64>,
    profile_slope: Vec<f64>,
}

impl Integrator {
    pub fn new(pulse: &GaugePulse, cfg: &SimConfig, icfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        icfg.validate(pulse, cfg)?;
        Ok(Self {
            cfg: *cfg,
            icfg,
            grid: SpectralGrid::new(cfg),
            pulse: pulse.clone(),
            profile: pulse.profile_samples(cfg),
            profile_slope: pulse.profile_slope_samples(cfg),
        })
    }

    /// Step times from `t0` to `tf`; `t1` always lands on a step boundary.
    pub fn times(&self) -> Vec<f64> {
        let SimConfig { t0, t1, tf, .. } = self.cfg;
        let mut times = vec![t0];
        for (a, b) in [(t0, t1), (t1, tf)] {
            // Slack keeps an exact divisor from rounding up to an extra step.
            let n = ((b - a) / self.icfg.dt - 1e-9).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            times.extend((1..n).map(|i| a + i as f64 * h));
            times.push(b);
        }
        times
    }

    /// Pointwise potential term `q(A0 - σ_x Az)` at time `t` as `(scalar, σ_x)`
    /// coefficients per grid point.
    fn potential(&self, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let (t0, t1) = self.pulse.window();
        if t < t0 || t > t1 || self.pulse.is_zero() {
            return None;
        }
        let q = self.cfg.charge;
        let rate = self.pulse.envelope_rate(t);
        let g = self.pulse.envelope_value(t);
        Some((
            self.profile.iter().map(|c| q * rate * c).collect(),
            self.profile_slope.iter().map(|c| q * g * c).collect(),
        ))
    }

    fn apply_potential(
        pot: &(Vec<f64>, Vec<f64>),
        upper: &[Complex64],
        lower: &[Complex64],
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let (scalar, sx) = pot;
        (0..upper.len())
            .map(|j| {
                (
                    scalar[j] * upper[j] + sx[j] * lower[j],
                    sx[j] * upper[j] + scalar[j] * lower[j],
                )
            })
            .unzip()
    }

    /// `H0(k) = [[m, k], [k, -m]]` applied bin by bin.
    fn h0_hat(&self, bin: usize, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let k = self.grid.bin_momentum(bin);
        let m = self.cfg.mass;
        (m * a + k * b, k * a - m * b)
    }

    fn step(&self, f: &GridField, t_mid: f64, dt: f64) -> Result<GridField> {
        let n = f.len();
        let alpha = Complex64::new(0.0, 0.5 * dt);
        let inv_n = 1.0 / n as f64;
        let (mut upper, mut lower) = split(f);
        let pot = self.potential(t_mid);

        let (mut vu, mut vl) = match &pot {
            Some(p) => Self::apply_potential(p, &upper, &lower),
            None => (vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]),
        };
        self.grid.forward(&mut upper);
        self.grid.forward(&mut lower);
        self.grid.forward(&mut vu);
        self.grid.forward(&mut vl);

        // rhs = (1 - iαH0)ψ̂ - iα V̂ψ
        let mut rhs_u = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs_l = vec![Complex64::new(0.0, 0.0); n];
        for b in 0..n {
            let (hu, hl) = self.h0_hat(b, upper[b], lower[b]);
            rhs_u[b] = upper[b] - alpha * (hu + vu[b]);
            rhs_l[b] = lower[b] - alpha * (hl + vl[b]);
        }

        let solve = |wu: &[Complex64], wl: &[Complex64]| -> (Vec<Complex64>, Vec<Complex64>) {
            // (1 + iαH0)^{-1} = (1 - iαH0) / (1 + α²E_k²)
            let mut xu = vec![Complex64::new(0.0, 0.0); n];
            let mut xl = vec![Complex64::new(0.0, 0.0); n];
            for b in 0..n {
                let k = self.grid.bin_momentum(b);
                let e2 = k * k + self.cfg.mass * self.cfg.mass;
                let denom = 1.0 + 0.25 * dt * dt * e2;
                let (hu, hl) = self.h0_hat(b, wu[b], wl[b]);
                xu[b] = (wu[b] - alpha * hu) / denom * inv_n;
                xl[b] = (wl[b] - alpha * hl) / denom * inv_n;
            }
            self.grid.inverse(&mut xu);
            self.grid.inverse(&mut xl);
            (xu, xl)
        };

        let Some(pot) = pot else {
            let (u, l) = solve(&rhs_u, &rhs_l);
            return Ok(join(u, l, f.length));
        };

        // Potential term moves to the right-hand side: x = P⁻¹(rhs - iαV̂x).
        let (mut xu, mut xl) = split(f);
        let weight = f.weight();
        let mut residual = f64::INFINITY;
        for _ in 0..self.icfg.max_iterations {
            let (mut wu, mut wl) = Self::apply_potential(&pot, &xu, &xl);
            self.grid.forward(&mut wu);
            self.grid.forward(&mut wl);
            for b in 0..n {
                wu[b] = rhs_u[b] - alpha * wu[b];
                wl[b] = rhs_l[b] - alpha * wl[b];
            }
            let (nu, nl) = solve(&wu, &wl);
            residual = (xu.iter().zip(&nu).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
                + xl.iter().zip(&nl).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>())
            .mul_add(weight, 0.0)
            .sqrt();
            xu = nu;
            xl = nl;
            if residual < self.icfg.tolerance {
                return Ok(join(xu, xl, f.length));
            }
        }
        Err(Error::SolveDiverged {
            iterations: self.icfg.max_iterations,
            residual,
        })
    }

    /// Advance several states in lockstep, handing every step to `observer`.
    pub fn integrate_many(
        &self,
        states: &[GridField],
        mut observer: impl FnMut(f64, &[GridField]),
    ) -> Result<Vec<GridField>> {
        let times = self.times();
        let mut current = states.to_vec();
        observer(times[0], &current);
        for w in times.windows(2) {
            let (a, b) = (w[0], w[1]);
            current = current
                .par_iter()
                .map(|f| self.step(f, 0.5 * (a + b), b - a))
                .collect::<Result<Vec<_>>>()?;
            observer(b, &current);
        }
        Ok(current)
    }

    pub fn integrate(&self, psi0: &GridField, recording: Recording) -> Result<Trajectory> {
        let mut times = Vec::new();
        let mut kept = Vec::new();
        let last = self.integrate_many(std::slice::from_ref(psi0), |t, s| {
            if recording == Recording::EveryStep {
                times.push(t);
                kept.push(s[0].clone());
            }
        })?;
        if recording == Recording::Endpoint {
            times = vec![*self.times().first().unwrap(), self.cfg.tf];
            kept = vec![psi0.clone(), last[0].clone()];
        }
        Ok(Trajectory {
            times,
            states: kept,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }
}

/// Endpoint of the oracle evolution from `t0` to `tf`.
pub fn integrate(
    psi0: &GridField,
    pulse: &GaugePulse,
    cfg: &SimConfig,
    icfg: IntegratorConfig,
) -> Result<GridField> {
    Ok(Integrator::new(pulse, cfg, icfg)?
        .integrate(psi0, Recording::Endpoint)?
        .last()
        .clone())
}

/// Streaming `max |∂ρ/∂t + ∂J/∂z|` over a sequence of snapshots.
///
/// Densities are summed over all states handed in at each time. The time
/// derivative is a centered difference; stencils centred on a breakpoint
/// (where the potential switches off) or with unequal spacing are skipped.
/// The spatial derivative is spectral.
#[derive(Debug, Clone)]
pub struct ContinuityMonitor {
    grid: SpectralGrid,
    charge: f64,
    breakpoints: Vec<f64>,
    history: Vec<(f64, Vec<f64>, Vec<f64>)>,
    max_residual: f64,
    stencils: usize,
}

impl ContinuityMonitor {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            grid: SpectralGrid::new(cfg),
            charge: cfg.charge,
            breakpoints: vec![cfg.t1],
            history: Vec::with_capacity(3),
            max_residual: 0.0,
            stencils: 0,
        }
    }

    pub fn observe(&mut self, t: f64, states: &[GridField]) {
        let n = self.grid.grid_points();
        let mut rho = vec![0.0; n];
        let mut current = vec![0.0; n];
        for s in states {
            let d = charge_current_density(s, self.charge);
            rho.iter_mut().zip(&d.rho).for_each(|(a, b)| *a += b);
            current.iter_mut().zip(&d.current).for_each(|(a, b)| *a += b);
        }
        if self.history.len() == 3 {
            self.history.remove(0);
        }
        self.history.push((t, rho, current));
        if self.history.len() == 3 {
            self.check();
        }
    }

    fn check(&mut self) {
        let (ta, ra, _) = &self.history[0];
        let (tb, _, jb) = &self.history[1];
        let (tc, rc, _) = &self.history[2];
        let (h1, h2) = (tb - ta, tc - tb);
        let scale = h1.abs().max(h2.abs());
        if (h1 - h2).abs() > 1e-9 * scale
            || self.breakpoints.iter().any(|bp| (tb - bp).abs() < 1e-9 * scale)
        {
            return;
        }
        let dj = self.grid.derivative_real(jb);
        let worst = ra
            .iter()
            .zip(rc)
            .zip(&dj)
            .map(|((a, c), d)| ((c - a) / (h1 + h2) + d).abs())
            .fold(0.0, f64::max);
        self.max_residual = self.max_residual.max(worst);
        self.stencils += 1;
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Number of stencils evaluated.
    pub fn stencils(&self) -> usize {
        self.stencils
    }
}

/// `max_{z,t} |∂ρ/∂t + ∂J/∂z|` along a recorded trajectory.
pub fn continuity_residual(traj: &Trajectory, cfg: &SimConfig) -> f64 {
    let mut monitor = ContinuityMonitor::new(cfg);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        monitor.observe(*t, std::slice::from_ref(s));
    }
    monitor.max_residual()
}

/// Continuity residual of the summed densities of co-evolved states, computed
/// without storing the trajectory.
pub fn summed_continuity_residual(
    states: &[GridField],
    pulse: &GaugePulse,
    cfg: &SimConfig,
    icfg: IntegratorConfig,
) -> Result<f64> {
    let integrator = Integrator::new(pulse, cfg, icfg)?;
    let mut monitor = ContinuityMonitor::new(cfg);
    integrator.integrate_many(states, |t, s| monitor.observe(t, s))?;
    Ok(monitor.max_residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::ExactPropagator;
    use crate::spectral::{EnergySign, InnerProduct, ModeExpansion};

    fn cfg() -> SimConfig {
        SimConfig {
            cutoff: 8,
            grid_points: 128,
            ..Default::default()
        }
    }

    fn packet(c: &SimConfig) -> ModeExpansion {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut x = ModeExpansion::zeros(c.cutoff);
        x.set(EnergySign::Positive, 1, h).unwrap();
        x.set(EnergySign::Positive, 0, h).unwrap();
        x
    }

    #[test]
    fn times_hit_t1() {
        let c = cfg();
        let it = Integrator::new(&GaugePulse::zero(&c), &c, IntegratorConfig::new(0.05)).unwrap();
        let t = it.times();
        assert!(t.contains(&c.t1));
        assert_eq!(*t.last().unwrap(), c.tf);
        assert_eq!(t.len(), 41);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let c = cfg();
        let p = GaugePulse::zero(&c);
        assert!(matches!(
            Integrator::new(&p, &c, IntegratorConfig::new(0.1)),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(matches!(
            Integrator::new(&p, &c, IntegratorConfig::new(-1.0)),
            Err(Error::InvalidConfig { key: "integrator.dt", .. })
        ));
    }

    #[test]
    fn free_mode_error_is_second_order() {
        let c = cfg();
        let grid = SpectralGrid::new(&c);
        let mut x = ModeExpansion::zeros(c.cutoff);
        x.set(EnergySign::Negative, 3, Complex64::new(1.0, 0.0)).unwrap();
        let psi0 = grid.synthesize(&x, c.t0).unwrap();
        let exact = grid.synthesize(&x, c.tf).unwrap();
        let p = GaugePulse::zero(&c);
        let err = |dt: f64| {
            integrate(&psi0, &p, &c, IntegratorConfig::new(dt))
                .unwrap()
                .l2_distance(&exact)
                .unwrap()
        };
        let (e1, e2) = (err(0.01), err(0.005));
        assert!((e1 / e2 - 4.0).abs() < 0.05, "{e1} {e2}");
    }

    #[test]
    fn pulsed_packet_matches_exact_propagator() {
        let c = cfg();
        let pulse = GaugePulse::single_harmonic(1, 0.5, 0.0, &c).unwrap();
        let x0 = packet(&c);
        let grid = SpectralGrid::new(&c);
        let psi0 = grid.synthesize(&x0, c.t0).unwrap();
        let exact = ExactPropagator::new(&pulse, &c).unwrap().final_state(&x0).unwrap();
        let exact = SpectralGrid::new(&c).synthesize(&exact.state, 0.0).unwrap();
        let err = |n: f64| {
            let out = integrate(&psi0, &pulse, &c, IntegratorConfig::new((c.t1 - c.t0) / n)).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
            out.l2_distance(&exact).unwrap()
        };
        let (e1, e2) = (err(400.0), err(800.0));
        assert!(e2 < 1e-5, "{e2}");
        assert!((e1 / e2 - 4.0).abs() < 0.5, "{e1} {e2}");
    }

    #[test]
    fn continuity_residuals() {
        let c = cfg();
        let grid = SpectralGrid::new(&c);
        let mut x = ModeExpansion::zeros(c.cutoff);
        x.set(EnergySign::Positive, 2, Complex64::new(1.0, 0.0)).unwrap();
        let free = grid.synthesize(&x, c.t0).unwrap();
        let zero = GaugePulse::zero(&c);
        let it = Integrator::new(&zero, &c, IntegratorConfig::new(0.01)).unwrap();
        let traj = it.integrate(&free, Recording::EveryStep).unwrap();
        assert!(continuity_residual(&traj, &c) < 1e-12);

        let pulse = GaugePulse::single_harmonic(1, 0.5, 0.2, &c).unwrap();
        let psi0 = grid.synthesize(&packet(&c), c.t0).unwrap();
        let res = |dt: f64| {
            let it = Integrator::new(&pulse, &c, IntegratorConfig::new(dt)).unwrap();
            continuity_residual(&it.integrate(&psi0, Recording::EveryStep).unwrap(), &c)
        };
        let (r1, r2) = (res(0.004), res(0.002));
        assert!((r1 / r2 - 4.0).abs() < 0.5, "{r1} {r2}");
    }
}
