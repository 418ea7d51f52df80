use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::mode::spinor;
use super::{EnergySign, GridField, ModeExpansion, SimConfig, Spinor};
use crate::{Error, Result};

/// FFT plans and wavenumbers for one grid.
///
/// Mode `r` lives in FFT bin `r mod N`. Because the grid starts at `-L/2`
/// rather than 0, bin amplitudes pick up a factor `(-1)^r` relative to the
/// mode amplitudes.
#[derive(Clone)]
pub struct SpectralGrid {
    cfg: SimConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `i k` per bin, with the Nyquist bin zeroed.
    derivative_factor: Vec<Complex64>,
}

/// Result of projecting a grid field onto a mode band.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub modes: ModeExpansion,
    /// L2 norm of the discarded out-of-band content.
    pub leakage: f64,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("grid_points", &self.cfg.grid_points)
            .field("length", &self.cfg.length)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(cfg: &SimConfig) -> Self {
        let n = cfg.grid_points;
        let mut planner = FftPlanner::new();
        let derivative_factor = (0..n)
            .map(|bin| {
                let k = signed_bin(bin, n);
                if n.is_multiple_of(2) && bin == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, cfg.momentum(k))
                }
            })
            .collect();
        Self {
            cfg: *cfg,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            derivative_factor,
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn grid_points(&self) -> usize {
        self.cfg.grid_points
    }

    /// Momentum carried by FFT bin `bin` (Nyquist reported as zero).
    pub fn bin_momentum(&self, bin: usize) -> f64 {
        self.derivative_factor[bin].im
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Unnormalized inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
    }

    fn check_band(&self, band: usize) -> Result<()> {
        let n = self.cfg.grid_points;
        if 2 * band + 1 > n || (n.is_multiple_of(2) && band >= n / 2) {
            return Err(Error::BandTooWide {
                band,
                grid_points: n,
            });
        }
        Ok(())
    }

    /// `ψ(z_j) = Σ c_{λ,r} u_{λ,r} e^{-i(λE_r t - p_r z_j)}`.
    pub fn synthesize(&self, x: &ModeExpansion, t: f64) -> Result<GridField> {
        self.check_band(x.cutoff())?;
        let n = self.cfg.grid_points;
        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut lower = upper.clone();
        let c = x.cutoff() as i64;
        for r in -c..=c {
            let p = self.cfg.momentum(r);
            let e = self.cfg.energy(r);
            let mut a = [Complex64::new(0.0, 0.0); 2];
            for sign in EnergySign::BOTH {
                let coeff = x.get(sign, r);
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let u = spinor(p, sign, self.cfg.mass, self.cfg.length);
                let phased = coeff * Complex64::from_polar(1.0, -sign.value() * e * t);
                a[0] += phased * u[0];
                a[1] += phased * u[1];
            }
            let bin = bin_of(r, n);
            let parity = if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            upper[bin] = a[0] * parity;
            lower[bin] = a[1] * parity;
        }
        self.inverse(&mut upper);
        self.inverse(&mut lower);
        Ok(GridField {
            samples: upper.into_iter().zip(lower).map(|(a, b)| [a, b]).collect(),
            length: self.cfg.length,
        })
    }

    /// Project onto modes `|r| <= band`, reporting what falls outside.
    pub fn analyze(&self, f: &GridField, band: usize) -> Result<Projection> {
        self.check_band(band)?;
        let n = self.cfg.grid_points;
        if f.len() != n {
            return Err(Error::SizeMismatch {
                left: f.len(),
                right: n,
            });
        }
        let (mut upper, mut lower) = split(f);
        self.forward(&mut upper);
        self.forward(&mut lower);
        let scale = 1.0 / n as f64;
        let mut modes = ModeExpansion::zeros(band);
        let c = band as i64;
        let mut kept = vec![false; n];
        for r in -c..=c {
            let bin = bin_of(r, n);
            kept[bin] = true;
            let parity = if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let a = [upper[bin] * scale * parity, lower[bin] * scale * parity];
            let p = self.cfg.momentum(r);
            for sign in EnergySign::BOTH {
                let u = spinor(p, sign, self.cfg.mass, self.cfg.length);
                let c = (a[0] * u[0] + a[1] * u[1]) * self.cfg.length;
                modes.set(sign, r, c)?;
            }
        }
        let discarded: f64 = (0..n)
            .filter(|&b| !kept[b])
            .map(|b| (upper[b].norm_sqr() + lower[b].norm_sqr()) * scale * scale)
            .sum();
        Ok(Projection {
            modes,
            leakage: (discarded * self.cfg.length).sqrt(),
        })
    }

    /// Spectral derivative of complex samples.
    pub fn derivative(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let n = samples.len();
        let mut data = samples.to_vec();
        self.forward(&mut data);
        let scale = 1.0 / n as f64;
        for (d, k) in data.iter_mut().zip(&self.derivative_factor) {
            *d *= k * scale;
        }
        self.inverse(&mut data);
        data
    }

    /// Spectral derivative of real samples.
    pub fn derivative_real(&self, samples: &[f64]) -> Vec<f64> {
        let data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.derivative(&data).into_iter().map(|c| c.re).collect()
    }

    /// Grid application of `H0 = -iσ_x ∂_z + mσ_z`.
    pub fn apply_free_hamiltonian(&self, f: &GridField) -> GridField {
        let (upper, lower) = split(f);
        let du = self.derivative(&upper);
        let dl = self.derivative(&lower);
        let m = self.cfg.mass;
        let minus_i = Complex64::new(0.0, -1.0);
        let samples = (0..f.len())
            .map(|j| {
                [
                    minus_i * dl[j] + m * upper[j],
                    minus_i * du[j] - m * lower[j],
                ]
            })
            .collect();
        GridField {
            samples,
            length: f.length,
        }
    }
}

pub(crate) fn split(f: &GridField) -> (Vec<Complex64>, Vec<Complex64>) {
    f.samples.iter().map(|s| (s[0], s[1])).unzip()
}

pub(crate) fn join(upper: Vec<Complex64>, lower: Vec<Complex64>, length: f64) -> GridField {
    GridField {
        samples: upper
            .into_iter()
            .zip(lower)
            .map(|(a, b)| -> Spinor { [a, b] })
            .collect(),
        length,
    }
}

fn bin_of(r: i64, n: usize) -> usize {
    r.rem_euclid(n as i64) as usize
}

fn signed_bin(bin: usize, n: usize) -> i64 {
    if bin <= n / 2 {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

/// Synthesize `x` on the grid of `cfg`, free-evolved by time `t`.
pub fn to_grid(x: &ModeExpansion, cfg: &SimConfig, t: f64) -> Result<GridField> {
    SpectralGrid::new(cfg).synthesize(x, t)
}

/// Project onto the retained band `|r| <= cfg.cutoff`.
pub fn to_modes(f: &GridField, cfg: &SimConfig) -> Result<Projection> {
    to_modes_in_band(f, cfg, cfg.cutoff)
}

pub fn to_modes_in_band(f: &GridField, cfg: &SimConfig, band: usize) -> Result<Projection> {
    SpectralGrid::new(cfg).analyze(f, band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_mode, InnerProduct};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> SimConfig {
        SimConfig {
            cutoff: 6,
            grid_points: 64,
            ..Default::default()
        }
    }

    fn random_state(cutoff: usize, seed: u64) -> ModeExpansion {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ModeExpansion::from_fn(cutoff, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let n = x.norm();
        x.scaled(Complex64::new(1.0 / n, 0.0))
    }

    #[test]
    fn synthesis_matches_pointwise_mode_functions() {
        let cfg = small();
        let mode = make_mode(2, EnergySign::Negative, &cfg).unwrap();
        let x = ModeExpansion::basis_state(EnergySign::Negative, 2, cfg.cutoff).unwrap();
        let g = to_grid(&x, &cfg, 0.3).unwrap();
        for (j, s) in g.samples.iter().enumerate() {
            let expected = mode.value_at(cfg.grid_point(j), 0.3);
            assert!((s[0] - expected[0]).norm() < 1e-13);
            assert!((s[1] - expected[1]).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_projects_to_itself() {
        let cfg = small();
        let x = ModeExpansion::basis_state(EnergySign::Positive, -3, cfg.cutoff).unwrap();
        let p = to_modes(&to_grid(&x, &cfg, 0.0).unwrap(), &cfg).unwrap();
        assert!(p.modes.max_abs_diff(&x) < 1e-13);
        assert!(p.leakage < 1e-13);
    }

    #[test]
    fn round_trip_is_identity_on_band_limited_states() {
        let cfg = small();
        let x = random_state(cfg.cutoff, 7);
        let p = to_modes(&to_grid(&x, &cfg, 0.0).unwrap(), &cfg).unwrap();
        assert!(p.modes.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn grid_orthonormality_of_all_retained_modes() {
        let cfg = small();
        let grid = SpectralGrid::new(&cfg);
        let mut fields = Vec::new();
        for sign in EnergySign::BOTH {
            for r in cfg.modes() {
                let x = ModeExpansion::basis_state(sign, r, cfg.cutoff).unwrap();
                fields.push(grid.synthesize(&x, 0.0).unwrap());
            }
        }
        for (i, a) in fields.iter().enumerate() {
            for (j, b) in fields.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - d).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn mode_and_grid_inner_products_agree() {
        let cfg = small();
        let a = random_state(cfg.cutoff, 1);
        let b = random_state(cfg.cutoff, 2);
        let ga = to_grid(&a, &cfg, 0.0).unwrap();
        let gb = to_grid(&b, &cfg, 0.0).unwrap();
        let mode_ip = a.inner(&b).unwrap();
        let grid_ip = ga.inner(&gb).unwrap();
        assert!((mode_ip - grid_ip).norm() < 1e-10);
        assert!((ga.norm_sqr() - a.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn eigen_relation_on_grid() {
        let cfg = small();
        let grid = SpectralGrid::new(&cfg);
        for sign in EnergySign::BOTH {
            for r in cfg.modes() {
                let x = ModeExpansion::basis_state(sign, r, cfg.cutoff).unwrap();
                let g = grid.synthesize(&x, 0.0).unwrap();
                let h = grid.apply_free_hamiltonian(&g);
                let eps = sign.value() * cfg.energy(r);
                for (hs, gs) in h.samples.iter().zip(&g.samples) {
                    assert!((hs[0] - eps * gs[0]).norm() < 1e-9);
                    assert!((hs[1] - eps * gs[1]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn phase_multiplied_edge_mode_leaks() {
        let cfg = small();
        let grid = SpectralGrid::new(&cfg);
        let x = ModeExpansion::basis_state(EnergySign::Positive, 6, cfg.cutoff).unwrap();
        let mut g = grid.synthesize(&x, 0.0).unwrap();
        for (j, s) in g.samples.iter_mut().enumerate() {
            let phase = Complex64::from_polar(1.0, -0.05 * cfg.grid_point(j).sin());
            s[0] *= phase;
            s[1] *= phase;
        }
        let p = grid.analyze(&g, cfg.cutoff).unwrap();
        // Dominant leak is the r = 7 harmonic with amplitude ≈ J_1(0.05).
        let wide = grid.analyze(&g, 10).unwrap();
        let mut direct = 0.0;
        for sign in EnergySign::BOTH {
            for r in 7..=10 {
                direct += wide.modes.get(sign, r).norm_sqr();
            }
        }
        assert!(p.leakage > 1e-3);
        assert!((p.leakage - direct.sqrt()).abs() < 1e-12);
        assert!((p.modes.norm_sqr() + p.leakage * p.leakage - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bands_beyond_nyquist_are_rejected() {
        let cfg = small();
        let x = ModeExpansion::zeros(32);
        assert!(matches!(
            to_grid(&x, &cfg, 0.0),
            Err(Error::BandTooWide { .. })
        ));
        assert!(ModeExpansion::zeros(31).cutoff() < 32);
        to_grid(&ModeExpansion::zeros(31), &cfg, 0.0).unwrap();
    }

    #[test]
    fn derivative_of_sine() {
        let cfg = small();
        let grid = SpectralGrid::new(&cfg);
        let z = cfg.grid();
        let f: Vec<f64> = z.iter().map(|z| (3.0 * z).sin()).collect();
        let d = grid.derivative_real(&f);
        for (dz, z) in d.iter().zip(&z) {
            assert!((dz - 3.0 * (3.0 * z).cos()).abs() < 1e-12);
        }
    }
}
