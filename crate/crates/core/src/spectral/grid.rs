use num_complex::Complex64;

use super::{InnerProduct, SimConfig};
use crate::{Error, Result};

/// Two-component complex spinor.
pub type Spinor = [Complex64; 2];

/// A wavefunction sampled at `z_j = -L/2 + jL/N`, `j = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub samples: Vec<Spinor>,
    pub length: f64,
}

impl GridField {
    pub fn zeros(cfg: &SimConfig) -> Self {
        Self {
            samples: vec![[Complex64::new(0.0, 0.0); 2]; cfg.grid_points],
            length: cfg.length,
        }
    }

    pub fn from_fn(cfg: &SimConfig, mut f: impl FnMut(f64) -> Spinor) -> Self {
        Self {
            samples: (0..cfg.grid_points).map(|j| f(cfg.grid_point(j))).collect(),
            length: cfg.length,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Quadrature weight `L/N`.
    pub fn weight(&self) -> f64 {
        self.length / self.samples.len() as f64
    }

    /// `||self - other||_2` on the grid.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_size(other)?;
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr())
            .sum();
        Ok((s * self.weight()).sqrt())
    }

    pub(crate) fn check_size(&self, other: &Self) -> Result<()> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::SizeMismatch {
                left: self.samples.len(),
                right: other.samples.len(),
            });
        }
        Ok(())
    }
}

impl InnerProduct for GridField {
    fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_size(other)?;
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a[0].conj() * b[0] + a[1].conj() * b[1])
            .sum();
        Ok(s * self.weight())
    }

    fn norm_sqr(&self) -> f64 {
        let s: f64 = self
            .samples
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum();
        s * self.weight()
    }
}
