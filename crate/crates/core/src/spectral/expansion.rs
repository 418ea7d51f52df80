use num_complex::Complex64;

use super::{EnergySign, InnerProduct};
use crate::{Error, Result};

/// Amplitudes `c_{λ,r}` of a state over the free modes `|r| <= cutoff`.
///
/// Coefficients multiply the stationary mode functions `u_{λ,r} e^{i p_r z}`;
/// time dependence lives in the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeExpansion {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl ModeExpansion {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * (2 * cutoff + 1)],
        }
    }

    pub fn from_fn(cutoff: usize, mut f: impl FnMut(EnergySign, i64) -> Complex64) -> Self {
        let mut x = Self::zeros(cutoff);
        let c = cutoff as i64;
        for sign in EnergySign::BOTH {
            for r in -c..=c {
                let idx = x.index(sign, r).unwrap();
                x.coeffs[idx] = f(sign, r);
            }
        }
        x
    }

    /// The single free mode `(sign, r)` with unit amplitude.
    pub fn basis_state(sign: EnergySign, r: i64, cutoff: usize) -> Result<Self> {
        let mut x = Self::zeros(cutoff);
        x.set(sign, r, Complex64::new(1.0, 0.0))?;
        Ok(x)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn index(&self, sign: EnergySign, r: i64) -> Option<usize> {
        let c = self.cutoff as i64;
        if r < -c || r > c {
            return None;
        }
        let offset = match sign {
            EnergySign::Positive => 0,
            EnergySign::Negative => 2 * self.cutoff + 1,
        };
        Some(offset + (r + c) as usize)
    }

    /// Amplitude of `(sign, r)`; zero outside the band.
    pub fn get(&self, sign: EnergySign, r: i64) -> Complex64 {
        self.index(sign, r)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, sign: EnergySign, r: i64, value: Complex64) -> Result<()> {
        let idx = self.index(sign, r).ok_or(Error::ModeOutOfRange {
            r,
            cutoff: self.cutoff,
        })?;
        self.coeffs[idx] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (EnergySign, i64, Complex64)> + '_ {
        let width = 2 * self.cutoff + 1;
        let c = self.cutoff as i64;
        self.coeffs.iter().enumerate().map(move |(i, &v)| {
            let sign = if i < width {
                EnergySign::Positive
            } else {
                EnergySign::Negative
            };
            (sign, (i % width) as i64 - c, v)
        })
    }

    /// Map every coefficient through `f(sign, r, c)`.
    pub fn map(&self, mut f: impl FnMut(EnergySign, i64, Complex64) -> Complex64) -> Self {
        let coeffs = self.iter().map(|(s, r, v)| f(s, r, v)).collect();
        Self {
            cutoff: self.cutoff,
            coeffs,
        }
    }

    /// Embed into a wider band. Shrinking is refused; use a projection for that.
    pub fn widen(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff {
            return Err(Error::SizeMismatch {
                left: self.cutoff,
                right: cutoff,
            });
        }
        let mut out = Self::zeros(cutoff);
        for (s, r, v) in self.iter() {
            out.set(s, r, v)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map(|_, _, v| v * factor)
    }

    /// `self + other`, both in the same band.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_band(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            cutoff: self.cutoff,
            coeffs,
        })
    }

    /// Largest coefficient difference between two states on a common band.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let band = self.cutoff.max(other.cutoff) as i64;
        let mut worst: f64 = 0.0;
        for sign in EnergySign::BOTH {
            for r in -band..=band {
                worst = worst.max((self.get(sign, r) - other.get(sign, r)).norm());
            }
        }
        worst
    }

    fn check_band(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::SizeMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }
}

impl InnerProduct for ModeExpansion {
    fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_band(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_states_are_orthonormal() {
        let c = 3;
        let mut states = Vec::new();
        for sign in EnergySign::BOTH {
            for r in -3..=3 {
                states.push(ModeExpansion::basis_state(sign, r, c).unwrap());
            }
        }
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn iteration_round_trips_indices() {
        let x = ModeExpansion::from_fn(2, |s, r| Complex64::new(s.value(), r as f64));
        for (s, r, v) in x.iter() {
            assert_eq!(v, Complex64::new(s.value(), r as f64));
            assert_eq!(x.get(s, r), v);
        }
        assert_eq!(x.get(EnergySign::Positive, 3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn band_mismatch_is_an_error() {
        let a = ModeExpansion::zeros(2);
        let b = ModeExpansion::zeros(3);
        assert!(matches!(a.inner(&b), Err(Error::SizeMismatch { .. })));
        assert!(b.widen(2).is_err());
        let w = a.widen(3).unwrap();
        assert!(w.inner(&b).is_ok());
    }

    #[test]
    fn set_outside_band_fails() {
        let mut a = ModeExpansion::zeros(1);
        assert!(a.set(EnergySign::Negative, 2, Complex64::new(1.0, 0.0)).is_err());
    }
}
