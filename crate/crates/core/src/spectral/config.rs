use std::f64::consts::PI;

use crate::{Error, Result};

/// Physical and numerical parameters shared by every computation.
///
/// `cutoff` is the mode cutoff `R` (modes `r = -R..=R`); `grid_points` is the
/// number `N` of periodic samples. The grid must oversample the retained band
/// by at least four so that products with a pulse profile stay resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mass: f64,
    pub charge: f64,
    pub length: f64,
    pub cutoff: usize,
    pub grid_points: usize,
    pub t0: f64,
    pub t1: f64,
    pub tf: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: 1.0,
            length: 2.0 * PI,
            cutoff: 32,
            grid_points: 1024,
            t0: 0.0,
            t1: 1.0,
            tf: 2.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason: &str| {
            Err(Error::InvalidConfig {
                key,
                reason: reason.to_string(),
            })
        };
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad("mass", "must be positive and finite");
        }
        if !self.charge.is_finite() {
            return bad("charge", "must be finite");
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad("length", "must be positive and finite");
        }
        if self.cutoff < 1 {
            return bad("cutoff", "must be at least 1");
        }
        if self.grid_points < 4 * (2 * self.cutoff + 1) {
            return Err(Error::InvalidConfig {
                key: "grid_points",
                reason: format!(
                    "must be at least 4(2R+1) = {} for cutoff R = {}",
                    4 * (2 * self.cutoff + 1),
                    self.cutoff
                ),
            });
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.tf.is_finite()) {
            return bad("t0", "times must be finite");
        }
        if self.t0 >= self.t1 {
            return bad("t1", "must be later than t0");
        }
        if self.t1 >= self.tf {
            return bad("tf", "must be later than t1");
        }
        Ok(())
    }

    /// `p_r = 2πr/L`.
    pub fn momentum(&self, r: i64) -> f64 {
        2.0 * PI * r as f64 / self.length
    }

    /// Positive branch energy `E_r = sqrt(p_r^2 + m^2)`.
    pub fn energy(&self, r: i64) -> f64 {
        self.momentum(r).hypot(self.mass)
    }

    pub fn grid_spacing(&self) -> f64 {
        self.length / self.grid_points as f64
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.grid_spacing()
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.grid_points).map(|j| self.grid_point(j)).collect()
    }

    /// Band used to hold states after a gauge phase has been applied.
    ///
    /// Retained modes only fill `|r| <= R`; the harmonics between `R` and
    /// `N/4` are head room for the spread caused by `e^{-iqχ}`. Anything that
    /// lands above `N/4` is reported as leakage.
    pub fn evolution_cutoff(&self) -> usize {
        (self.grid_points / 4).max(self.cutoff)
    }

    /// Mode indices `-R..=R`.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let c = self.cutoff as i64;
        -c..=c
    }

    /// Largest retained single-particle energy `E_R`.
    pub fn max_energy(&self) -> f64 {
        self.energy(self.cutoff as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn grid_oversampling_is_enforced() {
        let cfg = SimConfig {
            cutoff: 32,
            grid_points: 256,
            ..Default::default()
        };
        match cfg.validate() {
            Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "grid_points"),
            other => panic!("expected grid_points error, got {other:?}"),
        }
        let ok = SimConfig {
            cutoff: 31,
            grid_points: 252,
            ..Default::default()
        };
        ok.validate().unwrap();
    }

    #[test]
    fn time_ordering_names_the_offending_key() {
        let cfg = SimConfig {
            t1: 3.0,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(Error::InvalidConfig { key: "tf", .. })
        ));
        let cfg = SimConfig {
            t0: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(Error::InvalidConfig { key: "t1", .. })
        ));
        let cfg = SimConfig {
            mass: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(Error::InvalidConfig { key: "mass", .. })
        ));
    }

    #[test]
    fn momentum_and_energy() {
        let cfg = SimConfig::default();
        assert!((cfg.momentum(1) - 1.0).abs() < 1e-15);
        assert!((cfg.energy(1) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(cfg.energy(0), 1.0);
        assert_eq!(cfg.grid_point(0), -PI);
    }
}
