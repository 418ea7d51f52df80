use num_complex::Complex64;

use super::{SimConfig, Spinor};
use crate::{Error, Result};

/// Sign `λ` of a free solution's energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub const BOTH: [EnergySign; 2] = [EnergySign::Positive, EnergySign::Negative];

    pub fn value(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }

    pub fn from_value(lambda: i32) -> Option<Self> {
        match lambda {
            1 => Some(EnergySign::Positive),
            -1 => Some(EnergySign::Negative),
            _ => None,
        }
    }
}

/// One free solution `u_{λ,r} e^{-i(λE_r t - p_r z)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveMode {
    pub r: i64,
    pub sign: EnergySign,
    pub momentum: f64,
    /// Positive energy `E_r`; the eigenvalue is [`signed_energy`](Self::signed_energy).
    pub energy: f64,
    pub spinor: [f64; 2],
}

impl PlaneWaveMode {
    pub fn signed_energy(&self) -> f64 {
        self.sign.value() * self.energy
    }

    /// Normalization constant `N_{λ,r}` multiplying the upper component.
    pub fn normalization(&self) -> f64 {
        self.spinor[0]
    }

    /// Mode function at `(z, t)`.
    pub fn value_at(&self, z: f64, t: f64) -> Spinor {
        let phase = Complex64::from_polar(1.0, self.momentum * z - self.signed_energy() * t);
        [phase * self.spinor[0], phase * self.spinor[1]]
    }
}

/// Spinor amplitude of the free solution with momentum `p` and energy sign
/// `sign`, normalized so that `L u†u = 1`.
///
/// The positive branch is `N (1, p/(E+m))` with `N = sqrt((E+m)/(2LE))`. The
/// negative branch is the same expression with `λ = -1`, rewritten to avoid
/// the cancellation in `E - m` at small `|p|`; at `p = 0` it takes the limit
/// value `(0, 1)/sqrt(L)`.
pub fn spinor(momentum: f64, sign: EnergySign, mass: f64, length: f64) -> [f64; 2] {
    let e = momentum.hypot(mass);
    match sign {
        EnergySign::Positive => {
            let n = ((e + mass) / (2.0 * length * e)).sqrt();
            [n, n * momentum / (e + mass)]
        }
        EnergySign::Negative => {
            if momentum == 0.0 {
                [0.0, 1.0 / length.sqrt()]
            } else {
                let upper = momentum.abs() / (2.0 * length * e * (e + mass)).sqrt();
                let lower = -momentum.signum() * ((e + mass) / (2.0 * length * e)).sqrt();
                [upper, lower]
            }
        }
    }
}

/// Free mode `(λ, r)` for `|r| <= cfg.cutoff`.
pub fn make_mode(r: i64, sign: EnergySign, cfg: &SimConfig) -> Result<PlaneWaveMode> {
    if r.unsigned_abs() as usize > cfg.cutoff {
        return Err(Error::ModeOutOfRange {
            r,
            cutoff: cfg.cutoff,
        });
    }
    Ok(mode_unchecked(r, sign, cfg))
}

pub(crate) fn mode_unchecked(r: i64, sign: EnergySign, cfg: &SimConfig) -> PlaneWaveMode {
    let momentum = cfg.momentum(r);
    PlaneWaveMode {
        r,
        sign,
        momentum,
        energy: cfg.energy(r),
        spinor: spinor(momentum, sign, cfg.mass, cfg.length),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn rest_mode_positive() {
        let m = make_mode(0, EnergySign::Positive, &cfg()).unwrap();
        assert_eq!(m.momentum, 0.0);
        assert_eq!(m.energy, 1.0);
        assert!((m.spinor[0] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(m.spinor[1], 0.0);
    }

    #[test]
    fn rest_mode_negative_uses_limit() {
        let m = make_mode(0, EnergySign::Negative, &cfg()).unwrap();
        assert_eq!(m.signed_energy(), -1.0);
        assert_eq!(m.spinor[0], 0.0);
        assert!((m.spinor[1] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn negative_branch_limit_is_continuous_in_magnitude() {
        // As p -> 0+ the stable form tends to (0, -1)/sqrt(L), which is the
        // chosen limit up to a sign; both components converge.
        let c = cfg();
        for &p in &[1e-3, 1e-6, 1e-9] {
            let u = spinor(p, EnergySign::Negative, c.mass, c.length);
            assert!(u[0].abs() < p);
            assert!((u[1].abs() - 1.0 / c.length.sqrt()).abs() < p);
        }
    }

    #[test]
    fn negative_branch_matches_textbook_form_away_from_zero() {
        let c = cfg();
        for r in 1..5 {
            for &p in &[c.momentum(r), -c.momentum(r)] {
                let e = p.hypot(c.mass);
                let lam_e = -e;
                let n = ((lam_e + c.mass) / (2.0 * c.length * lam_e)).sqrt();
                let direct = [n, n * p / (lam_e + c.mass)];
                let u = spinor(p, EnergySign::Negative, c.mass, c.length);
                assert!((u[0] - direct[0]).abs() < 1e-14);
                assert!((u[1] - direct[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn first_excited_mode() {
        let m = make_mode(1, EnergySign::Positive, &cfg()).unwrap();
        assert!((m.momentum - 1.0).abs() < 1e-15);
        assert!((m.energy - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spinors_are_unit_norm_and_eigenvectors() {
        let c = cfg();
        for r in -5..=5 {
            for sign in EnergySign::BOTH {
                let m = make_mode(r, sign, &c).unwrap();
                let [a, b] = m.spinor;
                assert!((c.length * (a * a + b * b) - 1.0).abs() < 1e-14);
                // H0(p) = [[m, p], [p, -m]]
                let ha = c.mass * a + m.momentum * b;
                let hb = m.momentum * a - c.mass * b;
                assert!((ha - m.signed_energy() * a).abs() < 1e-14);
                assert!((hb - m.signed_energy() * b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn out_of_range_mode_is_rejected() {
        let c = cfg();
        assert_eq!(
            make_mode(33, EnergySign::Positive, &c),
            Err(Error::ModeOutOfRange { r: 33, cutoff: 32 })
        );
        assert!(make_mode(-32, EnergySign::Negative, &c).is_ok());
    }
}
