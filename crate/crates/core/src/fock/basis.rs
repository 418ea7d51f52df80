use std::collections::HashMap;

use crate::{Error, Result};

/// Largest supported mode count; patterns are stored in a `u64`.
const MAX_MODES: usize = 63;

/// A single fermion mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FockMode {
    Electron(i64),
    Positron(i64),
}

/// Creation or annihilation of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(FockMode),
    Annihilate(FockMode),
}

/// Occupation-number basis over `b_r, d_r` with `|r| <= R_F`, optionally capped
/// at `P` particles in total.
///
/// Mode order: `b_{-R_F}..b_{R_F}` then `d_{-R_F}..d_{R_F}`; index `0` is
/// always the vacuum.
#[derive(Debug, Clone)]
pub struct FockBasis {
    cutoff: usize,
    cap: Option<usize>,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl FockBasis {
    pub fn new(cutoff: usize, cap: Option<usize>) -> Result<Self> {
        let modes = 2 * (2 * cutoff + 1);
        if modes > MAX_MODES {
            return Err(Error::TooManyModes(modes));
        }
        let top = cap.map_or(modes, |p| p.min(modes));
        let mut states = Vec::new();
        for k in 0..=top {
            push_combinations(modes, k, &mut states);
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            cutoff,
            cap,
            states,
            index,
        })
    }

    /// Every occupation pattern, no particle cap.
    pub fn full(cutoff: usize) -> Result<Self> {
        Self::new(cutoff, None)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn mode_count(&self) -> usize {
        2 * (2 * self.cutoff + 1)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let c = self.cutoff as i64;
        -c..=c
    }

    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, pattern: u64) -> Option<usize> {
        self.index.get(&pattern).copied()
    }

    pub fn particle_count(&self, i: usize) -> u32 {
        self.states[i].count_ones()
    }

    pub fn bit(&self, mode: FockMode) -> Result<u32> {
        let c = self.cutoff as i64;
        let (r, offset) = match mode {
            FockMode::Electron(r) => (r, 0),
            FockMode::Positron(r) => (r, 2 * c + 1),
        };
        if r.abs() > c {
            return Err(Error::ModeOutOfRange {
                r,
                cutoff: self.cutoff,
            });
        }
        Ok((offset + r + c) as u32)
    }

    /// Apply a ladder string (rightmost first) to a pattern.
    ///
    /// Returns `None` when the result vanishes; the sign is the Jordan–Wigner
    /// parity of the occupied modes below each acted-on bit.
    pub fn apply(&self, ops: &[Ladder], pattern: u64) -> Result<Option<(u64, f64)>> {
        let mut state = pattern;
        let mut sign = 1.0;
        for op in ops.iter().rev() {
            let (mode, create) = match *op {
                Ladder::Create(m) => (m, true),
                Ladder::Annihilate(m) => (m, false),
            };
            let bit = self.bit(mode)?;
            let mask = 1u64 << bit;
            if (state & mask != 0) == create {
                return Ok(None);
            }
            if (state & (mask - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            state ^= mask;
        }
        Ok(Some((state, sign)))
    }

    /// Basis vector for a pattern, or `None` when it is outside the cap.
    pub fn unit_vector(&self, pattern: u64) -> Option<Vec<num_complex::Complex64>> {
        let i = self.index_of(pattern)?;
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); self.dim()];
        v[i] = num_complex::Complex64::new(1.0, 0.0);
        Some(v)
    }
}

fn push_combinations(n: usize, k: usize, out: &mut Vec<u64>) {
    if k == 0 {
        out.push(0);
        return;
    }
    // Gosper's hack over n-bit words.
    let limit = 1u64 << n;
    let mut v = (1u64 << k) - 1;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        let w = (!t & t.wrapping_add(1)).wrapping_sub(1) >> (v.trailing_zeros() + 1);
        v = t.wrapping_add(1) | w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        assert_eq!(FockBasis::full(1).unwrap().dim(), 64);
        assert_eq!(FockBasis::full(2).unwrap().dim(), 1024);
        for (cutoff, cap) in [(1, 2), (4, 2), (3, 4)] {
            let n = 2 * (2 * cutoff + 1);
            let want: usize = (0..=cap).map(|k| binomial(n, k)).sum();
            assert_eq!(FockBasis::new(cutoff, Some(cap)).unwrap().dim(), want);
        }
        assert_eq!(FockBasis::full(16).unwrap_err(), Error::TooManyModes(66));
    }

    #[test]
    fn vacuum_first_and_patterns_unique() {
        let b = FockBasis::new(3, Some(3)).unwrap();
        assert_eq!(b.state(0), 0);
        for (i, &s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
            assert!(s.count_ones() <= 3);
        }
    }

    #[test]
    fn ladder_signs() {
        let b = FockBasis::full(1).unwrap();
        let e0 = FockMode::Electron(0);
        let d0 = FockMode::Positron(0);
        let (s, sign) = b
            .apply(&[Ladder::Create(e0), Ladder::Create(d0)], 0)
            .unwrap()
            .unwrap();
        assert_eq!(sign, 1.0);
        let (s2, sign2) = b
            .apply(&[Ladder::Create(d0), Ladder::Create(e0)], 0)
            .unwrap()
            .unwrap();
        assert_eq!((s, sign), (s2, -sign2));
        assert_eq!(b.apply(&[Ladder::Create(e0), Ladder::Create(e0)], 0).unwrap(), None);
        assert_eq!(b.apply(&[Ladder::Annihilate(e0)], 0).unwrap(), None);
        assert!(b.bit(FockMode::Positron(2)).is_err());
    }
}
