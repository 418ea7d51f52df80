use thiserror::Error;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: `{key}` {reason}")]
    InvalidConfig { key: &'static str, reason: String },

    #[error("mode index r = {r} lies outside the cutoff |r| <= {cutoff}")]
    ModeOutOfRange { r: i64, cutoff: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("mode band {band} is not resolved by a grid of {grid_points} points")]
    BandTooWide { band: usize, grid_points: usize },

    #[error(
        "projection discarded out-of-band norm {leakage:e} (threshold {threshold:e}); \
         the grid is too coarse for this pulse strength"
    )]
    Leakage { leakage: f64, threshold: f64 },

    #[error("a two-mode packet needs distinct modes, got r = s = {0}")]
    DegeneratePacket(i64),

    #[error("state is not normalized: |psi|^2 = {0}")]
    NotNormalized(f64),

    #[error("the free current derivative vanishes identically; no gauge profile can lower the packet energy")]
    CurrentDerivativeVanishes,

    #[error("pulse harmonic {harmonic} exceeds the mode cutoff {cutoff}")]
    HarmonicOutOfRange { harmonic: usize, cutoff: usize },

    #[error("time step {dt} violates the stability bound: dt * rate = {product:.3} >= 0.5")]
    StepTooLarge { dt: f64, product: f64 },

    #[error("implicit solve did not converge after {iterations} iterations (update {residual:e})")]
    SolveDiverged { iterations: usize, residual: f64 },

    #[error("{0} fermion modes do not fit a 64-bit occupation pattern")]
    TooManyModes(usize),

    #[error("the Fock basis is capped at {cap} particles but {needed} are required")]
    ParticleCapTooSmall { cap: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
