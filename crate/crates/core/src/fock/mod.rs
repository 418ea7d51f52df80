//! Truncated second-quantized Dirac field.
//!
//! Electron modes `b_r` and positron modes `d_r`, `|r| <= R_F`, span an
//! occupation-number space; operators are sparse matrices with Jordan–Wigner
//! signs. The field expands as `ψ̂(z) = Σ_r (b_r φ_{+1,r}(z) + d_r† φ_{-1,r}(z))`.

mod basis;
mod operators;
mod schwinger;
mod sparse;

pub use basis::{FockBasis, FockMode, Ladder};
pub use operators::{
    annihilator, build_bilinear, build_charge, build_current, build_current_derivative, build_h0, build_rho,
    creator, energy_expectation, Bilinear,
};
pub use schwinger::{
    commutator_derivative_direct, commutator_derivative_with, continuity_violation_report, current_commutator_slope,
    pair_amplitudes, schwinger_closed_form, schwinger_direct, schwinger_sum, ContinuityReport,
    PairAmplitude,
};
pub use sparse::FockOperator;
