//! Free plane-wave modes on a periodic interval and the two representations of
//! a single-particle wavefunction built from them.
//!
//! A state is either a [`ModeExpansion`] (complex amplitudes over the free
//! solutions `u_{λ,r} e^{i p_r z}`, `|r| <= cutoff`) or a [`GridField`]
//! (two-component spinors sampled at `z_j = -L/2 + jL/N`). [`SpectralGrid`]
//! moves between them with FFTs and supplies the spectral derivative used by
//! every grid-side functional.

mod config;
mod expansion;
mod functionals;
mod grid;
mod mode;
mod transform;

pub use config::SimConfig;
pub use expansion::ModeExpansion;
pub use functionals::{
    charge_current_density, free_energy, full_energy, grid_free_energy, Densities,
    PotentialSamples,
};
pub use grid::{GridField, Spinor};
pub use mode::{make_mode, spinor, EnergySign, PlaneWaveMode};
pub(crate) use transform::{join, split};
pub use transform::{to_grid, to_modes, to_modes_in_band, Projection, SpectralGrid};

/// Inner product shared by both state representations.
pub trait InnerProduct {
    /// `<self, other>`, antilinear in `self`.
    fn inner(&self, other: &Self) -> crate::Result<num_complex::Complex64>;

    fn norm_sqr(&self) -> f64;

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Inner product of two states in the same representation.
pub fn inner_product<T: InnerProduct>(a: &T, b: &T) -> crate::Result<num_complex::Complex64> {
    a.inner(b)
}
