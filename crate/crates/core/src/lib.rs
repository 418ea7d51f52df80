//! Dirac hole theory against truncated Fock-space field theory in 1+1 dimensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] holds the periodic plane-wave basis, the grid representation
//!   of two-component spinors and the transforms between the two, plus the
//!   energy, charge and current functionals.
//! * [`evolution`] implements gauge-type pulses and their closed-form
//!   propagator.
//! * [`hole_theory`] does the filled-sea bookkeeping and the sweep that drives
//!   the system energy below the unperturbed vacuum.
//! * [`fock`] builds the second-quantised operators over an occupation-number
//!   basis and evaluates the Schwinger term.
//! * [`oracle`] is an independent Crank–Nicolson integrator used to check the
//!   closed-form propagator and the continuity equation.
//!
//! Units are natural (ħ = c = 1) throughout.

pub mod error;
pub mod evolution;
pub mod fock;
pub mod hole_theory;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{Envelope, GaugePulse};

pub use spectral::{EnergySign, GridField, ModeExpansion, PlaneWaveMode, SimConfig};
