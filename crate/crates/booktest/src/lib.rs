//! Runs every Rust listing in `book/src` as a doc-test, so the guide cannot
//! drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/modes.md")]
pub mod modes {}

#[doc = include_str!("../../../book/src/gauge-pulse.md")]
pub mod gauge_pulse {}

#[doc = include_str!("../../../book/src/hole-theory.md")]
pub mod hole_theory {}

#[doc = include_str!("../../../book/src/fock-space.md")]
pub mod fock_space {}

#[doc = include_str!("../../../book/src/schwinger.md")]
pub mod schwinger {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
