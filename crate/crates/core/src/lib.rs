//! Normal master modes, rapidities and steady states of boundary-driven
//! quadratic fermionic Lindbladians, including non-number-conserving XY and
//! Ising chains.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is a pure function of
//! immutable inputs.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod spectrum;
pub mod steady_state;
pub mod structure;

#[cfg(test)]
mod testutil;

pub use num_complex::Complex64;
