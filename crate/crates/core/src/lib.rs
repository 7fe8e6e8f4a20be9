//! Numerical laboratory for the non-Hermitian Haldane model with
//! inhomogeneous on-site dissipation.
//!
//! * [`lattice`] builds honeycomb geometries, Haldane operators and dissipation profiles.
//! * [`spectra`] diagonalizes operators and analyses chiral edge states.
//! * [`continuum`] holds the exact chiral-mode theory on a closed loop.
//! * [`hatano_nelson`] is the effective non-reciprocal chain.
//! * [`topology`] computes Chern numbers and the edge velocity.
//! * [`circuit`] is the electrical realization and its reduction to the lattice model.
//! * [`scenarios`] chains them into the standard numerical experiments.

pub mod circuit;
pub mod continuum;
mod error;
pub mod hatano_nelson;
pub mod lattice;
pub mod scenarios;
pub mod spectra;
pub mod topology;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
