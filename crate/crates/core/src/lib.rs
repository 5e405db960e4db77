//! Simulation and design toolkit for levitated-nanoparticle optomechanics.
//!
//! The crate covers the center-of-mass physics of an optically trapped
//! dielectric sphere in vacuum: stochastic Brownian dynamics with velocity
//! feedback, linearized cavity sideband cooling, heating/decoherence budgets,
//! spin-phonon protocols for a trapped nanodiamond with an NV center, force
//! sensitivity estimates, and single-molecule collision statistics.
//!
//! All quantities are SI internally; angular frequencies are rad/s.
//!
//! With the `parallel` feature (enabled by default) ensemble simulations and
//! parameter sweeps distribute work over rayon; disabling it yields a
//! sequential build with identical results.

// Validation guards are written as `!(v > 0.0)` so NaN inputs are rejected
// along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod collision;
pub mod constants;
mod error;
pub mod exec;
pub mod langevin;
pub mod model;
pub mod noise;
mod ode;
pub mod rng;
pub mod sensing;
pub mod spinmech;
pub mod stats;

pub use error::{Error, Result};
