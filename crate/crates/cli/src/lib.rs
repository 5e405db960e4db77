//! Library surface of the `levitsim` command line: scenario parsing,
//! runners and the manifest writer. The binary in `main.rs` is a thin
//! argument layer over these.

// Validation guards are written as `!(v > 0.0)` so NaN inputs are rejected
// along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod manifest;
pub mod runner;
pub mod scenario;
