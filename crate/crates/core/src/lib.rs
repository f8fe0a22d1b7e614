//! Bayesian parameter shift rules for variational quantum eigensolvers.
//!
//! The crate is organized bottom-up:
//!
//! - [`simulator`]: statevector simulation of the ansatz, Pauli Hamiltonians,
//!   exact ground truth and Gaussian shot-noise readouts.
//! - [`gp`]: Gaussian-process regression with the VQE kernel, supporting
//!   value and first-derivative outputs on both the training and test side.
//! - [`psr`]: classical parameter shift rules and the closed-form Bayesian
//!   shift rules for equidistant designs.
//! - [`optimizers`]: SGD with shift rules, Bayes-SGD with observation reuse,
//!   SGD-GradCoRe with adaptive shot allocation, and the NFT / Bayes-NFT
//!   sequential minimal optimization baselines.
//! - [`harness`]: seeded multi-trial experiments, CSV records, percentile
//!   aggregation and SVG plots.
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gp;
pub mod harness;
pub mod optimizers;
pub mod psr;
pub mod simulator;

pub use error::{GpError, HarnessError, OptError, PsrError, SimError};

/// Reduces an angle into `[0, 2 pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}
