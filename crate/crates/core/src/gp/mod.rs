//! Gaussian-process regression with the VQE kernel.
//!
//! Training and test outputs may be function values or first partial
//! derivatives; every kernel entry is dispatched on the pair of output tags.
//! Noise is heteroscedastic (one variance per observation). Linear solves use
//! a Cholesky factor with jitter escalation from `1e-12 sigma0^2` up to
//! `1e-6 sigma0^2`.

mod cholesky;
mod dataset;
mod kernel;
mod model;

pub use dataset::{Dataset, Observation};
pub use kernel::{
    kernel_deriv_both, kernel_deriv_cross, prior_derivative_variance, tagged_kernel, vqe_kernel,
    KernelParams, OutputTag,
};
pub use model::{
    grad_posterior, posterior, retain_window, GpModel, GpPosterior, Query, RetentionPolicy,
    NOISE_FLOOR,
};
