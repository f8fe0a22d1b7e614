//! Optimization loops under a measurement-shot budget.
//!
//! Every optimizer is a function of a [`RunContext`] (problem, calibrated
//! single-shot variance, budget, simulated noise model), an
//! [`OptimizerConfig`], an initial point and a random stream. A step is
//! taken only if its full cost fits in the remaining budget, so runs never
//! overshoot. Shot counts are per operator group.

mod adam;
mod config;
mod kappa;
mod sgd;
mod smo;
mod trig;

pub use adam::{adam_update, AdamParams, AdamState};
pub use config::{KappaParams, Method, OptimizerConfig};
pub use kappa::{kappa_update, KappaSchedule};
pub use sgd::{gradcore_select, run_bayes_sgd, run_gradcore, run_sgd_psr, sweep_points, Selection};
pub use smo::{run_bayes_nft, run_nft, smo_offsets};
pub use trig::{argmin_1d_trig, fit_1d_trig, TrigCoeffs};

use rand::Rng;

use crate::error::OptError;
use crate::gp::Dataset;
use crate::simulator::{NoiseMode, VqeProblem};

/// Everything a run needs besides the optimizer settings.
#[derive(Debug, Clone, Copy)]
pub struct RunContext<'a> {
    pub problem: &'a VqeProblem,
    /// Calibrated single-shot variance; observations report `sigma_bar_sq / n`.
    pub sigma_bar_sq: f64,
    pub budget: u64,
    pub noise_mode: NoiseMode,
}

impl RunContext<'_> {
    fn measure<R: Rng + ?Sized>(&self, x: &[f64], shots: u64, rng: &mut R) -> Result<(f64, f64), OptError> {
        let o = self
            .problem
            .observe(x, shots, self.noise_mode, self.sigma_bar_sq, rng)?;
        Ok((o.value, o.reported_var))
    }
}

/// Diagnostics of one optimizer step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: usize,
    pub cumulative_shots: u64,
    pub shots: u64,
    /// Current optimum after the step.
    pub x_hat: Vec<f64>,
    /// Gradient estimate the step followed, for SGD methods.
    pub grad: Option<Vec<f64>>,
    /// Per-axis thresholds used to select this step's measurements.
    pub kappa_sq: Option<Vec<f64>>,
    /// Per-axis derivative posterior variance at the pre-step optimum, after
    /// conditioning on this step's measurements.
    pub grad_var: Option<Vec<f64>>,
    /// Set when shot selection could not meet the threshold on some axis.
    pub constraint_miss: bool,
    /// GP training-set size after the step.
    pub training_size: usize,
}

/// Optimizer state at the end of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialState {
    pub x_hat: Vec<f64>,
    pub adam: Option<AdamState>,
    pub cumulative_shots: u64,
    pub step: usize,
    /// Final GP training set, for GP-based methods.
    pub dataset: Option<Dataset>,
    pub history: Vec<StepRecord>,
}

impl TrialState {
    fn new(x0: &[f64]) -> Self {
        Self {
            x_hat: x0.iter().map(|&v| crate::wrap_angle(v)).collect(),
            adam: None,
            cumulative_shots: 0,
            step: 0,
            dataset: None,
            history: Vec::new(),
        }
    }

    fn affordable(&self, cost: u64, ctx: &RunContext, cfg: &OptimizerConfig) -> bool {
        let under_cap = cfg.max_steps.is_none_or(|m| self.step < m);
        under_cap && self.cumulative_shots.saturating_add(cost) <= ctx.budget
    }

    fn record(&mut self, shots: u64, extra: StepExtra) {
        self.step += 1;
        self.cumulative_shots += shots;
        self.history.push(StepRecord {
            step: self.step,
            cumulative_shots: self.cumulative_shots,
            shots,
            x_hat: self.x_hat.clone(),
            grad: extra.grad,
            kappa_sq: extra.kappa_sq,
            grad_var: extra.grad_var,
            constraint_miss: extra.miss,
            training_size: extra.training_size,
        });
    }
}

#[derive(Default)]
struct StepExtra {
    grad: Option<Vec<f64>>,
    kappa_sq: Option<Vec<f64>>,
    grad_var: Option<Vec<f64>>,
    miss: bool,
    training_size: usize,
}

fn check_start(ctx: &RunContext, cfg: &OptimizerConfig, x0: &[f64]) -> Result<(), OptError> {
    let dim = ctx.problem.n_params();
    if x0.len() != dim {
        return Err(OptError::Config(format!(
            "initial point has {} parameters, circuit has {dim}",
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OptError::Config("initial point must be finite".into()));
    }
    if ctx.budget == 0 {
        return Err(OptError::Config("budget must be positive".into()));
    }
    cfg.validate(ctx.problem.multiplicities(), ctx.sigma_bar_sq)
}

/// Runs `cfg.method` from `x0`.
pub fn run_method<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    match cfg.method {
        Method::SgdPsr => run_sgd_psr(ctx, cfg, x0, rng),
        Method::BayesSgd => run_bayes_sgd(ctx, cfg, x0, rng),
        Method::Gradcore => run_gradcore(ctx, cfg, x0, rng),
        Method::Nft => run_nft(ctx, cfg, x0, rng),
        Method::BayesNft => run_bayes_nft(ctx, cfg, x0, rng),
    }
}
