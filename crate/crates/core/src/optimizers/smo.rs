//! NFT sequential minimal optimization and its GP variant.

use std::f64::consts::TAU;

use rand::Rng;

use super::trig::{argmin_1d_trig, fit_1d_trig};
use super::{check_start, OptimizerConfig, RunContext, StepExtra, TrialState};
use crate::error::OptError;
use crate::gp::{GpModel, Observation, Query, RetentionPolicy};
use crate::wrap_angle;

/// Offsets measured along an axis: `-+alpha` when `v = 1`, otherwise
/// `2 pi w / (2v + 1)` for `w = 1..=2v`.
pub fn smo_offsets(v: usize, alpha: f64) -> Vec<f64> {
    if v == 1 {
        return vec![-alpha, alpha];
    }
    (1..=2 * v).map(|w| TAU * w as f64 / (2 * v + 1) as f64).collect()
}

fn shifted(x: &[f64], d: usize, s: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    p[d] = wrap_angle(p[d] + s);
    p
}

struct SmoPlan {
    n: u64,
    mults: Vec<usize>,
    alpha: f64,
    interval: usize,
}

impl SmoPlan {
    fn new(ctx: &RunContext, cfg: &OptimizerConfig) -> Result<Self, OptError> {
        let mults = ctx.problem.multiplicities().to_vec();
        Ok(Self {
            n: cfg.shots()?,
            interval: cfg.center_interval(mults.len()),
            alpha: cfg.shift(),
            mults,
        })
    }

    /// Axis, whether to re-measure the center, and cost of step `t` (0-based).
    fn step(&self, t: usize) -> (usize, bool, u64) {
        let d = t % self.mults.len();
        let center = self.interval > 0 && t > 0 && t.is_multiple_of(self.interval);
        let count = 2 * self.mults[d] as u64 + u64::from(center);
        (d, center, count * self.n)
    }
}

/// NFT: per step, fit an order-`V_d` trigonometric polynomial through the
/// carried best score and `2 V_d` new observations along one axis, then jump
/// to its minimum.
pub fn run_nft<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    check_start(ctx, cfg, x0)?;
    let plan = SmoPlan::new(ctx, cfg)?;
    let mut state = TrialState::new(x0);
    if plan.n > ctx.budget {
        return Ok(state);
    }
    let (mut y_hat, mut y_var) = ctx.measure(&state.x_hat, plan.n, rng)?;
    state.cumulative_shots = plan.n;
    loop {
        let (d, center, cost) = plan.step(state.step);
        if !state.affordable(cost, ctx, cfg) {
            break;
        }
        if center {
            (y_hat, y_var) = ctx.measure(&state.x_hat, plan.n, rng)?;
        }
        let offsets = smo_offsets(plan.mults[d], plan.alpha);
        let mut thetas = vec![0.0];
        let mut ys = vec![y_hat];
        let mut sds = vec![y_var.sqrt()];
        for &s in &offsets {
            let (y, var) = ctx.measure(&shifted(&state.x_hat, d, s), plan.n, rng)?;
            thetas.push(s);
            ys.push(y);
            sds.push(var.sqrt());
        }
        // zero-noise readouts would make the weights singular; equal weights are exact then
        if sds.iter().any(|s| !(*s > 0.0)) {
            sds.iter_mut().for_each(|s| *s = 1.0);
        }
        let fit = fit_1d_trig(&thetas, &ys, &sds, plan.mults[d])?;
        let theta = argmin_1d_trig(&fit);
        state.x_hat[d] = wrap_angle(state.x_hat[d] + theta);
        y_hat = fit.eval(theta);
        state.record(cost, StepExtra::default());
    }
    Ok(state)
}

/// Bayes-NFT: as NFT, but every observation conditions one global GP and
/// the step minimizes the 1D slice of its posterior mean. Once the GP holds
/// more than `window - 1 + D` points it keeps the latest `window - 1` plus a
/// pseudo-observation at the current optimum.
pub fn run_bayes_nft<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    check_start(ctx, cfg, x0)?;
    let plan = SmoPlan::new(ctx, cfg)?;
    let limit = cfg.window(&plan.mults);
    let mut model = GpModel::new(cfg.kernel_params(&plan.mults)?);
    let mut state = TrialState::new(x0);
    if plan.n > ctx.budget {
        return Ok(state);
    }
    let (y0, var0) = ctx.measure(&state.x_hat, plan.n, rng)?;
    model.extend(&[Observation::value(state.x_hat.clone(), y0, var0)])?;
    state.cumulative_shots = plan.n;
    loop {
        let (d, center, cost) = plan.step(state.step);
        if !state.affordable(cost, ctx, cfg) {
            break;
        }
        let v = plan.mults[d];
        let mut new = Vec::new();
        if center {
            let (y, var) = ctx.measure(&state.x_hat, plan.n, rng)?;
            new.push(Observation::value(state.x_hat.clone(), y, var));
        }
        for s in smo_offsets(v, plan.alpha) {
            let p = shifted(&state.x_hat, d, s);
            let (y, var) = ctx.measure(&p, plan.n, rng)?;
            new.push(Observation::value(p, y, var));
        }
        model.extend(&new)?;
        model.retain(RetentionPolicy::NftInducer, limit, &state.x_hat)?;

        // the posterior mean along the axis is an exact order-v trig polynomial
        let thetas: Vec<f64> = (0..=2 * v).map(|k| TAU * k as f64 / (2 * v + 1) as f64).collect();
        let queries: Vec<Query> = thetas
            .iter()
            .map(|&t| Query::value(&shifted(&state.x_hat, d, t)))
            .collect();
        let post = model.predict(&queries)?;
        let fit = fit_1d_trig(&thetas, &post.mean, &vec![1.0; thetas.len()], v)?;
        let theta = argmin_1d_trig(&fit);
        state.x_hat[d] = wrap_angle(state.x_hat[d] + theta);
        state.record(
            cost,
            StepExtra {
                training_size: model.len(),
                ..StepExtra::default()
            },
        );
    }
    state.dataset = Some(model.dataset());
    Ok(state)
}
