//! SGD with classical or Bayesian shift rules, and GradCoRe shot selection.

use nalgebra::DMatrix;
use rand::Rng;

use super::adam::{adam_update, AdamState};
use super::kappa::kappa_update;
use super::{check_start, OptimizerConfig, RunContext, StepExtra, TrialState};
use crate::error::OptError;
use crate::gp::{Dataset, GpModel, KernelParams, Observation, Query};
use crate::psr::{equidistant_points, psr_first, psr_general};
use crate::wrap_angle;

/// Gradient design along axis `d`: `x -+ alpha e_d` when `v = 1`, otherwise
/// the `2v` equidistant points.
pub fn sweep_points(x_hat: &[f64], d: usize, v: usize, alpha: f64) -> Result<Vec<Vec<f64>>, OptError> {
    if v == 1 {
        return Ok([-alpha, alpha]
            .iter()
            .map(|s| {
                let mut p = x_hat.to_vec();
                p[d] = wrap_angle(p[d] + s);
                p
            })
            .collect());
    }
    Ok(equidistant_points(x_hat, d, v)?)
}

fn full_sweep(x_hat: &[f64], mults: &[usize], alpha: f64) -> Result<Vec<(usize, Vec<f64>)>, OptError> {
    let mut out = Vec::new();
    for (d, &v) in mults.iter().enumerate() {
        for p in sweep_points(x_hat, d, v, alpha)? {
            out.push((d, p));
        }
    }
    Ok(out)
}

fn adam_step(state: &mut TrialState, cfg: &OptimizerConfig, grad: &[f64]) {
    let adam = state
        .adam
        .get_or_insert_with(|| AdamState::new(grad.len(), cfg.adam));
    let (next, x) = adam_update(adam, grad, &state.x_hat);
    *adam = next;
    state.x_hat = x;
}

/// SGD with the shift rule on freshly measured points only.
pub fn run_sgd_psr<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    check_start(ctx, cfg, x0)?;
    let n = cfg.shots()?;
    let mults = ctx.problem.multiplicities().to_vec();
    let alpha = cfg.shift();
    let cost = mults.iter().map(|v| 2 * *v as u64).sum::<u64>() * n;
    let mut state = TrialState::new(x0);
    while state.affordable(cost, ctx, cfg) {
        let mut grad = Vec::with_capacity(mults.len());
        for (d, &v) in mults.iter().enumerate() {
            let mut ys = Vec::with_capacity(2 * v);
            for p in sweep_points(&state.x_hat, d, v, alpha)? {
                ys.push(ctx.measure(&p, n, rng)?.0);
            }
            grad.push(if v == 1 { psr_first(ys[0], ys[1], alpha)? } else { psr_general(&ys, v)? });
        }
        adam_step(&mut state, cfg, &grad);
        state.record(
            cost,
            StepExtra {
                grad: Some(grad),
                ..StepExtra::default()
            },
        );
    }
    Ok(state)
}

/// SGD with the GP derivative, reusing the latest observations.
///
/// Before each sweep the GP is trimmed to the latest `window - sweep`
/// observations, so the training set after the sweep never exceeds the
/// window. A zero window uses the current sweep only.
pub fn run_bayes_sgd<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    check_start(ctx, cfg, x0)?;
    let n = cfg.shots()?;
    let mults = ctx.problem.multiplicities().to_vec();
    let params = cfg.kernel_params(&mults)?;
    let alpha = cfg.shift();
    let sweep: usize = mults.iter().map(|v| 2 * v).sum();
    let keep = cfg.window(&mults).saturating_sub(sweep);
    let cost = sweep as u64 * n;
    let mut model = GpModel::new(params);
    let mut state = TrialState::new(x0);
    while state.affordable(cost, ctx, cfg) {
        model.keep_latest(keep)?;
        let mut new = Vec::with_capacity(sweep);
        for (_, p) in full_sweep(&state.x_hat, &mults, alpha)? {
            let (y, var) = ctx.measure(&p, n, rng)?;
            new.push(Observation::value(p, y, var));
        }
        model.extend(&new)?;
        let (grad, var) = model.derivative_at(&state.x_hat)?;
        adam_step(&mut state, cfg, &grad);
        state.record(
            cost,
            StepExtra {
                grad: Some(grad),
                grad_var: Some(var),
                training_size: model.len(),
                ..StepExtra::default()
            },
        );
    }
    state.dataset = Some(model.dataset());
    Ok(state)
}

/// Measurement plan chosen by [`gradcore_select`].
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub points: Vec<Vec<f64>>,
    pub shots: Vec<u64>,
    /// Axis each point belongs to.
    pub axes: Vec<usize>,
    /// Per-axis flag: even the finest candidate noise missed the threshold.
    pub miss: Vec<bool>,
    /// Per-axis derivative variance predicted for the chosen shot counts.
    pub predicted_var: Vec<f64>,
}

impl Selection {
    pub fn total_shots(&self) -> u64 {
        self.shots.iter().sum()
    }
}

/// Chooses points and the fewest shots per axis so that, after measuring,
/// the derivative posterior variance at `x_hat` is at most `kappa_sq[d]`.
pub fn gradcore_select(
    ds: &Dataset,
    x_hat: &[f64],
    kappa_sq: &[f64],
    sigma_bar_sq: f64,
    alpha_hat: f64,
    p: &KernelParams,
) -> Result<Selection, OptError> {
    let model = GpModel::fit(ds, p)?;
    select_with_model(&model, x_hat, kappa_sq, sigma_bar_sq, alpha_hat, 64, false)
}

pub(crate) fn select_with_model(
    model: &GpModel,
    x_hat: &[f64],
    kappa_sq: &[f64],
    sigma_bar_sq: f64,
    alpha_hat: f64,
    grid: usize,
    uniform: bool,
) -> Result<Selection, OptError> {
    let mults = model.params().multiplicities.clone();
    if kappa_sq.len() != mults.len() || x_hat.len() != mults.len() {
        return Err(OptError::Config("kappa_sq and x_hat must have one entry per parameter".into()));
    }
    if kappa_sq.iter().any(|k| !(*k > 0.0)) || !(sigma_bar_sq > 0.0) {
        return Err(OptError::Config("thresholds and sigma_bar_sq must be positive".into()));
    }
    let mut sel = Selection {
        points: Vec::new(),
        shots: Vec::new(),
        axes: Vec::new(),
        miss: Vec::new(),
        predicted_var: Vec::new(),
    };
    for (d, &v) in mults.iter().enumerate() {
        let pts = sweep_points(x_hat, d, v, alpha_hat)?;
        let curve = VarianceCurve::new(model, x_hat, d, &pts)?;
        let kappa = kappa_sq[d];
        let hi = sigma_bar_sq;
        let lo = (kappa * fresh_design_gain(v, alpha_hat)).min(hi);
        let chosen = (0..grid)
            .map(|i| {
                if grid == 1 {
                    hi
                } else {
                    // geometric from hi down to lo
                    hi * (lo / hi).powf(i as f64 / (grid - 1) as f64)
                }
            })
            .find(|&s| curve.at(s) <= kappa);
        let (shots, miss) = match chosen {
            Some(s) => (shots_for(sigma_bar_sq, s), false),
            None => (shots_for(sigma_bar_sq, lo), true),
        };
        sel.miss.push(miss);
        sel.predicted_var.push(curve.at(sigma_bar_sq / shots as f64));
        for p in pts {
            sel.points.push(p);
            sel.shots.push(shots);
            sel.axes.push(d);
        }
    }
    if uniform {
        let max = sel.shots.iter().copied().max().unwrap_or(1);
        sel.shots.iter_mut().for_each(|s| *s = max);
        for (d, &v) in mults.iter().enumerate() {
            let pts = sweep_points(x_hat, d, v, alpha_hat)?;
            sel.predicted_var[d] = VarianceCurve::new(model, x_hat, d, &pts)?.at(sigma_bar_sq / max as f64);
        }
    }
    Ok(sel)
}

/// `noise / variance` of the derivative estimate from the sweep design alone
/// in the flat-prior limit: `2 sin^2 alpha` for `v = 1` and
/// `6 / (2 v^2 + 1)` for the equidistant design. Scaling `kappa_sq` by it
/// gives the coarsest noise at which fresh measurements alone would meet
/// the threshold, which bounds the noise search from below.
fn fresh_design_gain(v: usize, alpha: f64) -> f64 {
    if v == 1 {
        2.0 * alpha.sin().powi(2)
    } else {
        6.0 / (2.0 * (v * v) as f64 + 1.0)
    }
}

fn shots_for(sigma_bar_sq: f64, noise: f64) -> u64 {
    ((sigma_bar_sq / noise).ceil() as u64).max(1)
}

/// Derivative variance at `x_hat` after adding `pts` with a common noise
/// level: `S00 - s^T (S_pp + noise I)^{-1} s`, evaluated through the
/// eigendecomposition of `S_pp`.
struct VarianceCurve {
    prior: f64,
    eig: Vec<f64>,
    proj_sq: Vec<f64>,
}

impl VarianceCurve {
    fn new(model: &GpModel, x_hat: &[f64], d: usize, pts: &[Vec<f64>]) -> Result<Self, OptError> {
        let mut queries = vec![Query::deriv(x_hat, d)];
        queries.extend(pts.iter().map(|p| Query::value(p)));
        let post = model.predict(&queries)?;
        let m = pts.len();
        let spp = DMatrix::from_fn(m, m, |i, j| post.cov[(i + 1, j + 1)]);
        let s = nalgebra::DVector::from_fn(m, |i, _| post.cov[(i + 1, 0)]);
        let eig = spp.symmetric_eigen();
        let proj = eig.eigenvectors.transpose() * s;
        Ok(Self {
            prior: post.cov[(0, 0)],
            eig: eig.eigenvalues.iter().map(|l| l.max(0.0)).collect(),
            proj_sq: proj.iter().map(|p| p * p).collect(),
        })
    }

    fn at(&self, noise: f64) -> f64 {
        self.prior
            - self
                .eig
                .iter()
                .zip(&self.proj_sq)
                .map(|(l, p)| p / (l + noise))
                .sum::<f64>()
    }
}

/// SGD-GradCoRe: measure just enough to put the current optimum inside the
/// gradient confident region, step with the GP derivative, adapt the
/// threshold to the gradient norm.
pub fn run_gradcore<R: Rng + ?Sized>(
    ctx: &RunContext,
    cfg: &OptimizerConfig,
    x0: &[f64],
    rng: &mut R,
) -> Result<TrialState, OptError> {
    check_start(ctx, cfg, x0)?;
    let mults = ctx.problem.multiplicities().to_vec();
    let dim = mults.len();
    let params = cfg.kernel_params(&mults)?;
    let alpha = cfg.shift();
    let sweep: usize = mults.iter().map(|v| 2 * v).sum();
    let keep = cfg.window(&mults).saturating_sub(sweep);
    let sched = cfg.schedule(ctx.sigma_bar_sq, dim)?;
    let mut kappa = vec![sched.kappa0_sq; dim];
    let mut model = GpModel::new(params);
    let mut state = TrialState::new(x0);
    loop {
        model.keep_latest(keep)?;
        let sel = select_with_model(
            &model,
            &state.x_hat,
            &kappa,
            ctx.sigma_bar_sq,
            alpha,
            cfg.noise_grid,
            cfg.uniform_shots,
        )?;
        let cost = sel.total_shots();
        if !state.affordable(cost, ctx, cfg) {
            break;
        }
        let mut new = Vec::with_capacity(sel.points.len());
        for (p, &shots) in sel.points.iter().zip(&sel.shots) {
            let (y, var) = ctx.measure(p, shots, rng)?;
            new.push(Observation::value(p.clone(), y, var));
        }
        model.extend(&new)?;
        let (grad, var) = model.derivative_at(&state.x_hat)?;
        let used = std::mem::replace(&mut kappa, kappa_update(&sched, &grad, state.step));
        adam_step(&mut state, cfg, &grad);
        state.record(
            cost,
            StepExtra {
                grad: Some(grad),
                kappa_sq: Some(used),
                grad_var: Some(var),
                miss: sel.miss.iter().any(|&m| m),
                training_size: model.len(),
            },
        );
    }
    state.dataset = Some(model.dataset());
    Ok(state)
}
