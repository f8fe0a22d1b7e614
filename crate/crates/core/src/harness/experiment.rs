use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::records::{compute_metrics, RunRecord};
use crate::error::HarnessError;
use crate::optimizers::{run_method, RunContext};
use crate::simulator::{calibrate_sigma_bar, ground_truth, GroundState, VqeProblem};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "BPSR_WORKERS";

/// Side-channel facts about a run that do not belong in the per-step CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub sigma_bar_sq: f64,
    /// Points averaged; zero when `sigma_bar_sq` came from the config.
    pub calibration_points: usize,
    pub calibration_seed: u64,
    /// Calibration reads exact state variances, so it spends no shots.
    pub calibration_shots: u64,
    pub ground_energy: f64,
    pub n_qubits: usize,
    pub n_params: usize,
    pub n_operator_groups: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub summary: CalibrationSummary,
}

/// Reads `BPSR_WORKERS`; unset means all available cores.
pub fn worker_count() -> Result<usize, HarnessError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(HarnessError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// sigma_bar^2 for the config's problem, plus the summary record.
pub fn calibrate(cfg: &ExperimentConfig, problem: &VqeProblem, ground: &GroundState) -> Result<CalibrationSummary, HarnessError> {
    let (sigma_bar_sq, points) = match cfg.sigma_bar_sq {
        Some(s) => (s, 0),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.calibration.seed);
            let s = calibrate_sigma_bar(&problem.hamiltonian, &problem.circuit, cfg.calibration.points, &mut rng)?;
            (s, cfg.calibration.points)
        }
    };
    Ok(CalibrationSummary {
        sigma_bar_sq,
        calibration_points: points,
        calibration_seed: cfg.calibration.seed,
        calibration_shots: 0,
        ground_energy: ground.energy,
        n_qubits: problem.circuit.n_qubits(),
        n_params: problem.n_params(),
        n_operator_groups: problem.hamiltonian.groups().len(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    run_experiment_with_workers(cfg, worker_count()?)
}

/// Runs every (method, trial) pair on a pool of `workers` threads. Trial `i`
/// of every method draws its start point and noise from a ChaCha8 stream
/// seeded with `base_seed + i`, so all methods share start points and the
/// output does not depend on `workers`.
pub fn run_experiment_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let ground = ground_truth(&problem.hamiltonian)?;
    let summary = calibrate(cfg, &problem, &ground)?;
    for m in &cfg.methods {
        m.validate(problem.multiplicities(), summary.sigma_bar_sq)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", m.label())))?;
    }
    let ctx = RunContext {
        problem: &problem,
        sigma_bar_sq: summary.sigma_bar_sq,
        budget: cfg.budget,
        noise_mode: cfg.noise_mode,
    };
    let jobs: Vec<(usize, usize)> = (0..cfg.methods.len())
        .flat_map(|m| (0..cfg.n_trials).map(move |t| (m, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let chunks: Vec<Vec<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, trial)| run_trial(&ctx, cfg, m, trial, &ground))
            .collect::<Result<_, _>>()
    })?;
    Ok(ExperimentOutput {
        records: chunks.into_iter().flatten().collect(),
        summary,
    })
}

fn run_trial(
    ctx: &RunContext,
    cfg: &ExperimentConfig,
    method: usize,
    trial: usize,
    ground: &GroundState,
) -> Result<Vec<RunRecord>, HarnessError> {
    let opt = &cfg.methods[method];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed.wrapping_add(trial as u64));
    let x0: Vec<f64> = (0..ctx.problem.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
    let state = run_method(ctx, opt, &x0, &mut rng)?;
    let label = opt.label();
    state
        .history
        .iter()
        .map(|s| {
            let (de, df) = compute_metrics(&s.x_hat, ctx.problem, ground)?;
            Ok(RunRecord {
                trial,
                step: s.step,
                cumulative_shots: s.cumulative_shots,
                delta_energy: de,
                delta_fidelity: df,
                kappa_sq: s
                    .kappa_sq
                    .as_ref()
                    .map(|k| k.iter().sum::<f64>() / k.len() as f64),
                shots_this_step: s.shots,
                method: label.clone(),
            })
        })
        .collect()
}
