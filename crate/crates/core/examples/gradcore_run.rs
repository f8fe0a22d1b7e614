//! SGD with GradCoRe shot allocation on a small Ising chain; prints the
//! threshold and shots per step alongside the energy error.

use std::f64::consts::TAU;

use bayes_psr::optimizers::{run_method, Method, OptimizerConfig, RunContext};
use bayes_psr::simulator::{calibrate_sigma_bar, ground_truth, NoiseMode, VqeProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = VqeProblem::ising(3, 2)?;
    let e0 = ground_truth(&problem.hamiltonian)?.energy;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma_bar_sq = calibrate_sigma_bar(&problem.hamiltonian, &problem.circuit, 30, &mut rng)?;
    let x0: Vec<f64> = (0..problem.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
    let ctx = RunContext {
        problem: &problem,
        sigma_bar_sq,
        budget: 2_000_000,
        noise_mode: NoiseMode::ExactVariance,
    };
    let state = run_method(&ctx, &OptimizerConfig::new(Method::Gradcore), &x0, &mut rng)?;
    println!("{:>6} {:>10} {:>8} {:>10} {:>10}", "step", "shots", "step", "kappa^2", "dE");
    let every = (state.history.len() / 15).max(1);
    for s in state.history.iter().step_by(every) {
        println!(
            "{:>6} {:>10} {:>8} {:>10.5} {:>10.5}",
            s.step,
            s.cumulative_shots,
            s.shots,
            s.kappa_sq.as_ref().map_or(f64::NAN, |k| k[0]),
            problem.energy(&s.x_hat)? - e0
        );
    }
    let misses = state.history.iter().filter(|s| s.constraint_miss).count();
    println!("{} steps, {misses} threshold misses", state.history.len());
    Ok(())
}
