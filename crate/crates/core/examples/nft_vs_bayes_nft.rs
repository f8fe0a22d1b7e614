//! Sequential minimal optimization with and without the GP posterior mean,
//! from shared start points under the same budget.

use std::f64::consts::TAU;

use bayes_psr::optimizers::{run_method, Method, OptimizerConfig, RunContext};
use bayes_psr::simulator::{calibrate_sigma_bar, ground_truth, NoiseMode, VqeProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = VqeProblem::ising(3, 2)?;
    let e0 = ground_truth(&problem.hamiltonian)?.energy;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sigma_bar_sq = calibrate_sigma_bar(&problem.hamiltonian, &problem.circuit, 30, &mut rng)?;
    let ctx = RunContext {
        problem: &problem,
        sigma_bar_sq,
        budget: 300_000,
        noise_mode: NoiseMode::ExactVariance,
    };
    for method in [Method::Nft, Method::BayesNft] {
        let cfg = OptimizerConfig::with_shots(method, 128);
        let mut gaps = Vec::new();
        for trial in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(trial);
            let x0: Vec<f64> = (0..problem.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
            let st = run_method(&ctx, &cfg, &x0, &mut rng)?;
            gaps.push(problem.energy(&st.x_hat)? - e0);
        }
        gaps.sort_by(f64::total_cmp);
        println!("{:<16} median dE {:.5}  (best {:.5}, worst {:.5})", cfg.label(), gaps[2], gaps[0], gaps[4]);
    }
    Ok(())
}
