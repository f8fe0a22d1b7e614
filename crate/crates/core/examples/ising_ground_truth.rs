//! Builds the critical Ising chain with the layered SU(2) ansatz, diagonalizes
//! it exactly and compares noisy readouts against the exact energy.

use std::f64::consts::TAU;

use bayes_psr::simulator::{calibrate_sigma_bar, ground_truth, NoiseMode, VqeProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = VqeProblem::ising(5, 3)?;
    let gs = ground_truth(&problem.hamiltonian)?;
    println!(
        "Q=5 Ising: {} parameters, {} operator groups, ground energy {:.6}",
        problem.n_params(),
        problem.hamiltonian.groups().len(),
        gs.energy
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sigma_bar_sq = calibrate_sigma_bar(&problem.hamiltonian, &problem.circuit, 30, &mut rng)?;
    println!("calibrated single-shot variance {sigma_bar_sq:.4}");

    let x: Vec<f64> = (0..problem.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
    let exact = problem.energy(&x)?;
    println!("random point: exact energy {exact:.6}, state variance {:.4}", problem.variance(&x)?);
    for shots in [16, 256, 4096] {
        let obs = problem.observe(&x, shots, NoiseMode::ExactVariance, sigma_bar_sq, &mut rng)?;
        println!(
            "  {shots:>5} shots: y = {:.6} (error {:+.4}, reported sd {:.4})",
            obs.value,
            obs.value - exact,
            obs.reported_var.sqrt()
        );
    }
    Ok(())
}
