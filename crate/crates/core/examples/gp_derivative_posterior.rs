//! GP regression with the VQE kernel: fit noisy energies along one axis and
//! read off the derivative posterior, then compare with the exact gradient.

use std::f64::consts::FRAC_PI_2;

use bayes_psr::gp::{Dataset, GpModel, KernelParams, Observation, Query};
use bayes_psr::simulator::{NoiseMode, VqeProblem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = VqeProblem::ising(3, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = vec![0.4; problem.n_params()];
    let sigma_bar_sq = 3.0;
    let params = KernelParams::new(9.0, 100.0, problem.multiplicities().to_vec())?;

    let mut ds = Dataset::new(problem.n_params());
    for k in 0..8 {
        let mut p = x.clone();
        p[0] += -1.5 + 3.0 * k as f64 / 7.0;
        let obs = problem.observe(&p, 512, NoiseMode::Calibrated, sigma_bar_sq, &mut rng)?;
        ds.push(Observation::value(p, obs.value, obs.reported_var))?;
    }
    let model = GpModel::fit(&ds, &params)?;

    let post = model.predict(&[Query::value(&x), Query::deriv(&x, 0)])?;
    let mut plus = x.clone();
    plus[0] += FRAC_PI_2;
    let mut minus = x.clone();
    minus[0] -= FRAC_PI_2;
    let exact_grad = (problem.energy(&plus)? - problem.energy(&minus)?) / 2.0;
    println!(
        "value:      mean {:.5} sd {:.5} (exact {:.5})",
        post.mean[0],
        post.variance(0).sqrt(),
        problem.energy(&x)?
    );
    println!(
        "derivative: mean {:.5} sd {:.5} (exact {:.5})",
        post.mean[1],
        post.variance(1).sqrt(),
        exact_grad
    );
    let (_, var) = model.derivative_at(&x)?;
    println!("axis 0 derivative variance {:.2e}, untouched axis 1 {:.2e}", var[0], var[1]);
    Ok(())
}
