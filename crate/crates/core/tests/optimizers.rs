use std::f64::consts::TAU;

use bayes_psr::optimizers::{run_method, Method, OptimizerConfig, RunContext};
use bayes_psr::simulator::{calibrate_sigma_bar, ground_truth, NoiseMode, VqeProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn configs() -> Vec<OptimizerConfig> {
    vec![
        OptimizerConfig::with_shots(Method::SgdPsr, 256),
        OptimizerConfig::with_shots(Method::BayesSgd, 256),
        OptimizerConfig::new(Method::Gradcore),
        OptimizerConfig::with_shots(Method::Nft, 256),
        OptimizerConfig::with_shots(Method::BayesNft, 256),
    ]
}

#[test]
fn every_method_makes_progress_on_small_ising() {
    let p = VqeProblem::ising(3, 1).unwrap();
    let e0 = ground_truth(&p.hamiltonian).unwrap().energy;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sb = calibrate_sigma_bar(&p.hamiltonian, &p.circuit, 30, &mut rng).unwrap();
    let ctx = RunContext {
        problem: &p,
        sigma_bar_sq: sb,
        budget: 1_000_000,
        noise_mode: NoiseMode::ExactVariance,
    };
    for cfg in configs() {
        let mut start_gap = 0.0;
        let mut end_gap = 0.0;
        for trial in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + trial);
            let x0: Vec<f64> = (0..p.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
            let st = run_method(&ctx, &cfg, &x0, &mut rng).unwrap();
            assert!(st.cumulative_shots <= ctx.budget);
            start_gap += p.energy(&x0).unwrap() - e0;
            end_gap += p.energy(&st.x_hat).unwrap() - e0;
        }
        assert!(end_gap < 0.25 * start_gap, "{}: {start_gap} -> {end_gap}", cfg.label());
    }
}

#[test]
fn gradcore_spends_budget_exactly_within_limit() {
    let p = VqeProblem::ising(3, 1).unwrap();
    let ctx = RunContext {
        problem: &p,
        sigma_bar_sq: 3.0,
        budget: 50_000,
        noise_mode: NoiseMode::Calibrated,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let st = run_method(&ctx, &OptimizerConfig::new(Method::Gradcore), &[1.0; 12], &mut rng).unwrap();
    let total: u64 = st.history.iter().map(|s| s.shots).sum();
    assert_eq!(total, st.cumulative_shots);
    assert!(st.cumulative_shots <= 50_000);
    // shots count once per operator group, at least 1 for each of 24 points
    assert!(st.history.iter().all(|s| s.shots >= 24));
}
