use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::pauli::PauliHamiltonian;
use super::state::{energy_variance, exact_energy};
use crate::error::SimError;

/// How the simulated shot noise variance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// State-dependent single-shot variance of the grouped estimator.
    #[default]
    ExactVariance,
    /// The calibrated constant `sigma_bar_sq`.
    Calibrated,
}

/// One noisy energy readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    /// Noise variance the optimizer assumes: `sigma_bar_sq / n_shots`.
    pub reported_var: f64,
}

/// Simulated readout `y = f*(x) + eps` with `eps ~ N(0, v / n_shots)`.
pub fn observe<R: Rng + ?Sized>(
    h: &PauliHamiltonian,
    circuit: &Circuit,
    x: &[f64],
    n_shots: u64,
    noise_mode: NoiseMode,
    sigma_bar_sq: f64,
    rng: &mut R,
) -> Result<Observation, SimError> {
    if n_shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let psi = circuit.prepare_state(x)?;
    let energy = exact_energy(h, &psi)?;
    let v = match noise_mode {
        NoiseMode::ExactVariance => energy_variance(h, &psi)?,
        NoiseMode::Calibrated => sigma_bar_sq,
    };
    let z: f64 = StandardNormal.sample(rng);
    Ok(Observation {
        value: energy + z * (v / n_shots as f64).sqrt(),
        reported_var: sigma_bar_sq / n_shots as f64,
    })
}

/// Mean single-shot variance over `n_points` uniform draws from `[0, 2 pi)^D`.
pub fn calibrate_sigma_bar<R: Rng + ?Sized>(
    h: &PauliHamiltonian,
    circuit: &Circuit,
    n_points: usize,
    rng: &mut R,
) -> Result<f64, SimError> {
    if n_points == 0 {
        return Err(SimError::NoCalibrationPoints);
    }
    let mut sum = 0.0;
    for _ in 0..n_points {
        let x: Vec<f64> = (0..circuit.n_params()).map(|_| rng.random::<f64>() * TAU).collect();
        sum += energy_variance(h, &circuit.prepare_state(&x)?)?;
    }
    Ok(sum / n_points as f64)
}
