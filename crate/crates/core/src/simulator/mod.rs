//! Statevector simulation of parameterized circuits and Pauli Hamiltonians.
//!
//! Provides exact energies, the single-shot variance of the grouped
//! measurement estimator, Gaussian shot-noise readouts and a dense
//! exact-diagonalization ground truth for small systems.

mod circuit;
mod noise;
mod pauli;
mod state;

pub use circuit::{build_efficient_su2, Circuit, FixedGate, Gate, RotationGate};
pub use noise::{calibrate_sigma_bar, observe, NoiseMode, Observation};
pub use pauli::{
    build_heisenberg, build_ising_critical, OperatorGroup, Pauli, PauliHamiltonian, PauliMask,
    PauliString,
};
pub use state::{
    dense_matrix, energy_variance, exact_energy, fidelity, ground_truth, GroundState, Statevector,
    IMAG_TOLERANCE, MAX_DENSE_QUBITS,
};

use rand::Rng;

use crate::error::SimError;

/// Largest register the statevector kernels accept.
pub const MAX_QUBITS: usize = 20;

/// A Hamiltonian paired with the ansatz that prepares trial states for it.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    pub hamiltonian: PauliHamiltonian,
    pub circuit: Circuit,
}

impl VqeProblem {
    pub fn new(hamiltonian: PauliHamiltonian, circuit: Circuit) -> Result<Self, SimError> {
        if hamiltonian.n_qubits() != circuit.n_qubits() {
            return Err(SimError::DimensionMismatch {
                expected: hamiltonian.n_qubits(),
                found: circuit.n_qubits(),
            });
        }
        Ok(Self {
            hamiltonian,
            circuit,
        })
    }

    /// Critical Ising chain with the layered SU(2) ansatz.
    pub fn ising(q: usize, layers: usize) -> Result<Self, SimError> {
        Self::new(build_ising_critical(q)?, build_efficient_su2(q, layers)?)
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    pub fn multiplicities(&self) -> &[usize] {
        self.circuit.multiplicities()
    }

    /// Noiseless `f*(x)`.
    pub fn energy(&self, x: &[f64]) -> Result<f64, SimError> {
        exact_energy(&self.hamiltonian, &self.circuit.prepare_state(x)?)
    }

    pub fn variance(&self, x: &[f64]) -> Result<f64, SimError> {
        energy_variance(&self.hamiltonian, &self.circuit.prepare_state(x)?)
    }

    pub fn observe<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        n_shots: u64,
        noise_mode: NoiseMode,
        sigma_bar_sq: f64,
        rng: &mut R,
    ) -> Result<Observation, SimError> {
        observe(
            &self.hamiltonian,
            &self.circuit,
            x,
            n_shots,
            noise_mode,
            sigma_bar_sq,
            rng,
        )
    }
}
