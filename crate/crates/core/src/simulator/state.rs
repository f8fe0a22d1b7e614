use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliHamiltonian;
use crate::error::SimError;

/// Imaginary residue of `<psi|H|psi>` above which the Hamiltonian build is
/// considered broken.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// Largest qubit count accepted by [`ground_truth`].
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes and normalizes them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(SimError::InvalidQubitCount(n));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_qubits: n.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn check_dims(h: &PauliHamiltonian, psi: &Statevector) -> Result<(), SimError> {
    if h.n_qubits() != psi.n_qubits() {
        return Err(SimError::DimensionMismatch {
            expected: h.n_qubits(),
            found: psi.n_qubits(),
        });
    }
    Ok(())
}

/// `<psi|H|psi>`.
///
/// # Panics
/// If the imaginary part exceeds [`IMAG_TOLERANCE`], which can only happen for
/// a non-Hermitian construction.
pub fn exact_energy(h: &PauliHamiltonian, psi: &Statevector) -> Result<f64, SimError> {
    check_dims(h, psi)?;
    let e: Complex64 = h
        .terms()
        .iter()
        .map(|t| t.mask().expectation(psi.amplitudes()) * t.coeff())
        .sum();
    assert!(
        e.im.abs() < IMAG_TOLERANCE,
        "energy has imaginary part {}",
        e.im
    );
    Ok(e.re)
}

/// Single-shot variance of the grouped estimator: `sum_g Var_psi(H_g)`.
pub fn energy_variance(h: &PauliHamiltonian, psi: &Statevector) -> Result<f64, SimError> {
    check_dims(h, psi)?;
    let amps = psi.amplitudes();
    let mut scratch = vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut hg_psi = vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut total = 0.0;
    for group in h.groups() {
        hg_psi.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for &t in &group.terms {
            let term = &h.terms()[t];
            term.mask().apply_into(amps, &mut scratch);
            for (acc, s) in hg_psi.iter_mut().zip(&scratch) {
                *acc += s * term.coeff();
            }
        }
        let second: f64 = hg_psi.iter().map(|a| a.norm_sqr()).sum();
        let first: Complex64 = amps.iter().zip(&hg_psi).map(|(a, b)| a.conj() * b).sum();
        total += (second - first.re * first.re).max(0.0);
    }
    Ok(total)
}

/// `|<psi_gs|psi_x>|`.
pub fn fidelity(psi_gs: &Statevector, psi_x: &Statevector) -> Result<f64, SimError> {
    if psi_gs.n_qubits() != psi_x.n_qubits() {
        return Err(SimError::DimensionMismatch {
            expected: psi_gs.n_qubits(),
            found: psi_x.n_qubits(),
        });
    }
    Ok(psi_gs.inner(psi_x).norm().min(1.0))
}

/// Dense `2^Q x 2^Q` matrix of `H`.
pub fn dense_matrix(h: &PauliHamiltonian) -> Result<DMatrix<Complex64>, SimError> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(SimError::TooLargeForDense(h.n_qubits()));
    }
    let dim = h.dim();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for term in h.terms() {
        let mask = term.mask();
        let phase = mask.y_phase() * term.coeff();
        for b in 0..dim {
            let sign = if (b & mask.z_mask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(b ^ mask.x_mask, b)] += phase * sign;
        }
    }
    Ok(m)
}

/// Exact ground state by dense Hermitian diagonalization.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: Statevector,
}

pub fn ground_truth(h: &PauliHamiltonian) -> Result<GroundState, SimError> {
    let m = dense_matrix(h)?;
    let eig = m.symmetric_eigen();
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let amps: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    Ok(GroundState {
        energy,
        state: Statevector::from_amplitudes(amps)?,
    })
}
