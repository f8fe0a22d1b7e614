//! Parameterized circuits built from fixed gates and Pauli rotations.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::pauli::{Pauli, PauliMask};
use super::state::Statevector;
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedGate {
    H(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl FixedGate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            FixedGate::H(q) | FixedGate::X(q) => vec![q],
            FixedGate::Cnot { control, target } => vec![control, target],
            FixedGate::Cz(a, b) => vec![a, b],
        }
    }

    fn apply(&self, amps: &mut [Complex64]) {
        match *self {
            FixedGate::H(q) => {
                let bit = 1 << q;
                for b in 0..amps.len() {
                    if b & bit == 0 {
                        let (a0, a1) = (amps[b], amps[b | bit]);
                        amps[b] = (a0 + a1) * FRAC_1_SQRT_2;
                        amps[b | bit] = (a0 - a1) * FRAC_1_SQRT_2;
                    }
                }
            }
            FixedGate::X(q) => {
                let bit = 1 << q;
                for b in 0..amps.len() {
                    if b & bit == 0 {
                        amps.swap(b, b | bit);
                    }
                }
            }
            FixedGate::Cnot { control, target } => {
                let (cb, tb) = (1 << control, 1 << target);
                for b in 0..amps.len() {
                    if b & cb != 0 && b & tb == 0 {
                        amps.swap(b, b | tb);
                    }
                }
            }
            FixedGate::Cz(a, c) => {
                let m = (1 << a) | (1 << c);
                for (b, amp) in amps.iter_mut().enumerate() {
                    if b & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
    }
}

/// `exp(-i x_param P / 2)` for a Pauli product `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationGate {
    generator: Vec<Pauli>,
    mask: PauliMask,
    param: usize,
}

impl RotationGate {
    pub fn new(generator: Vec<Pauli>, param: usize) -> Self {
        let mask = PauliMask::from_ops(&generator);
        Self {
            generator,
            mask,
            param,
        }
    }

    /// Single-qubit rotation about `axis` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, axis: Pauli, param: usize) -> Self {
        let mut ops = vec![Pauli::I; n_qubits];
        ops[qubit] = axis;
        Self::new(ops, param)
    }

    pub fn param(&self) -> usize {
        self.param
    }

    pub fn generator(&self) -> &[Pauli] {
        &self.generator
    }

    fn apply(&self, theta: f64, amps: &mut [Complex64]) {
        let (s, c) = (theta / 2.0).sin_cos();
        // -i s * i^{n_y}
        let k = Complex64::new(0.0, -s) * self.mask.y_phase();
        let sign = |b: usize| {
            if (b & self.mask.z_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        };
        let x = self.mask.x_mask;
        if x == 0 {
            for (b, amp) in amps.iter_mut().enumerate() {
                *amp = *amp * c + k * sign(b) * *amp;
            }
            return;
        }
        for b in 0..amps.len() {
            let b2 = b ^ x;
            if b < b2 {
                let (a1, a2) = (amps[b], amps[b2]);
                amps[b] = a1 * c + k * sign(b2) * a2;
                amps[b2] = a2 * c + k * sign(b) * a1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Fixed(FixedGate),
    Rotation(RotationGate),
}

/// Ordered gate list acting on `|0...0>`; parameters are indexed `0..n_params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
    multiplicities: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<Gate>) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > super::MAX_QUBITS {
            return Err(SimError::InvalidQubitCount(n_qubits));
        }
        let mut multiplicities = vec![0; n_params];
        for gate in &gates {
            match gate {
                Gate::Fixed(f) => {
                    let qs = f.qubits();
                    if let Some(&q) = qs.iter().find(|&&q| q >= n_qubits) {
                        return Err(SimError::QubitOutOfRange { qubit: q, n_qubits });
                    }
                    if qs.len() == 2 && qs[0] == qs[1] {
                        return Err(SimError::QubitOutOfRange {
                            qubit: qs[0],
                            n_qubits,
                        });
                    }
                }
                Gate::Rotation(r) => {
                    if r.generator.len() != n_qubits {
                        return Err(SimError::DimensionMismatch {
                            expected: n_qubits,
                            found: r.generator.len(),
                        });
                    }
                    if r.param >= n_params {
                        return Err(SimError::UnusedParameter {
                            index: r.param,
                            n_params,
                        });
                    }
                    multiplicities[r.param] += 1;
                }
            }
        }
        if let Some(index) = multiplicities.iter().position(|&v| v == 0) {
            return Err(SimError::UnusedParameter { index, n_params });
        }
        Ok(Self {
            n_qubits,
            n_params,
            gates,
            multiplicities,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `V_d`: number of rotation gates sharing parameter `d`.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// `|psi_x> = G_{D'} ... G_1 |0...0>`.
    pub fn prepare_state(&self, x: &[f64]) -> Result<Statevector, SimError> {
        let mut psi = Statevector::zero_state(self.n_qubits);
        self.apply_to(x, &mut psi)?;
        Ok(psi)
    }

    /// Applies the circuit to an existing state in place.
    pub fn apply_to(&self, x: &[f64], psi: &mut Statevector) -> Result<(), SimError> {
        if x.len() != self.n_params {
            return Err(SimError::DimensionMismatch {
                expected: self.n_params,
                found: x.len(),
            });
        }
        if psi.n_qubits() != self.n_qubits {
            return Err(SimError::DimensionMismatch {
                expected: self.n_qubits,
                found: psi.n_qubits(),
            });
        }
        let amps = psi.amplitudes_mut();
        for gate in &self.gates {
            match gate {
                Gate::Fixed(f) => f.apply(amps),
                Gate::Rotation(r) => r.apply(x[r.param], amps),
            }
        }
        Ok(())
    }
}

/// Layered RY/RZ ansatz with a linear CNOT chain between rotation blocks.
///
/// `layers + 1` blocks; each block applies RY to every qubit, then RZ to every
/// qubit, each with a fresh parameter. `D = 2 q (layers + 1)`, all `V_d = 1`.
pub fn build_efficient_su2(q: usize, layers: usize) -> Result<Circuit, SimError> {
    if !(2..=super::MAX_QUBITS).contains(&q) {
        return Err(SimError::InvalidQubitCount(q));
    }
    if layers == 0 {
        return Err(SimError::InvalidLayers);
    }
    let mut gates = Vec::new();
    let mut param = 0;
    for block in 0..=layers {
        if block > 0 {
            for j in 0..q - 1 {
                gates.push(Gate::Fixed(FixedGate::Cnot {
                    control: j,
                    target: j + 1,
                }));
            }
        }
        for axis in [Pauli::Y, Pauli::Z] {
            for j in 0..q {
                gates.push(Gate::Rotation(RotationGate::single(q, j, axis, param)));
                param += 1;
            }
        }
    }
    Circuit::new(q, param, gates)
}
