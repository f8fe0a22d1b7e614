//! Pauli strings and grouped Pauli Hamiltonians.

use std::fmt;

use num_complex::Complex64;

use crate::error::SimError;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Bit-mask form of a Pauli product used by the state kernels.
///
/// Qubit `j` corresponds to bit `j` of a basis-state index. Acting on `|b>`
/// the product yields `i^{n_y} (-1)^{popcount(b & z_mask)} |b ^ x_mask>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMask {
    pub x_mask: usize,
    pub z_mask: usize,
    pub n_y: u32,
}

impl PauliMask {
    pub fn from_ops(ops: &[Pauli]) -> Self {
        let mut x_mask = 0;
        let mut z_mask = 0;
        let mut n_y = 0;
        for (q, op) in ops.iter().enumerate() {
            match op {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::Y => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    n_y += 1;
                }
            }
        }
        Self {
            x_mask,
            z_mask,
            n_y,
        }
    }

    /// Global factor `i^{n_y}`.
    pub fn y_phase(&self) -> Complex64 {
        match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `out = P * amps`.
    pub fn apply_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        let phase = self.y_phase();
        for (b, &a) in amps.iter().enumerate() {
            let sign = if (b & self.z_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out[b ^ self.x_mask] = phase * a * sign;
        }
    }

    /// `<amps| P |amps>`; real for Hermitian `P`.
    pub fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        let phase = self.y_phase();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &a) in amps.iter().enumerate() {
            let sign = if (b & self.z_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            acc += amps[b ^ self.x_mask].conj() * a * sign;
        }
        acc * phase
    }
}

/// Weighted tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    ops: Vec<Pauli>,
    coeff: f64,
    mask: PauliMask,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>, coeff: f64) -> Result<Self, SimError> {
        if !coeff.is_finite() {
            return Err(SimError::NonFiniteCoefficient(coeff));
        }
        if ops.is_empty() || ops.len() > crate::simulator::MAX_QUBITS {
            return Err(SimError::InvalidQubitCount(ops.len()));
        }
        let mask = PauliMask::from_ops(&ops);
        Ok(Self { ops, coeff, mask })
    }

    /// Places `op` on each listed qubit and identity elsewhere.
    pub fn on_qubits(n_qubits: usize, sites: &[(usize, Pauli)], coeff: f64) -> Result<Self, SimError> {
        let mut ops = vec![Pauli::I; n_qubits];
        for &(q, op) in sites {
            if q >= n_qubits {
                return Err(SimError::QubitOutOfRange { qubit: q, n_qubits });
            }
            ops[q] = op;
        }
        Self::new(ops, coeff)
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn mask(&self) -> PauliMask {
        self.mask
    }

    /// The single non-identity basis of this string, `None` for the identity,
    /// or an error if the string mixes bases.
    pub fn basis(&self) -> Result<Option<Pauli>, SimError> {
        let mut basis = None;
        for &op in &self.ops {
            if op == Pauli::I {
                continue;
            }
            match basis {
                None => basis = Some(op),
                Some(b) if b == op => {}
                Some(_) => return Err(SimError::MixedBasis(self.to_string())),
            }
        }
        Ok(basis)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}*", self.coeff)?;
        for op in &self.ops {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

/// Commuting measurement group: all terms are diagonal in `basis` on every qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorGroup {
    pub basis: Pauli,
    pub terms: Vec<usize>,
}

/// Hamiltonian as a weighted sum of Pauli strings, partitioned into operator
/// groups that share one single-qubit measurement basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
    groups: Vec<OperatorGroup>,
}

impl PauliHamiltonian {
    /// Groups terms by their Pauli basis (X, Y, Z order). Identity strings join
    /// the Z group. Terms with a zero coefficient are dropped.
    pub fn new(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > crate::simulator::MAX_QUBITS {
            return Err(SimError::InvalidQubitCount(n_qubits));
        }
        let terms: Vec<PauliString> = terms.into_iter().filter(|t| t.coeff != 0.0).collect();
        let mut groups: Vec<OperatorGroup> = Vec::new();
        for (i, term) in terms.iter().enumerate() {
            if term.n_qubits() != n_qubits {
                return Err(SimError::DimensionMismatch {
                    expected: n_qubits,
                    found: term.n_qubits(),
                });
            }
            let basis = term.basis()?.unwrap_or(Pauli::Z);
            match groups.iter_mut().find(|g| g.basis == basis) {
                Some(g) => g.terms.push(i),
                None => groups.push(OperatorGroup {
                    basis,
                    terms: vec![i],
                }),
            }
        }
        let rank = |p: Pauli| match p {
            Pauli::X => 0,
            Pauli::Y => 1,
            _ => 2,
        };
        groups.sort_by_key(|g| rank(g.basis));
        Ok(Self {
            n_qubits,
            terms,
            groups,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn groups(&self) -> &[OperatorGroup] {
        &self.groups
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

/// Heisenberg chain with open boundaries:
/// `H = -sum_i [ sum_j J_i s_j^i s_{j+1}^i + sum_j h_i s_j^i ]`, `i in {X, Y, Z}`.
pub fn build_heisenberg(q: usize, j: [f64; 3], h: [f64; 3]) -> Result<PauliHamiltonian, SimError> {
    if !(2..=crate::simulator::MAX_QUBITS).contains(&q) {
        return Err(SimError::InvalidQubitCount(q));
    }
    let bases = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut terms = Vec::new();
    for (axis, &op) in bases.iter().enumerate() {
        if j[axis] != 0.0 {
            for site in 0..q - 1 {
                terms.push(PauliString::on_qubits(q, &[(site, op), (site + 1, op)], -j[axis])?);
            }
        }
        if h[axis] != 0.0 {
            for site in 0..q {
                terms.push(PauliString::on_qubits(q, &[(site, op)], -h[axis])?);
            }
        }
    }
    PauliHamiltonian::new(q, terms)
}

/// Critical transverse-field Ising point of the Heisenberg family.
pub fn build_ising_critical(q: usize) -> Result<PauliHamiltonian, SimError> {
    build_heisenberg(q, [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0])
}
