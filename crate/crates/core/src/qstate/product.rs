//! Product-state fast path.
//!
//! Honest BB84 traffic is a product of single-qubit pure states, so a string
//! of any length can be carried qubit by qubit without a `2^n` vector. Only
//! registers that become jointly stored or entangled go through
//! [`QuantumState`].

use num_complex::Complex64 as C64;
use rand::Rng;

use super::{gates, QStateError, QuantumState};
use crate::bits::{Basis, BasisString, BitString};

/// A single-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit {
    pub amp: [C64; 2],
}

impl Qubit {
    pub fn bb84(bit: u8, basis: Basis) -> Self {
        Self { amp: gates::basis_vector(bit, basis) }
    }

    /// Born probability of reading `bit` in `basis`.
    pub fn probability(&self, bit: u8, basis: Basis) -> f64 {
        let v = gates::basis_vector(bit, basis);
        (v[0].conj() * self.amp[0] + v[1].conj() * self.amp[1]).norm_sqr()
    }

    /// Measures in `basis`; the qubit collapses to the observed basis vector.
    pub fn measure<R: Rng + ?Sized>(&mut self, basis: Basis, rng: &mut R) -> u8 {
        let p0 = self.probability(0, basis);
        let bit = if rng.gen::<f64>() < p0 { 0 } else { 1 };
        *self = Qubit::bb84(bit, basis);
        bit
    }

    pub fn to_state(&self, label: &str) -> QuantumState {
        QuantumState::pure(vec![label.to_string()], self.amp.to_vec())
            .expect("single qubit amplitudes are normalized")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    qubits: Vec<Qubit>,
}

impl ProductState {
    pub fn new(qubits: Vec<Qubit>) -> Self {
        Self { qubits }
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubit(&self, i: usize) -> &Qubit {
        &self.qubits[i]
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn into_qubits(self) -> Vec<Qubit> {
        self.qubits
    }

    /// Measures every qubit in its basis from `bases`.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        bases: &BasisString,
        rng: &mut R,
    ) -> Result<BitString, QStateError> {
        if bases.len() != self.len() {
            return Err(QStateError::LengthMismatch { expected: self.len(), got: bases.len() });
        }
        let bits = self
            .qubits
            .iter_mut()
            .zip(bases.iter())
            .map(|(q, b)| q.measure(b, rng))
            .collect();
        Ok(BitString::new(bits).expect("measurement outcomes are bits"))
    }

    /// Dense form with labels `q0..`, refused above `max_qubits`.
    pub fn to_dense(&self, max_qubits: usize) -> Result<QuantumState, QStateError> {
        if self.len() > max_qubits {
            return Err(QStateError::TooManyQubits { requested: self.len(), max: max_qubits });
        }
        let mut state = QuantumState::empty();
        for (i, q) in self.qubits.iter().enumerate() {
            state = state.tensor(&q.to_state(&format!("q{i}")))?;
        }
        Ok(state)
    }
}

/// `|x⟩_b` as a product of single qubits; no size cap.
pub fn encode_bb84_product(x: &BitString, b: &BasisString) -> Result<ProductState, QStateError> {
    if x.len() != b.len() {
        return Err(QStateError::LengthMismatch { expected: x.len(), got: b.len() });
    }
    Ok(ProductState::new(x.iter().zip(b.iter()).map(|(bit, basis)| Qubit::bb84(bit, basis)).collect()))
}
