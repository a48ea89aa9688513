use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{QStateError, QuantumState};
use crate::bits::Basis;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn real(rows: usize, data: &[f64]) -> DMatrix<C64> {
    DMatrix::from_row_iterator(rows, rows, data.iter().map(|&v| C64::new(v, 0.0)))
}

pub fn identity(qubits: usize) -> DMatrix<C64> {
    DMatrix::identity(1 << qubits, 1 << qubits)
}

pub fn hadamard() -> DMatrix<C64> {
    real(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
}

pub fn pauli_x() -> DMatrix<C64> {
    real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> DMatrix<C64> {
    real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Control is the first target, target the second.
pub fn cnot() -> DMatrix<C64> {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

/// `|bit⟩_basis` as a column of amplitudes.
pub fn basis_vector(bit: u8, basis: Basis) -> [C64; 2] {
    match (basis, bit) {
        (Basis::Computational, 0) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        (Basis::Computational, _) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        (Basis::Hadamard, 0) => [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)],
        (Basis::Hadamard, _) => [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)],
    }
}

/// Rank-one projector onto `|bit⟩_basis`.
pub fn projector(bit: u8, basis: Basis) -> DMatrix<C64> {
    let v = basis_vector(bit, basis);
    DMatrix::from_fn(2, 2, |r, c| v[r] * v[c].conj())
}

/// `(|00⟩ + |11⟩)/√2` on the two given labels.
pub fn epr_pair(first: &str, second: &str) -> Result<QuantumState, QStateError> {
    let h = FRAC_1_SQRT_2;
    QuantumState::pure(
        vec![first.to_string(), second.to_string()],
        vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
    )
}
