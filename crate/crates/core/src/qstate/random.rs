//! Random states and unitaries for property tests and side-information models.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::{QStateError, QuantumState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; u1 is kept away from zero.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state on `labels`.
pub fn random_pure<R: Rng + ?Sized>(labels: Vec<String>, rng: &mut R) -> Result<QuantumState, QStateError> {
    let dim = 1usize << labels.len();
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    QuantumState::pure(labels, v.into_iter().map(|a| a / norm).collect())
}

/// Random density matrix `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_mixed<R: Rng + ?Sized>(labels: Vec<String>, rng: &mut R) -> Result<QuantumState, QStateError> {
    let dim = 1usize << labels.len();
    QuantumState::mixed(labels, random_density_matrix(dim, rng))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}
