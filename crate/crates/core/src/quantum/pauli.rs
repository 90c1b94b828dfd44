//! Single-qubit Pauli matrices and a few two-qubit states.

use num_complex::Complex64;

use super::linalg::CMatrix;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet_vector() -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]
}

/// `|ψ⁻⟩⟨ψ⁻|`.
pub fn singlet_projector() -> CMatrix {
    let v = nalgebra::DVector::from_vec(singlet_vector());
    &v * v.adjoint()
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `k` qubits.
pub fn ghz_vector(k: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); 1 << k];
    v[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[(1 << k) - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v
}
