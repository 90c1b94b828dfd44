//! Dense Hermitian kernels shared by the operator types and the solver.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix, column-major.
pub type CMatrix = DMatrix<Complex64>;

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// Reassembles `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let weights: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        reassemble(&self.vectors, &weights)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    if n == 1 {
        return Eigh {
            values: vec![m[(0, 0)].re],
            vectors: CMatrix::identity(1, 1),
        };
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// Smallest eigenvalue of the Hermitian part of `m` (dense).
pub fn eigvalsh_min(m: &CMatrix) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].re;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// All eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `V diag(w) V†`.
pub fn reassemble(vectors: &CMatrix, weights: &[f64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    let mut out = &scaled * vectors.adjoint();
    hermitize(&mut out);
    out
}

/// Replaces `m` by `(m + m†)/2` in place.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// Largest absolute deviation of `m` from its conjugate transpose.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `Re Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

/// Frobenius inner product `Re Tr[a† b]`.
pub fn frobenius_dot(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Numerically stable `ln Σ exp(x_i)`.
pub fn log_sum_exp(x: &[f64]) -> f64 {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + x.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_sorts_and_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 0.0),
                c(0.0, -1.0),
                c(2.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(-1.0, 0.0),
            ],
        );
        let e = eigh(&m);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let back = e.map(|x| x);
        assert!((back - &m).norm() < 1e-12);
        assert!((eigvalsh_min(&m) - e.min()).abs() < 1e-12);
    }

    #[test]
    fn trace_product_matches_matrix_product() {
        let a = CMatrix::from_fn(4, 4, |i, j| c((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let b = CMatrix::from_fn(4, 4, |i, j| c((i * j) as f64 * 0.3, 1.0 + i as f64));
        assert!((trace_product(&a, &b) - (&a * &b).trace().re).abs() < 1e-10);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_sum_exp(&[0.0, 2f64.ln()]) - 3f64.ln()).abs() < 1e-14);
    }
}
