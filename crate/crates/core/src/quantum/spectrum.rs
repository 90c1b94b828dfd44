//! Smallest eigenvalues: dense for small operators, restarted Lanczos with a
//! residual certificate above [`DENSE_EIG_LIMIT`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::linalg::{self, CMatrix};
use super::operator::HermitianOperator;
use crate::error::{Error, Result};

/// Largest dimension diagonalised densely.
pub const DENSE_EIG_LIMIT: usize = 1 << 12;

/// A Hermitian operator applied without materialising its matrix.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// Writes `A x` into `y`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// Dense Hermitian matrices as linear operators (row `i` is the conjugate of
/// column `i`, which keeps access contiguous in column-major storage).
impl LinearOperator for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = self
                .column(i)
                .iter()
                .zip(x)
                .map(|(a, b)| a.conj() * b)
                .sum();
        });
    }
}

impl LinearOperator for HermitianOperator {
    fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matrix().apply(x, y)
    }
}

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    /// Required residual `‖Av − λv‖` of the returned unit vector.
    pub tol: f64,
    /// Krylov steps per restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: 1e-8,
            krylov_dim: 120,
            max_restarts: 60,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub matvecs: usize,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.par_iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.par_iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(a: &mut [Complex64], s: f64) {
    a.par_iter_mut().for_each(|x| *x *= s);
}

/// Lowest Ritz pair of the symmetric tridiagonal matrix (alpha, beta).
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (imin, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    (
        theta,
        eig.eigenvectors.column(imin).iter().copied().collect(),
    )
}

/// Ground state of `op` by explicitly restarted Lanczos.
///
/// Each cycle runs the three-term recurrence twice: once to build the
/// tridiagonal matrix and once more to assemble the Ritz vector, so only a few
/// vectors of length `dim` are held. The Ritz vector restarts the next cycle.
/// Success requires the true residual of the returned vector to meet `tol`.
pub fn lanczos_ground_state(op: &dyn LinearOperator, cfg: &LanczosConfig) -> Result<LanczosResult> {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let nx = norm(&x);
    scale(&mut x, 1.0 / nx);

    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut v_prev = vec![Complex64::new(0.0, 0.0); n];
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    let kmax = cfg.krylov_dim.min(n).max(1);

    for _restart in 0..cfg.max_restarts {
        // Pass 1: tridiagonalisation.
        let mut alpha = Vec::with_capacity(kmax);
        let mut beta: Vec<f64> = Vec::with_capacity(kmax);
        let mut v = x.clone();
        v_prev
            .iter_mut()
            .for_each(|z| *z = Complex64::new(0.0, 0.0));
        let mut ritz = (0.0, vec![1.0]);
        for j in 0..kmax {
            op.apply(&v, &mut w);
            matvecs += 1;
            let a = dot(&v, &w).re;
            let b_prev = if j > 0 { beta[j - 1] } else { 0.0 };
            w.par_iter_mut()
                .zip(v.par_iter().zip(v_prev.par_iter()))
                .for_each(|(wi, (vi, pi))| *wi -= vi * a + pi * b_prev);
            alpha.push(a);
            let b = norm(&w);
            let converged_estimate = if (j + 1) % 10 == 0 || j + 1 == kmax || b < 1e-13 {
                ritz = lowest_ritz(&alpha, &beta);
                (b * ritz.1[j]).abs() < 0.1 * cfg.tol
            } else {
                false
            };
            if b < 1e-13 || converged_estimate || j + 1 == kmax {
                break;
            }
            beta.push(b);
            std::mem::swap(&mut v_prev, &mut v);
            v.par_iter_mut()
                .zip(w.par_iter())
                .for_each(|(vi, wi)| *vi = wi / b);
        }
        let steps = alpha.len();
        if ritz.1.len() != steps {
            ritz = lowest_ritz(&alpha, &beta);
        }
        let s = ritz.1;

        // Pass 2: rebuild the Lanczos vectors and accumulate the Ritz vector.
        let mut v = x.clone();
        v_prev
            .iter_mut()
            .for_each(|z| *z = Complex64::new(0.0, 0.0));
        let mut acc: Vec<Complex64> = v.iter().map(|z| z * s[0]).collect();
        for j in 0..steps.saturating_sub(1) {
            op.apply(&v, &mut w);
            matvecs += 1;
            let (a, b_prev, b) = (alpha[j], if j > 0 { beta[j - 1] } else { 0.0 }, beta[j]);
            w.par_iter_mut()
                .zip(v.par_iter().zip(v_prev.par_iter()))
                .for_each(|(wi, (vi, pi))| *wi = (*wi - vi * a - pi * b_prev) / b);
            std::mem::swap(&mut v_prev, &mut v);
            std::mem::swap(&mut v, &mut w);
            let sj = s[j + 1];
            acc.par_iter_mut()
                .zip(v.par_iter())
                .for_each(|(ai, vi)| *ai += vi * sj);
        }
        let na = norm(&acc);
        scale(&mut acc, 1.0 / na);
        x = acc;

        // Certificate: true residual of the normalised Ritz vector.
        op.apply(&x, &mut w);
        matvecs += 1;
        let theta = dot(&x, &w).re;
        let residual = w
            .par_iter()
            .zip(x.par_iter())
            .map(|(wi, xi)| (wi - xi * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= cfg.tol {
            return Ok(LanczosResult {
                value: theta,
                vector: x,
                residual,
                matvecs,
            });
        }
    }
    Err(Error::LanczosNotConverged {
        restarts: cfg.max_restarts,
        residual: last_residual,
    })
}

/// Smallest eigenvalue: dense up to [`DENSE_EIG_LIMIT`], certified Lanczos above.
pub fn min_eigenvalue(h: &HermitianOperator) -> Result<f64> {
    if h.dim() <= DENSE_EIG_LIMIT {
        Ok(linalg::eigvalsh_min(h.matrix()))
    } else {
        Ok(lanczos_ground_state(h, &LanczosConfig::default())?.value)
    }
}
