use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::linalg::{self, CMatrix};
use crate::quantum::spectrum::{lanczos_ground_state, LanczosConfig, LinearOperator};
use crate::quantum::{free_energy, HermitianOperator, SiteSystem, MAX_DENSE_DIM};

/// Largest dimension for which ground energies use dense diagonalisation.
pub const DENSE_GROUND_LIMIT: usize = 256;

/// A sum of few-site Hermitian terms on a site system.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHamiltonian {
    system: SiteSystem,
    terms: Vec<HermitianOperator>,
}

impl LocalHamiltonian {
    /// Each term lives on its own support, which must be a nonempty subset of
    /// `system` with matching local dimensions. Repeated supports are summed.
    pub fn new(system: SiteSystem, terms: Vec<HermitianOperator>) -> Result<Self> {
        for t in &terms {
            if t.sites().is_empty() {
                return Err(Error::InvalidHamiltonian("term with empty support".into()));
            }
            for (&s, &d) in t.sites().iter().zip(t.system().dims()) {
                match system.local_dim(s) {
                    None => return Err(Error::NotASubset(vec![s])),
                    Some(d0) if d0 != d => {
                        return Err(Error::DimensionMismatch(format!("site {s}: {d} vs {d0}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(LocalHamiltonian { system, terms })
    }

    pub fn system(&self) -> &SiteSystem {
        &self.system
    }

    pub fn terms(&self) -> &[HermitianOperator] {
        &self.terms
    }

    pub fn n_sites(&self) -> usize {
        self.system.len()
    }

    /// The full matrix `Σ h_A ⊗ I`.
    pub fn to_dense(&self) -> Result<HermitianOperator> {
        let dim = self.system.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::DimensionBudget {
                dim,
                budget: MAX_DENSE_DIM,
            });
        }
        let mut total = HermitianOperator::zeros(self.system.clone());
        for t in &self.terms {
            total = total.add(&t.embed(&self.system)?)?;
        }
        Ok(total)
    }

    /// Smallest eigenvalue: dense diagonalisation up to dimension
    /// [`DENSE_GROUND_LIMIT`], otherwise matrix-free Lanczos with a residual
    /// certificate.
    pub fn ground_energy(&self) -> Result<f64> {
        if self.system.dim() <= DENSE_GROUND_LIMIT {
            Ok(linalg::eigvalsh_min(self.to_dense()?.matrix()))
        } else {
            let op = MatrixFree::new(self)?;
            Ok(lanczos_ground_state(&op, &LanczosConfig::default())?.value)
        }
    }

    /// Free energy in bits at temperature `t` from the dense spectrum.
    pub fn free_energy(&self, t: f64) -> Result<f64> {
        Ok(free_energy(&self.to_dense()?, t))
    }
}

/// One term prepared for blocked application. Indices whose digits on the
/// term's legs are all zero ("bases") come in contiguous runs; every nonzero
/// `(row, column, value)` of the local matrix then acts on a run as one
/// shifted axpy.
struct PreparedTerm {
    /// `(stride, dim)` of each leg, largest stride first.
    legs: Vec<(usize, usize)>,
    /// Nonzero entries as `(row offset, column offset, value)`.
    entries: Vec<(usize, usize, Complex64)>,
}

impl PreparedTerm {
    /// Size of the aligned index blocks that the term never couples across.
    fn block(&self) -> usize {
        self.legs[0].0 * self.legs[0].1
    }

    /// Calls `f(start, len)` for every run of bases inside `[start, start + len)`.
    fn runs(legs: &[(usize, usize)], start: usize, len: usize, f: &mut dyn FnMut(usize, usize)) {
        match legs.split_first() {
            None => f(start, len),
            Some((&(s, d), rest)) => {
                for blk in (start..start + len).step_by(s * d) {
                    Self::runs(rest, blk, s, f);
                }
            }
        }
    }

    fn apply_block(&self, x: &[Complex64], y: &mut [Complex64]) {
        Self::runs(&self.legs, 0, x.len(), &mut |start, len| {
            for &(ro, co, v) in &self.entries {
                let ys = &mut y[start + ro..start + ro + len];
                let xs = &x[start + co..start + co + len];
                for (yi, xi) in ys.iter_mut().zip(xs) {
                    *yi += v * xi;
                }
            }
        });
    }
}

/// Matrix-free application of a [`LocalHamiltonian`] on full state vectors.
pub struct MatrixFree {
    dim: usize,
    terms: Vec<PreparedTerm>,
}

impl MatrixFree {
    pub fn new(h: &LocalHamiltonian) -> Result<Self> {
        let dims = h.system.dims();
        let n = dims.len();
        let mut strides = vec![1usize; n];
        for p in (0..n.saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * dims[p + 1];
        }
        let mut terms = Vec::with_capacity(h.terms.len());
        for t in &h.terms {
            let positions = h.system.positions(t.sites())?;
            let tdims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
            let tstrides: Vec<usize> = positions.iter().map(|&p| strides[p]).collect();
            let local_dim: usize = tdims.iter().product();
            let local_offsets: Vec<usize> = (0..local_dim)
                .map(|c| {
                    let mut rem = c;
                    let mut off = 0;
                    for k in (0..tdims.len()).rev() {
                        off += (rem % tdims[k]) * tstrides[k];
                        rem /= tdims[k];
                    }
                    off
                })
                .collect();
            let m = t.matrix();
            let entries = (0..local_dim)
                .flat_map(|a| (0..local_dim).map(move |c| (a, c)))
                .filter(|&(a, c)| m[(a, c)].norm() > 0.0)
                .map(|(a, c)| (local_offsets[a], local_offsets[c], m[(a, c)]))
                .collect();
            let mut legs: Vec<(usize, usize)> = tstrides.into_iter().zip(tdims).collect();
            legs.sort_unstable_by_key(|l| std::cmp::Reverse(l.0));
            terms.push(PreparedTerm { legs, entries });
        }
        Ok(MatrixFree {
            dim: h.system.dim(),
            terms,
        })
    }
}

impl LinearOperator for MatrixFree {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let block = t.block();
            y.par_chunks_mut(block)
                .zip(x.par_chunks(block))
                .for_each(|(yb, xb)| t.apply_block(xb, yb));
        }
    }
}

/// Dense check matrix of a matrix-free operator (for tests on small systems).
pub fn materialize(op: &dyn LinearOperator) -> CMatrix {
    let n = op.dim();
    let mut out = CMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        for i in 0..n {
            out[(i, j)] = col[i];
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    out
}
