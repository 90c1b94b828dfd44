//! Index tables that realise partial traces, their adjoints, and leg
//! permutations on raw dense matrices.

use super::linalg::CMatrix;
use num_complex::Complex64;

/// Maps a matrix over legs with dimensions `dims` to the ordered leg subset
/// `keep` by tracing out the remaining legs.
///
/// `table[r * kept_dim + k]` is the full basis index whose kept digits encode
/// `k` and whose traced digits encode `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegMap {
    full_dim: usize,
    kept_dim: usize,
    rest_dim: usize,
    table: Vec<usize>,
}

impl LegMap {
    /// `keep` lists leg positions (indices into `dims`) in the output order.
    ///
    /// # Panics
    /// If a position is out of range or repeated.
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let n = dims.len();
        let mut is_kept = vec![false; n];
        for &p in keep {
            assert!(
                p < n && !is_kept[p],
                "invalid leg selection {keep:?} for {n} legs"
            );
            is_kept[p] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&p| !is_kept[p]).collect();
        let full_dim: usize = dims.iter().product();
        let kept_dim: usize = keep.iter().map(|&p| dims[p]).product();
        let rest_dim = full_dim / kept_dim;

        let mut strides = vec![1usize; n];
        for p in (0..n.saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * dims[p + 1];
        }
        let mut table = vec![0usize; full_dim];
        let mut digits = vec![0usize; n];
        for idx in 0..full_dim {
            let mut rem = idx;
            for p in 0..n {
                digits[p] = rem / strides[p];
                rem %= strides[p];
            }
            let k = keep.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
            let r = rest.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
            table[r * kept_dim + k] = idx;
        }
        LegMap {
            full_dim,
            kept_dim,
            rest_dim,
            table,
        }
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn kept_dim(&self) -> usize {
        self.kept_dim
    }

    fn row(&self, r: usize) -> &[usize] {
        &self.table[r * self.kept_dim..(r + 1) * self.kept_dim]
    }

    /// Partial trace onto the kept legs (in the kept order).
    pub fn reduce(&self, m: &CMatrix) -> CMatrix {
        debug_assert_eq!(m.nrows(), self.full_dim);
        let kd = self.kept_dim;
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..self.rest_dim {
            let row = self.row(r);
            for (b, &jb) in row.iter().enumerate() {
                let col = m.column(jb);
                for (a, &ia) in row.iter().enumerate() {
                    out[(a, b)] += col[ia];
                }
            }
        }
        out
    }

    /// Adds `scale · (y ⊗ I_rest)` into `out` (the adjoint of [`reduce`](Self::reduce)).
    pub fn embed_add(&self, y: &CMatrix, scale: f64, out: &mut CMatrix) {
        debug_assert_eq!(y.nrows(), self.kept_dim);
        for r in 0..self.rest_dim {
            let row = self.row(r);
            for (b, &jb) in row.iter().enumerate() {
                for (a, &ia) in row.iter().enumerate() {
                    out[(ia, jb)] += y[(a, b)] * scale;
                }
            }
        }
    }

    /// `y ⊗ I_rest` in the full leg order.
    pub fn embed(&self, y: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.full_dim, self.full_dim);
        self.embed_add(y, 1.0, &mut out);
        out
    }

    /// For a map that keeps every leg: reorders `m` so its legs follow `keep`.
    pub fn permute(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(self.rest_dim, 1, "permute requires a map keeping all legs");
        let t = &self.table;
        CMatrix::from_fn(self.full_dim, self.full_dim, |a, b| m[(t[a], t[b])])
    }

    /// Inverse of [`permute`](Self::permute).
    pub fn unpermute(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(
            self.rest_dim, 1,
            "unpermute requires a map keeping all legs"
        );
        let mut out = CMatrix::from_element(self.full_dim, self.full_dim, Complex64::new(0.0, 0.0));
        for (a, &ia) in self.table.iter().enumerate() {
            for (b, &jb) in self.table.iter().enumerate() {
                out[(ia, jb)] = m[(a, b)];
            }
        }
        out
    }
}
