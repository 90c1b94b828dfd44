//! Row-major `[[ [re, im], ... ], ...]` encoding of dense complex matrices.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::CMatrix;
use crate::error::{Error, Result};

/// Converts a matrix to nested rows of `[re, im]` pairs.
pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Parses nested rows of `[re, im]` pairs into a square matrix.
pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is not square: {n} rows but a row of length {}",
            bad.len()
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::DimensionMismatch(
            "matrix has non-finite entries".into(),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_rows(m).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
    let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
    from_rows(&rows).map_err(serde::de::Error::custom)
}
