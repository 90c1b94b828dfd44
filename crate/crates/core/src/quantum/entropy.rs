//! Von Neumann and conditional entropies in bits, and the analytic gradient
//! of the conditional entropy.
//!
//! The entropy base is 2 throughout: a maximally entangled qubit pair has
//! `S(A|B) = −1`, and binary entropies are measured in bits.

use std::f64::consts::LN_2;

use super::linalg::{self, CMatrix};
use super::operator::{Bipartition, DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Default eigenvalue floor for logarithms of density matrices.
pub const DEFAULT_EIG_FLOOR: f64 = 1e-12;

/// Shannon entropy in bits of a probability vector; nonpositive entries
/// contribute nothing (`0 log 0 = 0`, round-off negatives ignored).
pub fn shannon_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits(&[p, 1.0 - p])
}

/// `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_matrix(rho.matrix())
}

pub(crate) fn entropy_of_matrix(m: &CMatrix) -> f64 {
    shannon_bits(&linalg::eigvalsh(m))
}

/// `S(A|B) = S(AB) − S(B)`.
///
/// If `A ∪ B` is a strict subset of the state's sites the entropies are taken
/// on the corresponding marginal.
pub fn conditional_entropy(rho: &DensityMatrix, part: &Bipartition) -> Result<f64> {
    let ab = part.union();
    let rho_ab = if ab.len() == rho.sites().len() {
        check_covers(rho, &ab)?;
        rho.clone()
    } else {
        rho.marginal(&ab)?
    };
    let s_ab = von_neumann_entropy(&rho_ab);
    let s_b = if part.part_b().is_empty() {
        0.0
    } else {
        von_neumann_entropy(&rho_ab.marginal(part.part_b())?)
    };
    Ok(s_ab - s_b)
}

fn check_covers(rho: &DensityMatrix, sites: &[usize]) -> Result<()> {
    let missing: Vec<usize> = sites
        .iter()
        .copied()
        .filter(|&s| !rho.system().contains(s))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::NotASubset(missing))
    }
}

/// Treatment of eigenvalues below a floor when taking matrix logarithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenFloor {
    /// Fail if an eigenvalue lies below the floor.
    Strict(f64),
    /// Replace eigenvalues below the floor by the floor. The induced entropy
    /// error is at most `dim · floor · log₂(1/floor)`.
    Clamp(f64),
}

impl Default for EigenFloor {
    fn default() -> Self {
        EigenFloor::Strict(DEFAULT_EIG_FLOOR)
    }
}

/// `log₂ m` for a positive semidefinite matrix, subject to `floor`.
pub fn log2_psd(m: &CMatrix, floor: EigenFloor) -> Result<CMatrix> {
    let e = linalg::eigh(m);
    let (f, strict) = match floor {
        EigenFloor::Strict(f) => (f, true),
        EigenFloor::Clamp(f) => (f, false),
    };
    if strict && e.min() < f {
        return Err(Error::SingularState {
            min_eigenvalue: e.min(),
            floor: f,
        });
    }
    Ok(e.map(|x| x.max(f).ln() / LN_2))
}

/// Gradient of `ρ ↦ S(A|B)_ρ`: `−log₂ ρ_AB + I_A ⊗ log₂ ρ_B`, embedded into the
/// full system of `rho` when `A ∪ B` is a strict subset.
///
/// The additive `1/ln 2` constants of the two entropy gradients cancel.
pub fn conditional_entropy_gradient(
    rho: &DensityMatrix,
    part: &Bipartition,
    floor: EigenFloor,
) -> Result<HermitianOperator> {
    let ab = part.union();
    check_covers(rho, &ab)?;
    let rho_ab = rho.marginal(&ab)?;
    let mut g = -log2_psd(rho_ab.matrix(), floor)?;
    if !part.part_b().is_empty() {
        let rho_b = rho_ab.marginal(part.part_b())?;
        let log_b = HermitianOperator::from_parts_unchecked(
            rho_b.system().clone(),
            log2_psd(rho_b.matrix(), floor)?,
        );
        g += log_b.embed(rho_ab.system())?.matrix();
    }
    let g = HermitianOperator::from_parts_unchecked(rho_ab.system().clone(), g);
    g.embed(rho.system())
}
