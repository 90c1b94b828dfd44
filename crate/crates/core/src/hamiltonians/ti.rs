//! Translation-invariant nearest-neighbour chains and their ring ground-state
//! energy densities.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::local::LocalHamiltonian;
use crate::error::{Error, Result};
use crate::quantum::linalg::CMatrix;
use crate::quantum::pauli;
use crate::quantum::{HermitianOperator, SiteSystem};

/// The two-site interaction `h` of a translation-invariant chain, stored on
/// sites 1 (left) and 2 (right).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TIChainTerm {
    local_dim: usize,
    h: HermitianOperator,
}

impl TIChainTerm {
    /// `matrix` acts on `ℂ^d ⊗ ℂ^d`, left site first.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || d < 2 {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} is not a two-site operator"
            )));
        }
        let h = HermitianOperator::new(SiteSystem::uniform(&[1, 2], d)?, matrix)?;
        Ok(TIChainTerm { local_dim: d, h })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn h(&self) -> &HermitianOperator {
        &self.h
    }

    /// The interaction placed on sites `(left, right)` (legs in that order).
    pub fn on_bond(&self, left: usize, right: usize) -> Result<HermitianOperator> {
        HermitianOperator::from_legs(
            &[left, right],
            &[self.local_dim; 2],
            self.h.matrix().clone(),
        )
    }

    /// Periodic ring on sites `1..=m` with bonds `(i, i+1 mod m)`.
    pub fn ring(&self, m: usize) -> Result<LocalHamiltonian> {
        if m < 2 {
            return Err(Error::InvalidHamiltonian(format!("ring of {m} sites")));
        }
        let sites: Vec<usize> = (1..=m).collect();
        let system = SiteSystem::matrix_free(sites, vec![self.local_dim; m])?;
        let terms = (1..=m)
            .map(|i| self.on_bond(i, i % m + 1))
            .collect::<Result<Vec<_>>>()?;
        LocalHamiltonian::new(system, terms)
    }
}

/// `h = −σx⊗σx − σy⊗σy − Δ σz⊗σz`.
pub fn build_xxz(delta: f64) -> TIChainTerm {
    let m = -(pauli::x().kronecker(&pauli::x()))
        - pauli::y().kronecker(&pauli::y())
        - pauli::z().kronecker(&pauli::z()) * Complex64::new(delta, 0.0);
    TIChainTerm::new(m).expect("XXZ term is Hermitian")
}

/// Largest ring handled by the exact-diagonalisation oracle.
pub const MAX_RING_SITES: usize = 24;

/// `λ_min(H_ring(m)) / m` for the periodic ring of `m` sites.
pub fn ti_ground_energy_density(term: &TIChainTerm, m: usize) -> Result<f64> {
    if !(2..=MAX_RING_SITES).contains(&m) {
        return Err(Error::InvalidHamiltonian(format!(
            "ring size {m} outside 2..={MAX_RING_SITES}"
        )));
    }
    Ok(term.ring(m)?.ground_energy()? / m as f64)
}

/// Extrapolated infinite-chain energy density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDensityExtrapolation {
    pub e0: f64,
    pub ring_sizes: Vec<usize>,
    pub densities: Vec<f64>,
}

/// Ring sizes used for the default extrapolation.
pub const EXTRAPOLATION_RINGS: [usize; 3] = [12, 16, 20];

/// Fits `e(m) = e0 + b/m² + c/m⁴` through three ring densities and returns
/// `e0`. Periodic rings of critical chains approach the limit as `1/m²`, and
/// ring sizes of equal parity mod 4 avoid sublattice oscillations.
pub fn extrapolate_energy_density(
    term: &TIChainTerm,
    ring_sizes: [usize; 3],
) -> Result<EnergyDensityExtrapolation> {
    let densities = ring_sizes
        .par_iter()
        .map(|&m| ti_ground_energy_density(term, m))
        .collect::<Result<Vec<f64>>>()?;
    let a = Matrix3::from_fn(|i, j| (ring_sizes[i] as f64).powi(-2 * j as i32));
    let coef = a
        .lu()
        .solve(&Vector3::new(densities[0], densities[1], densities[2]))
        .ok_or_else(|| Error::InvalidHamiltonian("degenerate ring sizes".into()))?;
    Ok(EnergyDensityExtrapolation {
        e0: coef[0],
        ring_sizes: ring_sizes.to_vec(),
        densities,
    })
}
