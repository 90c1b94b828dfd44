use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::legs::LegMap;
use super::linalg::{self, CMatrix, Eigh};
use super::system::SiteSystem;
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalue and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// A dense Hermitian matrix on a [`SiteSystem`], legs in ascending site order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct HermitianOperator {
    system: SiteSystem,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawOperator {
    system: SiteSystem,
    #[serde(with = "super::matrix_json")]
    matrix: CMatrix,
}

impl TryFrom<RawOperator> for HermitianOperator {
    type Error = Error;
    fn try_from(raw: RawOperator) -> Result<Self> {
        HermitianOperator::new(raw.system, raw.matrix)
    }
}

impl From<HermitianOperator> for RawOperator {
    fn from(op: HermitianOperator) -> Self {
        RawOperator {
            system: op.system,
            matrix: op.matrix,
        }
    }
}

impl HermitianOperator {
    /// Wraps `matrix` (legs in the system's canonical order) after checking
    /// shape and Hermiticity; the stored matrix is exactly Hermitian.
    pub fn new(system: SiteSystem, mut matrix: CMatrix) -> Result<Self> {
        let d = system.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "system of dimension {d} but matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = linalg::hermiticity_deviation(&matrix);
        let tolerance = HERMITIAN_TOL * linalg::max_abs(&matrix);
        if deviation > tolerance || !deviation.is_finite() {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        linalg::hermitize(&mut matrix);
        Ok(HermitianOperator { system, matrix })
    }

    /// Builds an operator from a matrix whose tensor legs follow the order of
    /// `sites` (not necessarily ascending), permuting to canonical order.
    pub fn from_legs(sites: &[usize], dims: &[usize], matrix: CMatrix) -> Result<Self> {
        let system = SiteSystem::new(sites.to_vec(), dims.to_vec())?;
        let d = system.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "legs of dimension {d} but matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        // Leg p of the input carries canonical leg position pos[p].
        let pos = system.positions(sites)?;
        let canonical = LegMap::new(system.dims(), &pos).unpermute(&matrix);
        HermitianOperator::new(system, canonical)
    }

    /// Qubit operator with legs in the given site order.
    pub fn qubits(sites: &[usize], matrix: CMatrix) -> Result<Self> {
        Self::from_legs(sites, &vec![2; sites.len()], matrix)
    }

    pub fn identity(system: SiteSystem) -> Self {
        let d = system.dim();
        HermitianOperator {
            system,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(system: SiteSystem) -> Self {
        let d = system.dim();
        HermitianOperator {
            system,
            matrix: CMatrix::zeros(d, d),
        }
    }

    /// Real diagonal operator.
    pub fn diagonal(system: SiteSystem, diag: &[f64]) -> Result<Self> {
        if diag.len() != system.dim() {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Ok(HermitianOperator {
            system,
            matrix: CMatrix::from_diagonal(&v),
        })
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` onto the normalised `psi`.
    pub fn projector(system: SiteSystem, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != system.dim() {
            return Err(Error::DimensionMismatch("state vector length".into()));
        }
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::DimensionMismatch("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        let mut m = &v * v.adjoint();
        linalg::hermitize(&mut m);
        Ok(HermitianOperator { system, matrix: m })
    }

    pub(crate) fn from_parts_unchecked(system: SiteSystem, mut matrix: CMatrix) -> Self {
        linalg::hermitize(&mut matrix);
        HermitianOperator { system, matrix }
    }

    pub fn system(&self) -> &SiteSystem {
        &self.system
    }

    pub fn sites(&self) -> &[usize] {
        self.system.sites()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    /// `Tr[self · other]` for operators on the same system.
    pub fn expectation(&self, other: &HermitianOperator) -> Result<f64> {
        self.same_system(other)?;
        Ok(linalg::trace_product(&self.matrix, &other.matrix))
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianOperator {
            system: self.system.clone(),
            matrix: &self.matrix * Complex64::new(c, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.same_system(other)?;
        Ok(HermitianOperator {
            system: self.system.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.same_system(other)?;
        Ok(HermitianOperator {
            system: self.system.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    fn same_system(&self, other: &HermitianOperator) -> Result<()> {
        if self.system != other.system {
            return Err(Error::DimensionMismatch(format!(
                "operators on {:?} and {:?}",
                self.sites(),
                other.sites()
            )));
        }
        Ok(())
    }

    pub fn eigh(&self) -> Eigh {
        linalg::eigh(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    /// `f` applied through the spectral decomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        HermitianOperator {
            system: self.system.clone(),
            matrix: self.eigh().map(f),
        }
    }

    /// Kronecker product with an operator on a disjoint system.
    pub fn tensor(&self, other: &HermitianOperator) -> Result<Self> {
        tensor(self, other)
    }

    /// Partial trace onto `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    /// `self ⊗ I` on a larger system containing this one.
    pub fn embed(&self, target: &SiteSystem) -> Result<Self> {
        if !self.system.is_subset_of(target) {
            let missing = self
                .sites()
                .iter()
                .copied()
                .filter(|&s| !target.contains(s))
                .collect();
            return Err(Error::NotASubset(missing));
        }
        for (&s, &d) in self.system.sites().iter().zip(self.system.dims()) {
            if target.local_dim(s) != Some(d) {
                return Err(Error::DimensionMismatch(format!(
                    "site {s} dimension differs"
                )));
            }
        }
        let pos = target.positions(self.sites())?;
        let map = LegMap::new(target.dims(), &pos);
        Ok(HermitianOperator {
            system: target.clone(),
            matrix: map.embed(&self.matrix),
        })
    }
}

/// Kronecker product of operators on disjoint site sets, expressed in the
/// canonical order of the combined system.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let overlap: Vec<usize> = a
        .sites()
        .iter()
        .copied()
        .filter(|&s| b.system.contains(s))
        .collect();
    if !overlap.is_empty() {
        return Err(Error::OverlappingSites(overlap));
    }
    let mut sites = a.sites().to_vec();
    sites.extend_from_slice(b.sites());
    let mut dims = a.system.dims().to_vec();
    dims.extend_from_slice(b.system.dims());
    HermitianOperator::from_legs(&sites, &dims, a.matrix.kronecker(&b.matrix))
}

/// Traces out every site of `rho` not in `keep`.
pub fn partial_trace(rho: &HermitianOperator, keep: &[usize]) -> Result<HermitianOperator> {
    let system = rho.system.subsystem(keep)?;
    let pos = rho.system.positions(system.sites())?;
    let map = LegMap::new(rho.system.dims(), &pos);
    Ok(HermitianOperator::from_parts_unchecked(
        system,
        map.reduce(&rho.matrix),
    ))
}

/// A positive semidefinite, unit-trace [`HermitianOperator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermitianOperator", into = "HermitianOperator")]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl TryFrom<HermitianOperator> for DensityMatrix {
    type Error = Error;
    fn try_from(op: HermitianOperator) -> Result<Self> {
        DensityMatrix::new(op)
    }
}

impl From<DensityMatrix> for HermitianOperator {
    fn from(rho: DensityMatrix) -> Self {
        rho.op
    }
}

impl DensityMatrix {
    /// Validates trace and positivity to [`DENSITY_TOL`].
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = linalg::eigvalsh_min(op.matrix());
        if min < -DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { op })
    }

    pub fn from_matrix(system: SiteSystem, matrix: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(system, matrix)?)
    }

    pub fn maximally_mixed(system: SiteSystem) -> Self {
        let d = system.dim();
        let m = CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0);
        DensityMatrix {
            op: HermitianOperator { system, matrix: m },
        }
    }

    /// The pure state `|ψ⟩⟨ψ|` (normalised internally).
    pub fn pure(system: SiteSystem, psi: &[Complex64]) -> Result<Self> {
        Ok(DensityMatrix {
            op: HermitianOperator::projector(system, psi)?,
        })
    }

    pub(crate) fn from_operator_unchecked(op: HermitianOperator) -> Self {
        DensityMatrix { op }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn system(&self) -> &SiteSystem {
        self.op.system()
    }

    pub fn sites(&self) -> &[usize] {
        self.op.sites()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues()
    }

    /// `Tr[ρ h]`.
    pub fn expectation(&self, h: &HermitianOperator) -> Result<f64> {
        self.op.expectation(h)
    }

    /// Reduced state on `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: partial_trace(&self.op, keep)?,
        })
    }

    /// `ρ ⊗ σ` for states on disjoint systems.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: tensor(&self.op, &other.op)?,
        })
    }

    /// Convex combination `p ρ + (1 − p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::NotDensityMatrix(format!("mixing weight {p}")));
        }
        let op = self.op.scaled(p).add(&other.op.scaled(1.0 - p))?;
        Ok(DensityMatrix { op })
    }
}

/// A split of a state's sites into a nonempty part `A` and a disjoint part `B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBipartition", into = "RawBipartition")]
pub struct Bipartition {
    part_a: Vec<usize>,
    part_b: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawBipartition {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl TryFrom<RawBipartition> for Bipartition {
    type Error = Error;
    fn try_from(raw: RawBipartition) -> Result<Self> {
        Bipartition::new(&raw.a, &raw.b)
    }
}

impl From<Bipartition> for RawBipartition {
    fn from(p: Bipartition) -> Self {
        RawBipartition {
            a: p.part_a,
            b: p.part_b,
        }
    }
}

impl Bipartition {
    pub fn new(part_a: &[usize], part_b: &[usize]) -> Result<Self> {
        let mut a = part_a.to_vec();
        let mut b = part_b.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a.is_empty() {
            return Err(Error::InvalidBipartition("part A is empty".into()));
        }
        if a.windows(2).any(|w| w[0] == w[1]) || b.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBipartition("repeated site".into()));
        }
        if a.iter().any(|s| b.binary_search(s).is_ok()) {
            return Err(Error::InvalidBipartition(format!(
                "{a:?} and {b:?} overlap"
            )));
        }
        Ok(Bipartition {
            part_a: a,
            part_b: b,
        })
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> &[usize] {
        &self.part_b
    }

    /// `A ∪ B` in ascending order.
    pub fn union(&self) -> Vec<usize> {
        let mut u = self.part_a.clone();
        u.extend_from_slice(&self.part_b);
        u.sort_unstable();
        u
    }
}
