use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total Hilbert-space dimension handled with dense matrices.
pub const MAX_DENSE_DIM: usize = 1 << 14;

/// Largest total dimension of systems only acted on by state vectors.
pub const MAX_MATRIX_FREE_DIM: usize = 1 << 26;

/// An ordered collection of sites with their local Hilbert-space dimensions.
///
/// Sites are always stored in ascending order of their integer label; this is
/// the tensor-leg order of every operator defined on the system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SiteSystem {
    sites: Vec<usize>,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    sites: Vec<usize>,
    dims: Vec<usize>,
}

impl TryFrom<RawSystem> for SiteSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        SiteSystem::new(raw.sites, raw.dims)
    }
}

impl From<SiteSystem> for RawSystem {
    fn from(s: SiteSystem) -> Self {
        RawSystem {
            sites: s.sites,
            dims: s.dims,
        }
    }
}

impl SiteSystem {
    /// Builds a system from site labels and matching local dimensions, given in
    /// any order; the result is sorted by site label.
    pub fn new(sites: Vec<usize>, dims: Vec<usize>) -> Result<Self> {
        Self::with_budget(sites, dims, MAX_DENSE_DIM)
    }

    /// Like [`SiteSystem::new`] with the larger [`MAX_MATRIX_FREE_DIM`]
    /// budget, for systems whose operators are never materialised.
    pub fn matrix_free(sites: Vec<usize>, dims: Vec<usize>) -> Result<Self> {
        Self::with_budget(sites, dims, MAX_MATRIX_FREE_DIM)
    }

    fn with_budget(sites: Vec<usize>, dims: Vec<usize>, budget: usize) -> Result<Self> {
        if sites.len() != dims.len() {
            return Err(Error::InvalidSystem(format!(
                "{} sites but {} local dimensions",
                sites.len(),
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSystem(format!(
                "local dimension {d} is below 2"
            )));
        }
        let mut pairs: Vec<(usize, usize)> = sites.into_iter().zip(dims).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidSystem("repeated site label".into()));
        }
        let (sites, dims): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let system = SiteSystem { sites, dims };
        let dim = system.checked_dim().unwrap_or(usize::MAX);
        if dim > budget {
            return Err(Error::DimensionBudget { dim, budget });
        }
        Ok(system)
    }

    /// A system of qubits on the given labels.
    pub fn qubits(sites: &[usize]) -> Result<Self> {
        Self::new(sites.to_vec(), vec![2; sites.len()])
    }

    /// A system with the same local dimension `d` on every site.
    pub fn uniform(sites: &[usize], d: usize) -> Result<Self> {
        Self::new(sites.to_vec(), vec![d; sites.len()])
    }

    /// The empty system (dimension 1).
    pub fn empty() -> Self {
        SiteSystem {
            sites: Vec::new(),
            dims: Vec::new(),
        }
    }

    fn checked_dim(&self) -> Option<usize> {
        self.dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Product of the local dimensions.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Leg index of `site`, if present.
    pub fn position(&self, site: usize) -> Option<usize> {
        self.sites.binary_search(&site).ok()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.position(site).is_some()
    }

    /// Local dimension of `site`, if present.
    pub fn local_dim(&self, site: usize) -> Option<usize> {
        self.position(site).map(|p| self.dims[p])
    }

    /// Leg positions of `sites` in the given order.
    pub fn positions(&self, sites: &[usize]) -> Result<Vec<usize>> {
        let missing: Vec<usize> = sites
            .iter()
            .copied()
            .filter(|&s| !self.contains(s))
            .collect();
        if !missing.is_empty() {
            return Err(Error::NotASubset(missing));
        }
        Ok(sites.iter().map(|&s| self.position(s).unwrap()).collect())
    }

    /// The subsystem on `keep` (any order; duplicates rejected).
    pub fn subsystem(&self, keep: &[usize]) -> Result<SiteSystem> {
        let pos = self.positions(keep)?;
        SiteSystem::new(keep.to_vec(), pos.iter().map(|&p| self.dims[p]).collect())
    }

    /// Union of two systems; shared sites must agree on their dimension.
    pub fn union(&self, other: &SiteSystem) -> Result<SiteSystem> {
        let mut sites = self.sites.clone();
        let mut dims = self.dims.clone();
        for (&s, &d) in other.sites.iter().zip(&other.dims) {
            match self.local_dim(s) {
                Some(d0) if d0 != d => {
                    return Err(Error::DimensionMismatch(format!(
                        "site {s} has dimension {d0} and {d}"
                    )))
                }
                Some(_) => {}
                None => {
                    sites.push(s);
                    dims.push(d);
                }
            }
        }
        SiteSystem::new(sites, dims)
    }

    pub fn is_subset_of(&self, other: &SiteSystem) -> bool {
        self.sites.iter().all(|&s| other.contains(s))
    }

    pub fn is_disjoint(&self, other: &SiteSystem) -> bool {
        self.sites.iter().all(|&s| !other.contains(s))
    }
}
