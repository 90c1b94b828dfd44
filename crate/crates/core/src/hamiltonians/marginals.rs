//! Collections of small marginals and the two families separating weak
//! monotonicity from Markov-entropy-decomposition constraints.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::quantum::pauli;
use crate::quantum::{
    binary_entropy, conditional_entropy, Bipartition, DensityMatrix, HermitianOperator, SiteSystem,
};

/// Marginal states keyed by their (ascending) support.
#[derive(Clone, Debug, Default)]
pub struct MarginalAssignment {
    marginals: BTreeMap<Vec<usize>, DensityMatrix>,
}

impl MarginalAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rho: DensityMatrix) {
        self.marginals.insert(rho.sites().to_vec(), rho);
    }

    pub fn get(&self, support: &[usize]) -> Option<&DensityMatrix> {
        self.marginals.get(support)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DensityMatrix> {
        self.marginals.values()
    }

    pub fn len(&self) -> usize {
        self.marginals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marginals.is_empty()
    }

    /// Marginal on `sites`, reduced from the smallest stored state containing them.
    pub fn marginal(&self, sites: &[usize]) -> Result<DensityMatrix> {
        let mut want = sites.to_vec();
        want.sort_unstable();
        let holder = self
            .marginals
            .iter()
            .filter(|(k, _)| want.iter().all(|s| k.binary_search(s).is_ok()))
            .min_by_key(|(k, _)| k.len())
            .map(|(_, v)| v)
            .ok_or_else(|| Error::NotCovered(want.clone()))?;
        holder.marginal(&want)
    }

    /// `S(A|B)` evaluated on a stored marginal containing `A ∪ B`.
    pub fn conditional_entropy(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        let part = Bipartition::new(a, b)?;
        conditional_entropy(&self.marginal(&part.union())?, &part)
    }

    /// Largest trace-norm-free (max entry) disagreement between overlapping marginals.
    pub fn consistency_violation(&self) -> Result<f64> {
        let list: Vec<&DensityMatrix> = self.marginals.values().collect();
        let mut worst: f64 = 0.0;
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                let common: Vec<usize> = a
                    .sites()
                    .iter()
                    .copied()
                    .filter(|s| b.system().contains(*s))
                    .collect();
                if common.is_empty() {
                    continue;
                }
                let diff = a.marginal(&common)?.matrix() - b.marginal(&common)?.matrix();
                worst = worst.max(diff.iter().fold(0.0, |m, z| m.max(z.norm())));
            }
        }
        Ok(worst)
    }

    /// Minimum over all two-body weak-monotonicity sums `S(a|b) + S(a|c)`
    /// with `ab` and `ac` both stored.
    pub fn min_wm_two_body(&self) -> Result<f64> {
        let pairs: Vec<&Vec<usize>> = self.marginals.keys().filter(|k| k.len() == 2).collect();
        let mut sites: Vec<usize> = pairs.iter().flat_map(|k| k.iter().copied()).collect();
        sites.sort_unstable();
        sites.dedup();
        let has = |x: usize, y: usize| self.marginals.contains_key(&vec![x.min(y), x.max(y)]);
        let mut worst = f64::INFINITY;
        for &a in &sites {
            for &b in &sites {
                for &c in &sites {
                    if a == b || a == c || b >= c || !has(a, b) || !has(a, c) {
                        continue;
                    }
                    let v = self.conditional_entropy(&[a], &[b])?
                        + self.conditional_entropy(&[a], &[c])?;
                    worst = worst.min(v);
                }
            }
        }
        Ok(worst)
    }

    /// `Σ_i S(order_i | shields_i)`.
    pub fn med_sum(&self, order: &[usize], shields: &[Vec<usize>]) -> Result<f64> {
        if order.len() != shields.len() {
            return Err(Error::InvalidSpec("one shield per site is required".into()));
        }
        order
            .iter()
            .zip(shields)
            .map(|(&i, n)| self.conditional_entropy(&[i], n))
            .sum()
    }
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn qubit_state(site: usize, p0: f64) -> DensityMatrix {
    let sys = SiteSystem::qubits(&[site]).unwrap();
    DensityMatrix::new(HermitianOperator::diagonal(sys, &[p0, 1.0 - p0]).unwrap()).unwrap()
}

fn singlet(a: usize, b: usize) -> DensityMatrix {
    let sys = SiteSystem::qubits(&[a, b]).unwrap();
    DensityMatrix::pure(sys, &pauli::singlet_vector()).unwrap()
}

/// `λ|ψ⁻⟩⟨ψ⁻| + (1−λ)(I/2 ⊗ |0⟩⟨0|)` on sites `(1, i)`.
fn hub_pair(lambda: f64, i: usize) -> DensityMatrix {
    let background = qubit_state(1, 0.5).tensor(&qubit_state(i, 1.0)).unwrap();
    singlet(1, i).mix(&background, lambda).unwrap()
}

/// Sites `1..=n` with `ρ_{1i} = λ|ψ⁻⟩⟨ψ⁻| + (1−λ)(I/2 ⊗ |0⟩⟨0|)` and
/// `ρ_{ij} = (λ I/2 + (1−λ)|0⟩⟨0|)^{⊗2}` for `2 ≤ i < j ≤ n`.
pub fn build_wm_not_med_marginals(lambda: f64, n: usize) -> Result<MarginalAssignment> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "lambda {lambda} outside (0, 1)"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidSpec(format!(
            "need at least 3 sites, got {n}"
        )));
    }
    let mut out = MarginalAssignment::new();
    let p0 = 1.0 - lambda / 2.0;
    for i in 2..=n {
        out.insert(hub_pair(lambda, i));
        for j in (i + 1)..=n {
            out.insert(qubit_state(i, p0).tensor(&qubit_state(j, p0))?);
        }
    }
    Ok(out)
}

/// The `λ ∈ (0, 1)` at which `S(1|i) + S(1|j) = 2S(1i) − 2h(1 − λ/2)` vanishes,
/// found by bisection to 1e-10.
pub fn solve_wm_not_med_lambda() -> f64 {
    let g = |lambda: f64| {
        let rho = hub_pair(lambda, 2);
        2.0 * crate::quantum::von_neumann_entropy(&rho) - 2.0 * binary_entropy(1.0 - lambda / 2.0)
    };
    bisect(1e-9, 1.0 - 1e-9, 1e-10, g)
}

/// Target conditional entropy of the Werner family.
pub const WERNER_TARGET_CONDITIONAL_ENTROPY: f64 = -0.25;

/// `λ|ψ⁻⟩⟨ψ⁻| + (1−λ)I/4` on sites `(a, b)`.
pub fn werner_state(lambda: f64, a: usize, b: usize) -> Result<DensityMatrix> {
    let mixed = DensityMatrix::maximally_mixed(SiteSystem::qubits(&[a, b])?);
    singlet(a, b).mix(&mixed, lambda)
}

/// The Werner weight with `S(i|j) = −0.25`, by bisection to 1e-12.
pub fn solve_werner_lambda() -> f64 {
    let f = |lambda: f64| {
        let rho = werner_state(lambda, 1, 2).unwrap();
        crate::quantum::von_neumann_entropy(&rho) - 1.0 - WERNER_TARGET_CONDITIONAL_ENTROPY
    };
    bisect(0.0, 1.0, 1e-12, f)
}

/// Identical Werner marginals on the pairs 12, 13 and 23.
pub fn build_med_not_wm_marginals() -> MarginalAssignment {
    let lambda = solve_werner_lambda();
    let mut out = MarginalAssignment::new();
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        out.insert(werner_state(lambda, a, b).unwrap());
    }
    out
}
