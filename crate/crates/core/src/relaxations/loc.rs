use std::collections::BTreeSet;

use super::spec::{ConsistencyConstraint, ObjectiveTerm, Reduction, RelaxationSpec};
use crate::error::{Error, Result};
use crate::hamiltonians::LocalHamiltonian;
use crate::quantum::{HermitianOperator, SiteSystem};

/// Local-consistency relaxation: one variable per support, pairwise
/// consistency on every nonempty intersection, and each objective term
/// attached to the smallest variable containing it.
pub fn build_loc(
    system: &SiteSystem,
    supports: &[Vec<usize>],
    objective: &[HermitianOperator],
) -> Result<RelaxationSpec> {
    let mut spec = RelaxationSpec::new(system.clone());
    let mut unique = BTreeSet::new();
    for s in supports {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::InvalidSpec("empty support".into()));
        }
        if unique.insert(s.clone()) {
            spec.add_variable(&s)?;
        }
    }
    for i in 0..spec.variables.len() {
        for j in (i + 1)..spec.variables.len() {
            let (a, b) = (&spec.variables[i], &spec.variables[j]);
            let common: Vec<usize> = a
                .support
                .iter()
                .copied()
                .filter(|s| b.support.binary_search(s).is_ok())
                .collect();
            if common.is_empty() {
                continue;
            }
            let c = ConsistencyConstraint {
                left: Reduction {
                    variable: a.label.clone(),
                    keep: common.clone(),
                },
                right: Reduction {
                    variable: b.label.clone(),
                    keep: common,
                },
            };
            spec.consistency.push(c);
        }
    }
    for term in objective {
        let v = spec
            .covering_variable(term.sites())
            .ok_or_else(|| Error::NotCovered(term.sites().to_vec()))?;
        spec.objective.push(ObjectiveTerm {
            variable: v.label.clone(),
            operator: term.clone(),
        });
    }
    spec.validate()?;
    Ok(spec)
}

/// How variable supports are chosen for a finite Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportScheme {
    /// The term supports themselves.
    Terms,
    /// Every `l`-subset of sites.
    AllSubsets(usize),
    /// Every `l`-subset that is connected in the interaction graph (sites
    /// sharing a term are adjacent).
    Connected(usize),
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

pub(crate) fn all_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    subsets(items, k)
}

fn is_connected_subset(set: &[usize], h: &LocalHamiltonian) -> bool {
    let mut reached = vec![set[0]];
    let mut changed = true;
    while changed {
        changed = false;
        for t in h.terms() {
            let inside: Vec<usize> = t
                .sites()
                .iter()
                .copied()
                .filter(|s| set.contains(s))
                .collect();
            if inside.iter().any(|s| reached.contains(s)) {
                for s in inside {
                    if !reached.contains(&s) {
                        reached.push(s);
                        changed = true;
                    }
                }
            }
        }
    }
    reached.len() == set.len()
}

/// Variable supports for `h` under `scheme`. Sizes larger than the system
/// collapse to the single full support.
pub fn loc_supports(h: &LocalHamiltonian, scheme: SupportScheme) -> Result<Vec<Vec<usize>>> {
    let sites = h.system().sites().to_vec();
    let out = match scheme {
        SupportScheme::Terms => h.terms().iter().map(|t| t.sites().to_vec()).collect(),
        SupportScheme::AllSubsets(l) | SupportScheme::Connected(l) if l >= sites.len() => {
            vec![sites]
        }
        SupportScheme::AllSubsets(l) => subsets(&sites, l),
        SupportScheme::Connected(l) => subsets(&sites, l)
            .into_iter()
            .filter(|s| is_connected_subset(s, h))
            .collect(),
    };
    if out.is_empty() {
        return Err(Error::InvalidSpec("no supports generated".into()));
    }
    Ok(out)
}

/// [`build_loc`] for a Hamiltonian with supports chosen by `scheme`.
pub fn build_loc_for(h: &LocalHamiltonian, scheme: SupportScheme) -> Result<RelaxationSpec> {
    build_loc(h.system(), &loc_supports(h, scheme)?, h.terms())
}
