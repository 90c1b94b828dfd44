use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::loc::all_subsets;
use super::spec::{EntropyConstraint, EntropyTerm, RelaxationSpec};
use crate::error::{Error, Result};
use crate::quantum::Bipartition;

/// Default cap on generated weak-monotonicity constraints.
pub const DEFAULT_WM_TRIPLE_CAP: usize = 5000;

/// The constraint `S(a|B) + S(a|C) ≥ 0` for disjoint nonempty `B`, `C`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WmTriple {
    pub a: usize,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl WmTriple {
    pub fn new(a: usize, b: &[usize], c: &[usize]) -> Self {
        let mut b = b.to_vec();
        let mut c = c.to_vec();
        b.sort_unstable();
        c.sort_unstable();
        if c < b {
            std::mem::swap(&mut b, &mut c);
        }
        WmTriple { a, b, c }
    }

    /// Whether this constraint is implied by `other` because conditioning on
    /// more sites of one state only lowers the conditional entropy.
    fn dominated_by(&self, other: &WmTriple) -> bool {
        let sub = |x: &[usize], y: &[usize]| x.iter().all(|s| y.contains(s));
        self != other
            && self.a == other.a
            && ((sub(&self.b, &other.b) && sub(&self.c, &other.c))
                || (sub(&self.b, &other.c) && sub(&self.c, &other.b)))
    }
}

/// Triple selection for [`build_wm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WmOptions {
    /// Use exactly these triples instead of generating them.
    pub triples: Option<Vec<WmTriple>>,
    /// Maximum number of generated triples (lexicographic selection).
    pub cap: usize,
}

impl Default for WmOptions {
    fn default() -> Self {
        WmOptions {
            triples: None,
            cap: DEFAULT_WM_TRIPLE_CAP,
        }
    }
}

/// Generated triples: for every site `a`, every pair of disjoint nonempty
/// sets `B`, `C` of size at most `l − 1` with `aB` and `aC` each inside one
/// variable. Triples implied by a larger generated triple are dropped.
pub fn wm_triples(base: &RelaxationSpec, l: usize) -> Vec<WmTriple> {
    let mut out = BTreeSet::new();
    for &a in base.system.sites() {
        let mut candidates = BTreeSet::new();
        for v in base.variables.iter().filter(|v| v.support.contains(&a)) {
            let rest: Vec<usize> = v.support.iter().copied().filter(|&s| s != a).collect();
            for k in 1..=rest.len().min(l.saturating_sub(1)) {
                candidates.extend(all_subsets(&rest, k));
            }
        }
        let candidates: Vec<Vec<usize>> = candidates.into_iter().collect();
        for (i, b) in candidates.iter().enumerate() {
            for c in &candidates[i + 1..] {
                if b.iter().all(|s| !c.contains(s)) {
                    out.insert(WmTriple::new(a, b, c));
                }
            }
        }
    }
    let all: Vec<WmTriple> = out.into_iter().collect();
    all.iter()
        .filter(|t| !all.iter().any(|o| t.dominated_by(o)))
        .cloned()
        .collect()
}

/// Adds weak-monotonicity constraints to `base`.
pub fn build_wm(base: &RelaxationSpec, l: usize, options: &WmOptions) -> Result<RelaxationSpec> {
    if l < 2 {
        return Err(Error::InvalidSpec(format!("level {l} is below 2")));
    }
    let triples = match &options.triples {
        Some(t) => t.clone(),
        None => {
            let mut t = wm_triples(base, l);
            t.truncate(options.cap);
            t
        }
    };
    let mut spec = base.clone();
    for t in &triples {
        let mut terms = Vec::with_capacity(2);
        for cond in [&t.b, &t.c] {
            if cond.is_empty() || cond.contains(&t.a) {
                return Err(Error::InvalidSpec(format!("malformed triple {t:?}")));
            }
            let mut sites = cond.clone();
            sites.push(t.a);
            let v = base.covering_variable(&sites).ok_or_else(|| {
                sites.sort_unstable();
                Error::NotCovered(sites.clone())
            })?;
            terms.push(EntropyTerm {
                variable: v.label.clone(),
                part: Bipartition::new(&[t.a], cond)?,
                coefficient: 1.0,
            });
        }
        if t.b.iter().any(|s| t.c.contains(s)) {
            return Err(Error::InvalidSpec(format!(
                "conditioning sets overlap in {t:?}"
            )));
        }
        spec.entropy_constraints.push(EntropyConstraint { terms });
    }
    spec.validate()?;
    Ok(spec)
}
