use serde::{Deserialize, Serialize};

use super::spec::{EntropyConstraint, EntropyPenalty, EntropyTerm, RelaxationSpec};
use crate::error::{Error, Result};
use crate::quantum::Bipartition;

/// A site order with a conditioning set ("shield") for every site drawn from
/// its predecessors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovShieldPlan {
    order: Vec<usize>,
    shields: Vec<Vec<usize>>,
}

impl MarkovShieldPlan {
    pub fn new(order: Vec<usize>, shields: Vec<Vec<usize>>) -> Result<Self> {
        if order.len() != shields.len() {
            return Err(Error::InvalidSpec("one shield per site is required".into()));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("order repeats a site".into()));
        }
        let mut shields = shields;
        for (k, n) in shields.iter_mut().enumerate() {
            n.sort_unstable();
            n.dedup();
            if let Some(s) = n.iter().find(|s| !order[..k].contains(s)) {
                return Err(Error::InvalidSpec(format!(
                    "shield site {s} does not precede {}",
                    order[k]
                )));
            }
        }
        Ok(MarkovShieldPlan { order, shields })
    }

    /// Shield of each site = the `width` sites immediately before it in `order`.
    pub fn nearest_predecessors(order: Vec<usize>, width: usize) -> Result<Self> {
        let shields = (0..order.len())
            .map(|k| order[k.saturating_sub(width)..k].to_vec())
            .collect();
        Self::new(order, shields)
    }

    /// Shield of each site = the predecessors sharing a variable with it,
    /// greedily taken from the variable that holds the most of them, at most
    /// `width` sites, preferring the closest in order.
    pub fn covered_predecessors(
        spec: &RelaxationSpec,
        order: Vec<usize>,
        width: usize,
    ) -> Result<Self> {
        let mut shields = Vec::with_capacity(order.len());
        for (k, &i) in order.iter().enumerate() {
            let preds: Vec<usize> = order[..k].iter().rev().copied().collect();
            let mut best: Vec<usize> = Vec::new();
            for v in spec.variables.iter().filter(|v| v.support.contains(&i)) {
                let inside: Vec<usize> = preds
                    .iter()
                    .copied()
                    .filter(|p| v.support.contains(p))
                    .take(width)
                    .collect();
                if inside.len() > best.len() {
                    best = inside;
                }
            }
            shields.push(best);
        }
        Self::new(order, shields)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn shields(&self) -> &[Vec<usize>] {
        &self.shields
    }
}

fn med_terms(base: &RelaxationSpec, plan: &MarkovShieldPlan, k: usize) -> Result<Vec<EntropyTerm>> {
    if k == 0 || k > plan.order.len() {
        return Err(Error::InvalidSpec(format!(
            "prefix length {k} outside 1..={}",
            plan.order.len()
        )));
    }
    let mut terms = Vec::with_capacity(k);
    for (&i, n) in plan.order.iter().zip(&plan.shields).take(k) {
        let mut sites = n.clone();
        sites.push(i);
        let v = base.covering_variable(&sites).ok_or_else(|| {
            sites.sort_unstable();
            Error::NotCovered(sites.clone())
        })?;
        terms.push(EntropyTerm {
            variable: v.label.clone(),
            part: Bipartition::new(&[i], n)?,
            coefficient: 1.0,
        });
    }
    Ok(terms)
}

/// Adds the single aggregate constraint `Σ_{i ≤ k} S(i|N_i) ≥ 0`.
pub fn build_med_constraints(
    base: &RelaxationSpec,
    plan: &MarkovShieldPlan,
    k: usize,
) -> Result<RelaxationSpec> {
    let mut spec = base.clone();
    spec.entropy_constraints.push(EntropyConstraint {
        terms: med_terms(base, plan, k)?,
    });
    spec.validate()?;
    Ok(spec)
}

/// Objective `Σ Tr[h ρ] − T Σ_i S(i|N_i)` over the full order; its minimum
/// lower-bounds the free energy at temperature `T`.
pub fn build_med_free_energy(
    base: &RelaxationSpec,
    plan: &MarkovShieldPlan,
    temperature: f64,
) -> Result<RelaxationSpec> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "temperature {temperature} must be finite and nonnegative"
        )));
    }
    let mut spec = base.clone();
    spec.entropy_penalty = Some(EntropyPenalty {
        temperature,
        terms: med_terms(base, plan, plan.order.len())?,
    });
    spec.validate()?;
    Ok(spec)
}
