use super::spec::{
    ConsistencyConstraint, EntropyConstraint, EntropyTerm, ObjectiveTerm, Reduction, RelaxationSpec,
};
use crate::error::{Error, Result};
use crate::hamiltonians::TIChainTerm;
use crate::quantum::{Bipartition, SiteSystem};

/// Label of the single chain variable of translation-invariant specs.
pub const CHAIN_VARIABLE: &str = "chain";

/// One `l`-site state on sites `1..=l` whose first `l − 1` and last `l − 1`
/// sites carry the same marginal; the objective is `Tr[h ρ_{12}]`.
pub fn build_loc_ti(l: usize, term: &TIChainTerm) -> Result<RelaxationSpec> {
    if l < 2 {
        return Err(Error::InvalidSpec(format!("chain length {l} is below 2")));
    }
    let sites: Vec<usize> = (1..=l).collect();
    let mut spec = RelaxationSpec::new(SiteSystem::uniform(&sites, term.local_dim())?);
    spec.variables.push(super::spec::Variable {
        label: CHAIN_VARIABLE.into(),
        support: sites.clone(),
    });
    spec.consistency.push(ConsistencyConstraint {
        left: Reduction {
            variable: CHAIN_VARIABLE.into(),
            keep: sites[1..].to_vec(),
        },
        right: Reduction {
            variable: CHAIN_VARIABLE.into(),
            keep: sites[..l - 1].to_vec(),
        },
    });
    spec.objective.push(ObjectiveTerm {
        variable: CHAIN_VARIABLE.into(),
        operator: term.h().clone(),
    });
    spec.validate()?;
    Ok(spec)
}

/// [`build_loc_ti`] plus `S(l | 1…l−1) ≥ 0`.
pub fn build_wm_ti(l: usize, term: &TIChainTerm) -> Result<RelaxationSpec> {
    let mut spec = build_loc_ti(l, term)?;
    let rest: Vec<usize> = (1..l).collect();
    spec.entropy_constraints.push(EntropyConstraint {
        terms: vec![EntropyTerm {
            variable: CHAIN_VARIABLE.into(),
            part: Bipartition::new(&[l], &rest)?,
            coefficient: 1.0,
        }],
    });
    spec.validate()?;
    Ok(spec)
}
