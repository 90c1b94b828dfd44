use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    conditional_entropy, Bipartition, DensityMatrix, HermitianOperator, SiteSystem,
};

/// Schema tag written into every serialised spec.
pub const SPEC_SCHEMA: &str = "entrobound-spec-v1";

/// A density-matrix variable on a set of sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub label: String,
    pub support: Vec<usize>,
}

/// Partial trace of a variable onto `keep`, with output legs in the order listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub variable: String,
    pub keep: Vec<usize>,
}

/// `left(ρ_{left.variable}) = right(ρ_{right.variable})`, compared leg by leg.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyConstraint {
    pub left: Reduction,
    pub right: Reduction,
}

/// `coefficient · S(A|B)` evaluated on a variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyTerm {
    pub variable: String,
    pub part: Bipartition,
    pub coefficient: f64,
}

/// `Σ_t coefficient_t · S(A_t|B_t) ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyConstraint {
    pub terms: Vec<EntropyTerm>,
}

/// `Tr[operator · ρ_variable]`; the operator may act on part of the support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerm {
    pub variable: String,
    pub operator: HermitianOperator,
}

/// Subtracts `temperature · Σ_t coefficient_t S(A_t|B_t)` from the objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyPenalty {
    pub temperature: f64,
    pub terms: Vec<EntropyTerm>,
}

/// A convex relaxation: minimise the objective over density matrices on the
/// variable supports subject to consistency and entropy constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    pub schema: String,
    pub system: SiteSystem,
    pub variables: Vec<Variable>,
    pub consistency: Vec<ConsistencyConstraint>,
    pub entropy_constraints: Vec<EntropyConstraint>,
    pub objective: Vec<ObjectiveTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_penalty: Option<EntropyPenalty>,
}

/// Constraint violations of a candidate assignment of variable states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// Largest entry-wise mismatch over consistency constraints.
    pub consistency: f64,
    /// Smallest entropy-constraint value (≥ 0 when satisfied); `+∞` if none.
    pub min_entropy_slack: f64,
}

impl RelaxationSpec {
    pub fn new(system: SiteSystem) -> Self {
        RelaxationSpec {
            schema: SPEC_SCHEMA.to_string(),
            system,
            variables: Vec::new(),
            consistency: Vec::new(),
            entropy_constraints: Vec::new(),
            objective: Vec::new(),
            entropy_penalty: None,
        }
    }

    pub fn variable_index(&self, label: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.label == label)
    }

    pub fn variable(&self, label: &str) -> Result<&Variable> {
        self.variables
            .iter()
            .find(|v| v.label == label)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown variable {label:?}")))
    }

    /// Site system of a variable.
    pub fn variable_system(&self, label: &str) -> Result<SiteSystem> {
        self.system.subsystem(&self.variable(label)?.support)
    }

    /// The variable with the smallest support containing `sites` (first by
    /// declaration order among equals).
    pub fn covering_variable(&self, sites: &[usize]) -> Option<&Variable> {
        self.variables
            .iter()
            .filter(|v| sites.iter().all(|s| v.support.binary_search(s).is_ok()))
            .min_by_key(|v| v.support.len())
    }

    /// Adds a variable on `support` (sorted) and returns its label.
    pub fn add_variable(&mut self, support: &[usize]) -> Result<String> {
        let mut s = support.to_vec();
        s.sort_unstable();
        s.dedup();
        let label = support_label(&s);
        if self.variable_index(&label).is_some() {
            return Err(Error::InvalidSpec(format!("duplicate variable {label}")));
        }
        self.system.subsystem(&s)?;
        self.variables.push(Variable {
            label: label.clone(),
            support: s,
        });
        Ok(label)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SPEC_SCHEMA {
            return Err(Error::InvalidSpec(format!(
                "unsupported schema {:?}",
                self.schema
            )));
        }
        if self.variables.is_empty() {
            return Err(Error::InvalidSpec("no variables".into()));
        }
        let mut seen = BTreeMap::new();
        for v in &self.variables {
            if v.support.is_empty() || v.support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSpec(format!(
                    "support of {} must be nonempty and ascending",
                    v.label
                )));
            }
            self.system.subsystem(&v.support)?;
            if seen.insert(v.label.clone(), ()).is_some() {
                return Err(Error::InvalidSpec(format!(
                    "duplicate variable {}",
                    v.label
                )));
            }
        }
        for c in &self.consistency {
            let dl = self.reduction_dims(&c.left)?;
            let dr = self.reduction_dims(&c.right)?;
            if dl != dr {
                return Err(Error::InvalidSpec(format!(
                    "consistency legs differ: {:?} vs {:?}",
                    c.left, c.right
                )));
            }
        }
        for e in &self.entropy_constraints {
            if e.terms.is_empty() {
                return Err(Error::InvalidSpec("empty entropy constraint".into()));
            }
            self.validate_terms(&e.terms)?;
        }
        if let Some(p) = &self.entropy_penalty {
            if !(p.temperature >= 0.0 && p.temperature.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "temperature {} must be finite and nonnegative",
                    p.temperature
                )));
            }
            self.validate_terms(&p.terms)?;
        }
        for o in &self.objective {
            let v = self.variable(&o.variable)?;
            let sys = self.system.subsystem(&v.support)?;
            if !o.operator.system().is_subset_of(&sys) {
                return Err(Error::InvalidSpec(format!(
                    "objective on {:?} outside variable {}",
                    o.operator.sites(),
                    v.label
                )));
            }
            for (&s, &d) in o.operator.sites().iter().zip(o.operator.system().dims()) {
                if sys.local_dim(s) != Some(d) {
                    return Err(Error::InvalidSpec(format!(
                        "objective dimension mismatch at site {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn reduction_dims(&self, r: &Reduction) -> Result<Vec<usize>> {
        let v = self.variable(&r.variable)?;
        let mut sorted = r.keep.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec(format!(
                "repeated site in reduction {:?}",
                r.keep
            )));
        }
        if r.keep.is_empty() || r.keep.iter().any(|s| v.support.binary_search(s).is_err()) {
            return Err(Error::InvalidSpec(format!(
                "reduction {:?} is not within {}",
                r.keep, v.label
            )));
        }
        Ok(r.keep
            .iter()
            .map(|&s| self.system.local_dim(s).unwrap())
            .collect())
    }

    fn validate_terms(&self, terms: &[EntropyTerm]) -> Result<()> {
        for t in terms {
            let v = self.variable(&t.variable)?;
            if !(t.coefficient > 0.0 && t.coefficient.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "entropy coefficient {} must be positive",
                    t.coefficient
                )));
            }
            if t.part
                .union()
                .iter()
                .any(|s| v.support.binary_search(s).is_err())
            {
                return Err(Error::InvalidSpec(format!(
                    "entropy term outside variable {}",
                    t.variable
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RelaxationSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Objective value (including any entropy penalty) of per-variable states
    /// given in declaration order.
    pub fn objective_value(&self, states: &[DensityMatrix]) -> Result<f64> {
        self.check_states(states)?;
        let mut total = 0.0;
        for o in &self.objective {
            let idx = self.variable_index(&o.variable).unwrap();
            total += states[idx]
                .marginal(o.operator.sites())?
                .expectation(&o.operator)?;
        }
        if let Some(p) = &self.entropy_penalty {
            total -= p.temperature * self.entropy_sum(&p.terms, states)?;
        }
        Ok(total)
    }

    fn check_states(&self, states: &[DensityMatrix]) -> Result<()> {
        if states.len() != self.variables.len() {
            return Err(Error::InvalidSpec(format!(
                "{} states for {} variables",
                states.len(),
                self.variables.len()
            )));
        }
        for (s, v) in states.iter().zip(&self.variables) {
            if s.sites() != v.support.as_slice() {
                return Err(Error::InvalidSpec(format!(
                    "state on {:?} for variable {}",
                    s.sites(),
                    v.label
                )));
            }
        }
        Ok(())
    }

    fn entropy_sum(&self, terms: &[EntropyTerm], states: &[DensityMatrix]) -> Result<f64> {
        let mut s = 0.0;
        for t in terms {
            let idx = self.variable_index(&t.variable).unwrap();
            s += t.coefficient * conditional_entropy(&states[idx], &t.part)?;
        }
        Ok(s)
    }

    /// Constraint violations of per-variable states in declaration order.
    pub fn feasibility(&self, states: &[DensityMatrix]) -> Result<Feasibility> {
        self.check_states(states)?;
        let mut consistency: f64 = 0.0;
        for c in &self.consistency {
            let l = reduce_ordered(self, states, &c.left)?;
            let r = reduce_ordered(self, states, &c.right)?;
            consistency = consistency.max((l - r).iter().fold(0.0, |m, z| m.max(z.norm())));
        }
        let mut min_entropy_slack = f64::INFINITY;
        for e in &self.entropy_constraints {
            min_entropy_slack = min_entropy_slack.min(self.entropy_sum(&e.terms, states)?);
        }
        Ok(Feasibility {
            consistency,
            min_entropy_slack,
        })
    }

    /// Marginals of a global state on the system onto every variable support.
    pub fn marginals_of(&self, global: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
        self.variables
            .iter()
            .map(|v| global.marginal(&v.support))
            .collect()
    }
}

fn reduce_ordered(
    spec: &RelaxationSpec,
    states: &[DensityMatrix],
    r: &Reduction,
) -> Result<crate::quantum::CMatrix> {
    let idx = spec.variable_index(&r.variable).unwrap();
    let sys = states[idx].system();
    let pos = sys.positions(&r.keep)?;
    Ok(crate::quantum::legs::LegMap::new(sys.dims(), &pos).reduce(states[idx].matrix()))
}

/// Variable label for a support, e.g. `rho[1,2]`.
pub fn support_label(support: &[usize]) -> String {
    let inner: Vec<String> = support.iter().map(|s| s.to_string()).collect();
    format!("rho[{}]", inner.join(","))
}
