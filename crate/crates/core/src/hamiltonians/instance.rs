use serde::{Deserialize, Serialize};

use super::builders::{build_ghz_hyper, build_quantum_maxcut, build_three_site_epr};
use super::local::LocalHamiltonian;
use super::ti::{build_xxz, TIChainTerm};
use crate::error::{Error, Result};
use crate::graphcover::Graph;
use crate::quantum::matrix_json;

/// Problem instance as read from JSON.
///
/// `{"kind": "graph", "edges": [[i, j], ...]}`,
/// `{"kind": "ti_chain", "delta": Δ}` or `{"kind": "ti_chain", "term": [[[re, im], ...], ...]}`,
/// `{"kind": "three_site_epr"}`, `{"kind": "ghz_hyper", "l": l}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    Graph {
        edges: Vec<[usize; 2]>,
    },
    TiChain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        term: Option<Vec<Vec<[f64; 2]>>>,
    },
    ThreeSiteEpr,
    GhzHyper {
        l: usize,
    },
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        if let Instance::TiChain { delta, term } = &inst {
            if delta.is_some() == term.is_some() {
                return Err(Error::InvalidInstance(
                    "ti_chain needs exactly one of `delta` or `term`".into(),
                ));
            }
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances serialise")
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph { .. } => "graph",
            Instance::TiChain { .. } => "ti_chain",
            Instance::ThreeSiteEpr => "three_site_epr",
            Instance::GhzHyper { .. } => "ghz_hyper",
        }
    }

    pub fn is_translation_invariant(&self) -> bool {
        matches!(self, Instance::TiChain { .. })
    }

    pub fn graph(&self) -> Result<Graph> {
        match self {
            Instance::Graph { edges } => {
                Graph::from_edges(&edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>())
            }
            _ => Err(Error::InvalidInstance(format!(
                "{} instance has no graph",
                self.kind()
            ))),
        }
    }

    /// The finite Hamiltonian of a non-chain instance.
    pub fn hamiltonian(&self) -> Result<LocalHamiltonian> {
        match self {
            Instance::Graph { .. } => build_quantum_maxcut(&self.graph()?),
            Instance::ThreeSiteEpr => Ok(build_three_site_epr()),
            Instance::GhzHyper { l } => build_ghz_hyper(*l),
            Instance::TiChain { .. } => Err(Error::InvalidInstance(
                "ti_chain instances define a ring only once a size is chosen".into(),
            )),
        }
    }

    /// The chain interaction of a `ti_chain` instance.
    pub fn ti_term(&self) -> Result<TIChainTerm> {
        match self {
            Instance::TiChain {
                delta: Some(d),
                term: None,
            } => Ok(build_xxz(*d)),
            Instance::TiChain {
                delta: None,
                term: Some(rows),
            } => TIChainTerm::new(matrix_json::from_rows(rows)?),
            Instance::TiChain { .. } => Err(Error::InvalidInstance(
                "ti_chain needs exactly one of `delta` or `term`".into(),
            )),
            _ => Err(Error::InvalidInstance(format!(
                "{} instance is not a chain",
                self.kind()
            ))),
        }
    }
}
