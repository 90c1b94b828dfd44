use num_complex::Complex64;

use super::local::LocalHamiltonian;
use crate::error::{Error, Result};
use crate::graphcover::Graph;
use crate::quantum::pauli;
use crate::quantum::{HermitianOperator, SiteSystem};

fn singlet_term(a: usize, b: usize, coefficient: f64) -> Result<HermitianOperator> {
    HermitianOperator::qubits(
        &[a, b],
        pauli::singlet_projector() * Complex64::new(coefficient, 0.0),
    )
}

/// Three qubits 1, 2, 3 with `−½|ψ⁻⟩⟨ψ⁻|` on the pairs 12 and 23.
pub fn build_three_site_epr() -> LocalHamiltonian {
    let system = SiteSystem::qubits(&[1, 2, 3]).expect("three qubits");
    let terms = vec![
        singlet_term(1, 2, -0.5).unwrap(),
        singlet_term(2, 3, -0.5).unwrap(),
    ];
    LocalHamiltonian::new(system, terms).expect("valid terms")
}

/// Quantum Max-Cut: `−|ψ⁻⟩⟨ψ⁻|` on every edge of a connected graph.
pub fn build_quantum_maxcut(graph: &Graph) -> Result<LocalHamiltonian> {
    if !graph.is_connected() {
        return Err(Error::InvalidGraph("graph is disconnected".into()));
    }
    let system = SiteSystem::qubits(graph.nodes())?;
    let terms = graph
        .edges()
        .iter()
        .map(|&(a, b)| singlet_term(a, b, -1.0))
        .collect::<Result<Vec<_>>>()?;
    LocalHamiltonian::new(system, terms)
}

/// Two GHZ-projector hyperedges `1…l` and `l…2l−1` sharing site `l`, each
/// carrying `−|GHZ_l⟩⟨GHZ_l|`.
pub fn build_ghz_hyper(l: usize) -> Result<LocalHamiltonian> {
    if l < 2 {
        return Err(Error::InvalidHamiltonian(format!(
            "hyperedge size {l} is below 2"
        )));
    }
    let sites: Vec<usize> = (1..=2 * l - 1).collect();
    let system = SiteSystem::qubits(&sites)?;
    let psi = pauli::ghz_vector(l);
    let mut terms = Vec::new();
    for support in [&sites[..l], &sites[l - 1..]] {
        let p = HermitianOperator::projector(SiteSystem::qubits(support)?, &psi)?;
        terms.push(p.scaled(-1.0));
    }
    LocalHamiltonian::new(system, terms)
}
