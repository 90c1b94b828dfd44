use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ObjectiveTerm, RelaxationSpec};
use crate::error::{Error, Result};
use crate::quantum::{pauli, tensor, HermitianOperator};
use crate::solver::{solve, SolverConfig};

/// Boundary point of a relaxation in the `(x, z)` plane of two-site states
/// `(I + x(XX + YY) + z ZZ)/4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub theta: f64,
    /// `Tr[ρ₁₂ (XX + YY)] / 2`.
    pub x: f64,
    /// `Tr[ρ₁₂ ZZ]`.
    pub z: f64,
    /// Certified upper bound on the support function in direction `θ`.
    pub support: f64,
    pub converged: bool,
}

fn pauli_pair(
    p: &nalgebra::DMatrix<num_complex::Complex64>,
    a: usize,
    b: usize,
) -> Result<HermitianOperator> {
    let pa = HermitianOperator::qubits(&[a], p.clone())?;
    let pb = HermitianOperator::qubits(&[b], p.clone())?;
    tensor(&pa, &pb)
}

/// `(XX + YY)/2` and `ZZ` on sites `a`, `b`.
pub fn slice_functional(a: usize, b: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    let xx = pauli_pair(&pauli::x(), a, b)?;
    let yy = pauli_pair(&pauli::y(), a, b)?;
    Ok((xx.add(&yy)?.scaled(0.5), pauli_pair(&pauli::z(), a, b)?))
}

/// Support function of the relaxation's two-site marginal on sites
/// `(first two sites of the system)` in every direction `θ`: maximises
/// `cos θ · x + sin θ · z` by minimising its negative. The spec's objective
/// is replaced; the variable covering the two sites carries the functional.
pub fn slice_support_scan(
    spec: &RelaxationSpec,
    angles: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SlicePoint>> {
    let sites = spec.system.sites();
    if sites.len() < 2 || spec.system.dims()[..2] != [2, 2] {
        return Err(Error::InvalidSpec(
            "slice scans need two leading qubit sites".into(),
        ));
    }
    let (a, b) = (sites[0], sites[1]);
    let var = spec
        .covering_variable(&[a, b])
        .ok_or_else(|| Error::NotCovered(vec![a, b]))?;
    let idx = spec.variable_index(&var.label).unwrap();
    let label = var.label.clone();
    let (xop, zop) = slice_functional(a, b)?;
    angles
        .par_iter()
        .map(|&theta| {
            let mut s = spec.clone();
            let op = xop.scaled(-theta.cos()).add(&zop.scaled(-theta.sin()))?;
            s.objective = vec![ObjectiveTerm {
                variable: label.clone(),
                operator: op,
            }];
            let r = solve(&s, cfg)?;
            let rho = r.marginals[idx].marginal(&[a, b])?;
            Ok(SlicePoint {
                theta,
                x: rho.expectation(&xop)?,
                z: rho.expectation(&zop)?,
                support: -r.lower_bound_certified,
                converged: r.converged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::build_xxz;
    use crate::relaxations::build_loc_ti;

    #[test]
    fn bell_point_is_reached_at_theta_pi() {
        let spec = build_loc_ti(2, &build_xxz(0.0)).unwrap();
        let pts =
            slice_support_scan(&spec, &[std::f64::consts::PI], &SolverConfig::default()).unwrap();
        assert!((pts[0].x + 1.0).abs() < 1e-4, "{:?}", pts[0]);
        assert!((pts[0].support - 1.0).abs() < 1e-4);
    }
}
