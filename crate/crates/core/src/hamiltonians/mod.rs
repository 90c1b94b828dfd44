//! Hamiltonian instances, canonical marginal families, and the
//! exact-diagonalisation reference for finite systems and periodic rings.

mod builders;
mod instance;
mod local;
mod marginals;
mod ti;

pub use builders::{build_ghz_hyper, build_quantum_maxcut, build_three_site_epr};
pub use instance::Instance;
pub use local::{materialize, LocalHamiltonian, MatrixFree, DENSE_GROUND_LIMIT};
pub use marginals::{
    build_med_not_wm_marginals, build_wm_not_med_marginals, solve_werner_lambda,
    solve_wm_not_med_lambda, werner_state, MarginalAssignment, WERNER_TARGET_CONDITIONAL_ENTROPY,
};
pub use ti::{
    build_xxz, extrapolate_energy_density, ti_ground_energy_density, EnergyDensityExtrapolation,
    TIChainTerm, EXTRAPOLATION_RINGS, MAX_RING_SITES,
};
