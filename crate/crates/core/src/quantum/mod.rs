//! Dense quantum-state linear algebra: site systems, Hermitian operators,
//! density matrices, tensor products, partial traces, entropies, Gibbs
//! states, and smallest eigenvalues.

pub mod entropy;
pub mod gibbs;
pub mod legs;
pub mod linalg;
pub mod matrix_json;
pub mod operator;
pub mod pauli;
pub mod spectrum;
pub mod system;

pub use entropy::{
    binary_entropy, conditional_entropy, conditional_entropy_gradient, shannon_bits,
    von_neumann_entropy, EigenFloor,
};
pub use gibbs::{free_energy, gibbs_state, thermal_state};
pub use linalg::CMatrix;
pub use operator::{partial_trace, tensor, Bipartition, DensityMatrix, HermitianOperator};
pub use spectrum::{
    lanczos_ground_state, min_eigenvalue, LanczosConfig, LanczosResult, LinearOperator,
};
pub use system::{SiteSystem, MAX_DENSE_DIM, MAX_MATRIX_FREE_DIM};
