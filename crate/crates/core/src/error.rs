use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid site system: {0}")]
    InvalidSystem(String),
    #[error("dimension {dim} exceeds the dense budget of {budget}")]
    DimensionBudget { dim: usize, budget: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (deviation {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("site sets overlap: {0:?}")]
    OverlappingSites(Vec<usize>),
    #[error("sites {0:?} are not part of the system")]
    NotASubset(Vec<usize>),
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("smallest eigenvalue {min_eigenvalue:e} is below the floor {floor:e}")]
    SingularState { min_eigenvalue: f64, floor: f64 },
    #[error("Lanczos did not converge after {restarts} restarts (residual {residual:e})")]
    LanczosNotConverged { restarts: usize, residual: f64 },
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid relaxation: {0}")]
    InvalidSpec(String),
    #[error("term on sites {0:?} is not covered by any variable")]
    NotCovered(Vec<usize>),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("solver produced a non-finite iterate at iteration {0}")]
    NonFinite(usize),
    #[error("solver duals diverged at iteration {0}; the relaxation looks infeasible")]
    Diverged(usize),
    #[error("entropy multiplier {0} is negative")]
    NegativeMultiplier(f64),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
