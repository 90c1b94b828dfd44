pub mod error;
pub mod graphcover;
pub mod hamiltonians;
pub mod quantum;
pub mod relaxations;
pub mod solver;

pub use error::{Error, Result};
