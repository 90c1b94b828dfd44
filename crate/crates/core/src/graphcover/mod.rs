//! Partition of a connected graph's edges into disjoint adjacent pairs (plus
//! at most one leftover edge) and the resulting energy bound for
//! singlet-projector Hamiltonians.

mod graph;
mod pairing;

pub use graph::Graph;
pub use pairing::{edge_pair_cover, epr_wm_bound, EdgePairing, PairBound, WM2_EDGE_VALUE};
