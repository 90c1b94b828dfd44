//! Relaxation specifications and the builders for the local-consistency,
//! weak-monotonicity, Markov-entropy-decomposition and translation-invariant
//! families.

mod loc;
mod med;
mod slice;
mod spec;
mod ti;
mod wm;

pub use loc::{build_loc, build_loc_for, loc_supports, SupportScheme};
pub use med::{build_med_constraints, build_med_free_energy, MarkovShieldPlan};
pub use slice::{slice_functional, slice_support_scan, SlicePoint};
pub use spec::{
    support_label, ConsistencyConstraint, EntropyConstraint, EntropyPenalty, EntropyTerm,
    Feasibility, ObjectiveTerm, Reduction, RelaxationSpec, Variable, SPEC_SCHEMA,
};
pub use ti::{build_loc_ti, build_wm_ti, CHAIN_VARIABLE};
pub use wm::{build_wm, wm_triples, WmOptions, WmTriple, DEFAULT_WM_TRIPLE_CAP};
