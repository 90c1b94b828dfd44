//! First-order solver for relaxation specs with certified lower bounds.
//!
//! [`solve`] runs a primal-dual hybrid gradient iteration whose primal steps
//! are Gibbs states, and periodically evaluates the dual function with
//! [`certify`]. The reported `lower_bound_certified` is the best dual value
//! seen, a valid bound whether or not the iteration converged.

mod certify;
mod config;
mod lbfgs;
mod pdhg;
mod problem;
mod temperature;

use serde::{Deserialize, Serialize};

pub use config::{SolverConfig, TemperatureMode, TemperatureSearch};
pub use temperature::{
    med_temperature_search, med_temperature_sweep, SweepPoint, TemperatureSweep,
};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, HermitianOperator};
use crate::relaxations::RelaxationSpec;
use problem::Problem;

mod matrix_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::quantum::matrix_json::{from_rows, to_rows};
    use crate::quantum::CMatrix;

    type Rows = Vec<Vec<[f64; 2]>>;

    pub fn serialize<S: Serializer>(m: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(to_rows).collect::<Vec<Rows>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let rows: Vec<Rows> = Vec::deserialize(d)?;
        rows.iter()
            .map(|r| from_rows(r).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Dual multipliers: one matrix per compiled consistency constraint (the
/// relaxation's own constraints first, then those tying auxiliary variables to their
/// parents) and one temperature per entropy constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Duals {
    #[serde(with = "matrix_list")]
    pub consistency: Vec<CMatrix>,
    pub temperatures: Vec<f64>,
}

impl Duals {
    /// All-zero multipliers shaped for `spec`.
    pub fn zeros(spec: &RelaxationSpec) -> Result<Self> {
        let p = Problem::compile(spec)?;
        Ok(Duals {
            consistency: p
                .cons
                .iter()
                .map(|c| CMatrix::zeros(c.dim(), c.dim()))
                .collect(),
            temperatures: vec![0.0; p.n_constraints],
        })
    }
}

/// Final feasibility and optimality measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest entry of any consistency residual.
    pub consistency_inf_norm: f64,
    /// Value (bits) of every entropy constraint; negative means violated.
    pub entropy_slacks: Vec<f64>,
    /// `|objective_primal − lower_bound_certified|`.
    pub gap_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub lower_bound_certified: f64,
    pub objective_primal: f64,
    /// One state per spec variable, in declaration order.
    pub marginals: Vec<DensityMatrix>,
    pub duals: Duals,
    pub residuals: Residuals,
    pub iters: usize,
    pub converged: bool,
}

fn result_from(
    spec: &RelaxationSpec,
    p: &Problem,
    out: pdhg::RunOutput,
    extra_iters: usize,
) -> Result<SolverResult> {
    let mut marginals = Vec::with_capacity(p.n_spec_vars);
    for (v, s) in spec.variables.iter().zip(&out.states) {
        let sys = spec.system.subsystem(&v.support)?;
        marginals.push(DensityMatrix::from_operator_unchecked(
            HermitianOperator::from_parts_unchecked(sys, s.rho.clone()),
        ));
    }
    Ok(SolverResult {
        lower_bound_certified: out.bound,
        objective_primal: out.objective,
        marginals,
        duals: Duals {
            consistency: out.duals,
            temperatures: out.temperatures,
        },
        residuals: Residuals {
            consistency_inf_norm: out.consistency,
            entropy_slacks: out.entropy_slacks,
            gap_estimate: (out.objective - out.bound).abs(),
        },
        iters: out.iters + extra_iters,
        converged: out.converged,
    })
}

/// Solves `spec`, returning primal marginals, duals and a certified lower
/// bound on its optimal value. Hitting the iteration cap is not an error:
/// the result has `converged == false` and its bound remains valid.
pub fn solve(spec: &RelaxationSpec, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let p = Problem::compile(spec)?;
    match cfg.temperature_mode {
        TemperatureMode::Adaptive => {
            let out = pdhg::run(&p, cfg, vec![0.0; p.n_constraints], true)?;
            result_from(spec, &p, out, 0)
        }
        TemperatureMode::GoldenSection => {
            if p.n_constraints != 1 {
                return Err(Error::InvalidConfig(format!(
                    "golden-section temperature search needs exactly one entropy constraint, found {}",
                    p.n_constraints
                )));
            }
            let ts = cfg.temperature_search;
            let mut total = 0;
            let mut best: Option<pdhg::RunOutput> = None;
            let mut eval = |log_t: f64| -> Result<f64> {
                let out = pdhg::run(&p, cfg, vec![log_t.exp()], false)?;
                total += out.iters;
                let b = out.bound;
                if best.as_ref().map_or(true, |o| b > o.bound) {
                    best = Some(out);
                }
                Ok(b)
            };
            temperature::golden_section_max(
                &mut eval,
                ts.t_min.ln(),
                ts.t_max.ln(),
                ts.evaluations,
            )?;
            let out = best.expect("at least one evaluation");
            let iters = out.iters;
            result_from(spec, &p, out, total - iters)
        }
    }
}

/// Evaluates the dual function at `duals`: a lower bound on the optimal
/// value of `spec` for any consistency multipliers and any nonnegative
/// entropy multipliers.
pub fn certify(spec: &RelaxationSpec, duals: &Duals, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let p = Problem::compile(spec)?;
    if duals.consistency.len() != p.cons.len() || duals.temperatures.len() != p.n_constraints {
        return Err(Error::DimensionMismatch(format!(
            "expected {} consistency and {} entropy multipliers, got {} and {}",
            p.cons.len(),
            p.n_constraints,
            duals.consistency.len(),
            duals.temperatures.len()
        )));
    }
    for (c, y) in p.cons.iter().zip(&duals.consistency) {
        if y.nrows() != c.dim() || y.ncols() != c.dim() {
            return Err(Error::DimensionMismatch(format!(
                "multiplier of shape {:?}, expected {}",
                y.shape(),
                c.dim()
            )));
        }
    }
    let mut ys = duals.consistency.clone();
    ys.iter_mut().for_each(crate::quantum::linalg::hermitize);
    pdhg::certify_state(&p, &ys, &duals.temperatures, cfg)
}
