//! Primal-dual iteration with entropic mirror steps.
//!
//! Primal step per variable: the Lagrangian is linearised in the concave
//! marginal-entropy part and the Bregman proximal problem of the remaining
//! `Tr[Mρ] + s Tr[ρ ln ρ]` is solved in closed form as a Gibbs state. Dual
//! steps ascend on the consistency residuals and, in adaptive mode, on the
//! entropy multipliers (projected onto `T ≥ 0`).

use std::f64::consts::LN_2;
use std::fs::File;

use num_complex::Complex64;
use rayon::prelude::*;

use super::certify::{certify_problem, SubproblemOptions};
use super::config::SolverConfig;
use super::problem::{Problem, TermOwner};
use crate::error::{Error, Result};
use crate::quantum::linalg::{self, eigh, log_sum_exp, trace_product, CMatrix};

const DIVERGENCE_LIMIT: f64 = 1e10;

#[derive(Clone)]
pub(crate) struct VarState {
    pub log: CMatrix,
    pub rho: CMatrix,
    /// Entropy in nats.
    pub entropy: f64,
}

impl VarState {
    fn maximally_mixed(dim: usize) -> Self {
        let d = dim as f64;
        VarState {
            log: CMatrix::identity(dim, dim) * Complex64::new(-d.ln(), 0.0),
            rho: CMatrix::identity(dim, dim) / Complex64::new(d, 0.0),
            entropy: d.ln(),
        }
    }
}

#[derive(Clone)]
pub(crate) struct TermState {
    /// Floored logarithm of the conditioning marginal (empty when there is none).
    pub ln_b: CMatrix,
    /// Entropy of the conditioning marginal in nats.
    pub entropy_b: f64,
}

pub(crate) struct RunOutput {
    pub states: Vec<VarState>,
    pub duals: Vec<CMatrix>,
    pub temperatures: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub bound: f64,
    pub objective: f64,
    pub consistency: f64,
    pub entropy_slacks: Vec<f64>,
}

fn term_state(p: &Problem, t: usize, rho: &CMatrix, floor: f64) -> TermState {
    match &p.terms[t].bmap {
        None => TermState {
            ln_b: CMatrix::zeros(0, 0),
            entropy_b: 0.0,
        },
        Some(map) => {
            let eig = eigh(&map.reduce(rho));
            let entropy_b = -eig
                .values
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|q| q * q.ln())
                .sum::<f64>();
            TermState {
                ln_b: eig.map(|q| q.max(floor).ln()),
                entropy_b,
            }
        }
    }
}

/// Entropy (bits) of every constraint, and of the penalty.
fn entropies(p: &Problem, states: &[VarState], terms: &[TermState]) -> (Vec<f64>, f64) {
    let mut per = vec![0.0; p.n_constraints];
    let mut pen = 0.0;
    for (td, ts) in p.terms.iter().zip(terms) {
        let e = td.coefficient * (states[td.var].entropy - ts.entropy_b) / LN_2;
        match td.owner {
            TermOwner::Constraint(k) => per[k] += e,
            TermOwner::Penalty => pen += e,
        }
    }
    (per, pen)
}

fn consistency_residual(p: &Problem, states: &[VarState]) -> f64 {
    p.cons
        .iter()
        .map(|c| linalg::max_abs(&c.residual(&states[c.left].rho, &states[c.right].rho)))
        .fold(0.0, f64::max)
}

pub(crate) fn certify_state(
    p: &Problem,
    duals: &[CMatrix],
    temperatures: &[f64],
    cfg: &SolverConfig,
) -> Result<f64> {
    let opts = SubproblemOptions {
        tol: cfg.sub_tol,
        max_iters: cfg.sub_max_iters,
    };
    certify_problem(p, duals, temperatures, &opts)
}

struct Trace {
    writer: csv::Writer<File>,
}

impl Trace {
    fn open(cfg: &SolverConfig) -> Result<Option<Self>> {
        let Some(path) = &cfg.trace_path else {
            return Ok(None);
        };
        let mut writer = csv::Writer::from_writer(File::create(path)?);
        writer.write_record([
            "iter",
            "objective",
            "consistency",
            "dual_change",
            "bound",
            "max_temperature",
        ])?;
        Ok(Some(Trace { writer }))
    }

    fn row(
        &mut self,
        it: usize,
        obj: f64,
        res: f64,
        dchange: f64,
        bound: f64,
        tmax: f64,
    ) -> Result<()> {
        let f = |x: f64| format!("{x:.12e}");
        self.writer.write_record([
            it.to_string(),
            f(obj),
            f(res),
            f(dchange),
            f(bound),
            f(tmax),
        ])?;
        Ok(())
    }
}

/// Runs the iteration from the maximally mixed state. Temperatures start at
/// `initial` and are updated only when `adaptive` is set.
pub(crate) fn run(
    p: &Problem,
    cfg: &SolverConfig,
    initial: Vec<f64>,
    adaptive: bool,
) -> Result<RunOutput> {
    let norm = p
        .consistency_norm_bound()
        .min(1.01 * p.consistency_norm_estimate(50, cfg.seed));
    let (tau, sigma, sigma_t) = cfg.steps(norm)?;
    let mut trace = Trace::open(cfg)?;

    let mut states: Vec<VarState> = p
        .vars
        .iter()
        .map(|v| VarState::maximally_mixed(v.dim))
        .collect();
    let mut terms: Vec<TermState> = (0..p.terms.len())
        .map(|t| term_state(p, t, &states[p.terms[t].var].rho, cfg.eig_floor))
        .collect();
    let mut duals: Vec<CMatrix> = p
        .cons
        .iter()
        .map(|c| CMatrix::zeros(c.dim(), c.dim()))
        .collect();
    let mut temps = initial;
    let (mut ent, _) = entropies(p, &states, &terms);

    let mut best = f64::NEG_INFINITY;
    let mut last_cert = 0;
    let mut converged = false;
    let mut iters = 0;
    let mut objective = f64::NAN;
    let mut residual = f64::INFINITY;

    for it in 1..=cfg.max_iters {
        iters = it;
        let blocks = p.linear_blocks(&duals);
        let weights = p.term_weights(&temps);
        let new_states: Vec<VarState> = (0..p.vars.len())
            .into_par_iter()
            .map(|v| {
                let ts = &p.var_terms[v];
                let s: f64 = ts.iter().map(|&t| weights[t]).sum();
                let mut z = &states[v].log / Complex64::new(tau, 0.0) - &blocks[v];
                for &t in ts {
                    if let Some(map) = &p.terms[t].bmap {
                        map.embed_add(&terms[t].ln_b, weights[t], &mut z);
                    }
                }
                z /= Complex64::new(1.0 / tau + s, 0.0);
                linalg::hermitize(&mut z);
                let eig = eigh(&z);
                let lse = log_sum_exp(&eig.values);
                let logp: Vec<f64> = eig.values.iter().map(|x| x - lse).collect();
                let prob: Vec<f64> = logp.iter().map(|l| l.exp()).collect();
                let entropy = -prob.iter().zip(&logp).map(|(a, b)| a * b).sum::<f64>();
                VarState {
                    log: linalg::reassemble(&eig.vectors, &logp),
                    rho: linalg::reassemble(&eig.vectors, &prob),
                    entropy,
                }
            })
            .collect();
        if new_states
            .iter()
            .any(|s| !s.entropy.is_finite() || s.rho.iter().any(|z| !z.re.is_finite()))
        {
            return Err(Error::NonFinite(it));
        }
        let new_terms: Vec<TermState> = (0..p.terms.len())
            .into_par_iter()
            .map(|t| term_state(p, t, &new_states[p.terms[t].var].rho, cfg.eig_floor))
            .collect();
        let (new_ent, _) = entropies(p, &new_states, &new_terms);

        let mut dchange: f64 = 0.0;
        for (c, y) in p.cons.iter().zip(duals.iter_mut()) {
            let l = &new_states[c.left].rho * Complex64::new(2.0, 0.0) - &states[c.left].rho;
            let r = &new_states[c.right].rho * Complex64::new(2.0, 0.0) - &states[c.right].rho;
            let step = c.residual(&l, &r) * Complex64::new(sigma, 0.0);
            dchange = dchange.max(linalg::max_abs(&step));
            *y += step;
        }
        if adaptive {
            for (k, t) in temps.iter_mut().enumerate() {
                let next = (*t - sigma_t * (2.0 * new_ent[k] - ent[k])).max(0.0);
                dchange = dchange.max((next - *t).abs());
                *t = next;
            }
        }
        states = new_states;
        terms = new_terms;
        ent = new_ent;
        if duals.iter().any(|y| linalg::max_abs(y) > DIVERGENCE_LIMIT)
            || temps.iter().any(|&t| t > DIVERGENCE_LIMIT)
        {
            return Err(Error::Diverged(it));
        }

        if it % cfg.check_every == 0 || it == cfg.max_iters {
            residual = consistency_residual(p, &states);
            let min_slack = ent.iter().copied().fold(f64::INFINITY, f64::min);
            let feasible =
                residual <= cfg.primal_tol && (!adaptive || min_slack >= -cfg.primal_tol);
            let settled = feasible && dchange <= cfg.dual_tol;
            if it % cfg.certify_every == 0
                || (settled && it - last_cert >= cfg.check_every)
                || it == cfg.max_iters
            {
                best = best.max(certify_state(p, &duals, &temps, cfg)?);
                last_cert = it;
            }
            let (lin, lagrangian) = objectives(p, &states, &temps, &ent, &terms);
            objective = lin;
            if let Some(tr) = trace.as_mut() {
                tr.row(
                    it,
                    objective,
                    residual,
                    dchange,
                    best,
                    temps.iter().copied().fold(0.0, f64::max),
                )?;
            }
            if settled && (lagrangian - best).abs() <= cfg.gap_tol {
                converged = true;
                break;
            }
        }
    }
    if let Some(tr) = trace.as_mut() {
        tr.writer.flush()?;
    }
    Ok(RunOutput {
        states,
        duals,
        temperatures: temps,
        iters,
        converged,
        bound: best,
        objective,
        consistency: residual,
        entropy_slacks: ent,
    })
}

/// Spec objective (linear part minus the entropy penalty) and the
/// Lagrangian value at the current temperatures.
fn objectives(
    p: &Problem,
    states: &[VarState],
    temps: &[f64],
    ent: &[f64],
    terms: &[TermState],
) -> (f64, f64) {
    let (_, pen) = entropies(p, states, terms);
    let lin: f64 =
        p.h.iter()
            .zip(states)
            .map(|(h, s)| trace_product(h, &s.rho))
            .sum::<f64>()
            - p.penalty_temperature * pen;
    let lagrangian = lin - temps.iter().zip(ent).map(|(t, e)| t * e).sum::<f64>();
    (lin, lagrangian)
}
