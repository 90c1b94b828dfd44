//! Rigorous lower bounds from dual multipliers.
//!
//! For fixed multipliers the Lagrangian separates into one problem per
//! variable, `min_ρ Tr[Mρ] + s Tr[ρ ln ρ] − Σ_t w_t Tr[ρ_B ln ρ_B]`, which is
//! convex. Each is approximately solved through its smooth dual in the
//! marginal logarithms, and the bound is the Frank–Wolfe value
//! `f(ρ̂) + λ_min(∇f(ρ̂)) − Tr[∇f(ρ̂) ρ̂]`, valid for any full-rank `ρ̂`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::lbfgs::{minimize, LbfgsOptions};
use super::problem::Problem;
use crate::error::{Error, Result};
use crate::quantum::linalg::{self, eigh, eigvalsh_min, log_sum_exp, trace_product, CMatrix};

const LOG_FLOOR: f64 = 1e-300;

/// Coordinates of a Hermitian matrix in an orthonormal real basis.
pub(crate) fn herm_to_vec(m: &CMatrix, out: &mut Vec<f64>) {
    let n = m.nrows();
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(r2 * m[(i, j)].re);
            out.push(-r2 * m[(i, j)].im);
        }
    }
}

pub(crate) fn vec_to_herm(x: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        m[(i, i)] = Complex64::new(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(x[k] * r2, -x[k + 1] * r2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Gibbs state of `e` with exact log-probabilities.
struct Gibbs {
    lse: f64,
    logp: Vec<f64>,
    vectors: CMatrix,
}

impl Gibbs {
    fn new(e: &CMatrix) -> Self {
        let eig = eigh(e);
        let lse = log_sum_exp(&eig.values);
        Gibbs {
            lse,
            logp: eig.values.iter().map(|v| v - lse).collect(),
            vectors: eig.vectors,
        }
    }

    fn rho(&self) -> CMatrix {
        let p: Vec<f64> = self.logp.iter().map(|l| l.exp()).collect();
        linalg::reassemble(&self.vectors, &p)
    }

    fn log(&self) -> CMatrix {
        linalg::reassemble(&self.vectors, &self.logp)
    }

    /// `Tr ρ ln ρ`.
    fn neg_entropy(&self) -> f64 {
        self.logp.iter().map(|l| l.exp() * l).sum()
    }
}

/// `(Tr ρ ln ρ, ln ρ)` with eigenvalues clamped below by a tiny floor.
fn log_and_neg_entropy(rho: &CMatrix) -> (f64, CMatrix) {
    let eig = eigh(rho);
    let ne = eig
        .values
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|q| q * q.ln())
        .sum();
    (ne, eig.map(|q| q.max(LOG_FLOOR).ln()))
}

pub(crate) struct SubproblemOptions {
    pub tol: f64,
    pub max_iters: usize,
}

/// Lower bound on the subproblem of variable `v` with linear block `m`.
/// The dual search starts from the marginals of `exp(−m/s)`.
pub(crate) fn certify_variable(
    p: &Problem,
    v: usize,
    m: &CMatrix,
    weights: &[f64],
    opts: &SubproblemOptions,
) -> f64 {
    let lam = eigvalsh_min(m);
    let terms = &p.var_terms[v];
    let s: f64 = terms.iter().map(|&t| weights[t]).sum();
    if s <= 0.0 {
        return lam;
    }
    let slack: f64 = terms
        .iter()
        .map(|&t| weights[t] * (p.terms[t].a_dim as f64).ln())
        .sum();
    let trivial = lam - slack;
    if slack <= opts.tol {
        return trivial;
    }
    let cond: Vec<usize> = terms
        .iter()
        .copied()
        .filter(|&t| p.terms[t].bmap.is_some())
        .collect();
    let bdims: Vec<usize> = cond
        .iter()
        .map(|&t| p.terms[t].bmap.as_ref().unwrap().kept_dim())
        .collect();

    let exponent = |xs: &[CMatrix]| {
        let mut e = -m;
        for (&t, x) in cond.iter().zip(xs) {
            p.terms[t]
                .bmap
                .as_ref()
                .unwrap()
                .embed_add(x, weights[t], &mut e);
        }
        e / Complex64::new(s, 0.0)
    };
    let unpack = |x: &[f64]| {
        let mut out = Vec::with_capacity(bdims.len());
        let mut k = 0;
        for &d in &bdims {
            out.push(vec_to_herm(&x[k..k + d * d], d));
            k += d * d;
        }
        out
    };
    let frank_wolfe = |x: &[f64]| -> (f64, f64) {
        let g = Gibbs::new(&exponent(&unpack(x)));
        let rho = g.rho();
        let mut f = trace_product(m, &rho) + s * g.neg_entropy();
        let mut grad = m + g.log() * Complex64::new(s, 0.0);
        for &t in &cond {
            let map = p.terms[t].bmap.as_ref().unwrap();
            let (ne, ln_b) = log_and_neg_entropy(&map.reduce(&rho));
            f -= weights[t] * ne;
            map.embed_add(&ln_b, -weights[t], &mut grad);
        }
        linalg::hermitize(&mut grad);
        let gap = (trace_product(&grad, &rho) - eigvalsh_min(&grad)).max(0.0);
        (f - gap, gap)
    };

    let mut x0 = Vec::new();
    let rho = Gibbs::new(&(-m / Complex64::new(s, 0.0))).rho();
    for &t in &cond {
        let (_, ln_b) = log_and_neg_entropy(&p.terms[t].bmap.as_ref().unwrap().reduce(&rho));
        herm_to_vec(&ln_b, &mut x0);
    }
    let (mut best, gap0) = frank_wolfe(&x0);
    if gap0 <= opts.tol || cond.is_empty() {
        return best.max(trivial);
    }
    let psi = |x: &[f64]| -> (f64, Vec<f64>) {
        let xs = unpack(x);
        let g = Gibbs::new(&exponent(&xs));
        let rho = g.rho();
        let mut val = -s * g.lse;
        let mut grad = Vec::with_capacity(x.len());
        for (&t, xt) in cond.iter().zip(&xs) {
            let gt = Gibbs::new(xt);
            val += weights[t] * gt.lse;
            let diff = (gt.rho() - p.terms[t].bmap.as_ref().unwrap().reduce(&rho))
                * Complex64::new(weights[t], 0.0);
            herm_to_vec(&diff, &mut grad);
        }
        (val, grad)
    };
    let lopts = LbfgsOptions {
        max_iters: opts.max_iters,
        ..Default::default()
    };
    let (x, _) = minimize(psi, x0, &lopts, |it, x, _| {
        if it % 10 != 0 {
            return false;
        }
        let (b, gap) = frank_wolfe(x);
        best = best.max(b);
        gap <= opts.tol
    });
    let (b, _) = frank_wolfe(&x);
    best.max(b).max(trivial)
}

/// `Σ_v` subproblem bounds: a valid lower bound on the relaxation value for
/// any consistency multipliers and nonnegative entropy multipliers.
pub(crate) fn certify_problem(
    p: &Problem,
    duals: &[CMatrix],
    temperatures: &[f64],
    opts: &SubproblemOptions,
) -> Result<f64> {
    if let Some(&t) = temperatures.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::NegativeMultiplier(t));
    }
    let blocks = p.linear_blocks(duals);
    let weights = p.term_weights(temperatures);
    let bounds: Vec<f64> = (0..p.vars.len())
        .into_par_iter()
        .map(|v| certify_variable(p, v, &blocks[v], &weights, opts))
        .collect();
    Ok(bounds.iter().sum())
}
