//! Numeric form of a [`RelaxationSpec`]: dense per-variable objective
//! blocks, leg maps for every reduction, and entropy terms rewritten so each
//! acts on the full support of its variable.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quantum::legs::LegMap;
use crate::quantum::spectrum::DENSE_EIG_LIMIT;
use crate::quantum::CMatrix;
use crate::relaxations::RelaxationSpec;

pub(crate) struct VarData {
    pub dims: Vec<usize>,
    pub dim: usize,
}

pub(crate) struct ConsData {
    pub left: usize,
    pub lmap: LegMap,
    pub right: usize,
    pub rmap: LegMap,
}

impl ConsData {
    pub fn dim(&self) -> usize {
        self.lmap.kept_dim()
    }

    /// `R_left(ρ_left) − R_right(ρ_right)`.
    pub fn residual(&self, left: &CMatrix, right: &CMatrix) -> CMatrix {
        self.lmap.reduce(left) - self.rmap.reduce(right)
    }
}

/// Which multiplier scales an entropy term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TermOwner {
    Constraint(usize),
    Penalty,
}

/// `coefficient · S(A|B)` where `A ∪ B` is the whole support of `var`.
pub(crate) struct TermData {
    pub var: usize,
    pub owner: TermOwner,
    pub coefficient: f64,
    /// Reduction onto `B`; `None` when `B` is empty.
    pub bmap: Option<LegMap>,
    pub a_dim: usize,
}

pub(crate) struct Problem {
    pub vars: Vec<VarData>,
    pub n_spec_vars: usize,
    pub cons: Vec<ConsData>,
    /// Objective block of every variable (zero for auxiliary variables).
    pub h: Vec<CMatrix>,
    pub terms: Vec<TermData>,
    /// Term indices per variable.
    pub var_terms: Vec<Vec<usize>>,
    pub n_constraints: usize,
    pub penalty_temperature: f64,
}

impl Problem {
    pub fn compile(spec: &RelaxationSpec) -> Result<Self> {
        spec.validate()?;
        let mut vars = Vec::new();
        let mut supports: Vec<Vec<usize>> = Vec::new();
        for v in &spec.variables {
            let dims: Vec<usize> = v
                .support
                .iter()
                .map(|&s| spec.system.local_dim(s).unwrap())
                .collect();
            let dim: usize = dims.iter().product();
            if dim > DENSE_EIG_LIMIT {
                return Err(Error::DimensionBudget {
                    dim,
                    budget: DENSE_EIG_LIMIT,
                });
            }
            vars.push(VarData { dims, dim });
            supports.push(v.support.clone());
        }
        let n_spec_vars = vars.len();
        let index: BTreeMap<&str, usize> = spec
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.label.as_str(), i))
            .collect();

        let positions = |supports: &[Vec<usize>], v: usize, keep: &[usize]| -> Vec<usize> {
            keep.iter()
                .map(|s| supports[v].binary_search(s).unwrap())
                .collect()
        };
        let mut cons = Vec::new();
        for c in &spec.consistency {
            let l = index[c.left.variable.as_str()];
            let r = index[c.right.variable.as_str()];
            cons.push(ConsData {
                left: l,
                lmap: LegMap::new(&vars[l].dims, &positions(&supports, l, &c.left.keep)),
                right: r,
                rmap: LegMap::new(&vars[r].dims, &positions(&supports, r, &c.right.keep)),
            });
        }

        let mut h: Vec<CMatrix> = vars.iter().map(|v| CMatrix::zeros(v.dim, v.dim)).collect();
        for o in &spec.objective {
            let v = index[o.variable.as_str()];
            let target = spec.system.subsystem(&supports[v])?;
            h[v] += o.operator.embed(&target)?.matrix();
        }

        let mut owned: Vec<(TermOwner, &crate::relaxations::EntropyTerm)> = Vec::new();
        for (k, c) in spec.entropy_constraints.iter().enumerate() {
            owned.extend(c.terms.iter().map(|t| (TermOwner::Constraint(k), t)));
        }
        let mut penalty_temperature = 0.0;
        if let Some(p) = &spec.entropy_penalty {
            penalty_temperature = p.temperature;
            owned.extend(p.terms.iter().map(|t| (TermOwner::Penalty, t)));
        }

        let mut terms = Vec::new();
        for (owner, t) in owned {
            let home = index[t.variable.as_str()];
            let ab = t.part.union();
            let var = if ab == supports[home] {
                home
            } else if let Some(v) = supports.iter().position(|s| *s == ab) {
                v
            } else {
                let dims: Vec<usize> = ab
                    .iter()
                    .map(|&s| spec.system.local_dim(s).unwrap())
                    .collect();
                let dim = dims.iter().product();
                let aux = vars.len();
                vars.push(VarData { dims, dim });
                supports.push(ab.clone());
                h.push(CMatrix::zeros(dim, dim));
                let all: Vec<usize> = (0..ab.len()).collect();
                cons.push(ConsData {
                    left: aux,
                    lmap: LegMap::new(&vars[aux].dims, &all),
                    right: home,
                    rmap: LegMap::new(&vars[home].dims, &positions(&supports, home, &ab)),
                });
                aux
            };
            let bpos = positions(&supports, var, t.part.part_b());
            let bmap = (!bpos.is_empty()).then(|| LegMap::new(&vars[var].dims, &bpos));
            let a_dim = t
                .part
                .part_a()
                .iter()
                .map(|&s| spec.system.local_dim(s).unwrap())
                .product();
            terms.push(TermData {
                var,
                owner,
                coefficient: t.coefficient,
                bmap,
                a_dim,
            });
        }
        let mut var_terms = vec![Vec::new(); vars.len()];
        for (i, t) in terms.iter().enumerate() {
            var_terms[t.var].push(i);
        }
        Ok(Problem {
            vars,
            n_spec_vars,
            cons,
            h,
            terms,
            var_terms,
            n_constraints: spec.entropy_constraints.len(),
            penalty_temperature,
        })
    }

    /// Multiplier of a term's owner: a constraint temperature or the fixed
    /// penalty temperature.
    pub fn owner_temperature(&self, owner: TermOwner, temperatures: &[f64]) -> f64 {
        match owner {
            TermOwner::Constraint(k) => temperatures[k],
            TermOwner::Penalty => self.penalty_temperature,
        }
    }

    /// Weight in nats units, `T · coefficient / ln 2`, of every term.
    pub fn term_weights(&self, temperatures: &[f64]) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| self.owner_temperature(t.owner, temperatures) * t.coefficient / LN_2)
            .collect()
    }

    /// `h_v + Σ R†(Y)` with the sign of the side the variable sits on.
    pub fn linear_blocks(&self, duals: &[CMatrix]) -> Vec<CMatrix> {
        let mut m = self.h.clone();
        for (c, y) in self.cons.iter().zip(duals) {
            c.lmap.embed_add(y, 1.0, &mut m[c.left]);
            c.rmap.embed_add(y, -1.0, &mut m[c.right]);
        }
        m
    }

    /// Euclidean-norm bound on the consistency map measured from the trace
    /// norm: each reduction is trace-norm contractive, so
    /// `‖A ρ‖² ≤ 2 · max_v deg(v) · Σ_v ‖ρ_v‖₁²`.
    pub fn consistency_norm_bound(&self) -> f64 {
        let mut degree = vec![0usize; self.vars.len()];
        for c in &self.cons {
            degree[c.left] += 1;
            degree[c.right] += 1;
        }
        (2.0 * *degree.iter().max().unwrap_or(&0) as f64).sqrt()
    }

    /// Power-iteration estimate of the Euclidean operator norm of the
    /// consistency map, from a seeded random start.
    pub fn consistency_norm_estimate(&self, iterations: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        if self.cons.is_empty() {
            return 0.0;
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<CMatrix> = self
            .vars
            .iter()
            .map(|v| {
                let mut m = CMatrix::from_fn(v.dim, v.dim, |_, _| {
                    num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                crate::quantum::linalg::hermitize(&mut m);
                m
            })
            .collect();
        let norm = |x: &[CMatrix]| x.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let n = norm(&x);
            if n == 0.0 {
                return 0.0;
            }
            x.iter_mut()
                .for_each(|m| *m /= num_complex::Complex64::new(n, 0.0));
            let ax: Vec<CMatrix> = self
                .cons
                .iter()
                .map(|c| c.residual(&x[c.left], &x[c.right]))
                .collect();
            let mut atax: Vec<CMatrix> = self
                .vars
                .iter()
                .map(|v| CMatrix::zeros(v.dim, v.dim))
                .collect();
            for (c, y) in self.cons.iter().zip(&ax) {
                c.lmap.embed_add(y, 1.0, &mut atax[c.left]);
                c.rmap.embed_add(y, -1.0, &mut atax[c.right]);
            }
            estimate = norm(&atax).sqrt();
            x = atax;
        }
        estimate
    }
}
