use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How entropy multipliers are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureMode {
    /// Multipliers are dual variables updated with the consistency duals.
    Adaptive,
    /// Multiplier of a single entropy constraint fixed per solve and chosen
    /// by golden-section search over `log T`.
    GoldenSection,
}

/// Bracket and budget of the golden-section temperature search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSearch {
    pub t_min: f64,
    pub t_max: f64,
    pub evaluations: usize,
}

impl Default for TemperatureSearch {
    fn default() -> Self {
        TemperatureSearch {
            t_min: 1e-3,
            t_max: 10.0,
            evaluations: 24,
        }
    }
}

/// Solver parameters. Unset step sizes default to `0.9/L` scaled by
/// `step_ratio`, where `L` bounds the consistency-map norm; the temperature
/// step defaults to a quarter of the dual step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Largest entry of any consistency residual at convergence.
    pub primal_tol: f64,
    /// Largest multiplier change per iteration at convergence.
    pub dual_tol: f64,
    /// Largest `|objective − certified bound|` at convergence.
    pub gap_tol: f64,
    pub step_primal: Option<f64>,
    pub step_dual: Option<f64>,
    pub step_temperature: Option<f64>,
    /// `step_primal / step_dual` used when both are unset.
    pub step_ratio: f64,
    pub temperature_mode: TemperatureMode,
    pub temperature_search: TemperatureSearch,
    /// Eigenvalue floor for marginal logarithms in primal steps.
    pub eig_floor: f64,
    pub seed: u64,
    /// Iterations between residual checks.
    pub check_every: usize,
    /// Iterations between certifications.
    pub certify_every: usize,
    /// Target duality gap of each certification subproblem.
    pub sub_tol: f64,
    pub sub_max_iters: usize,
    /// Optional CSV trace of the iteration.
    pub trace_path: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 20_000,
            primal_tol: 1e-6,
            dual_tol: 1e-6,
            gap_tol: 1e-5,
            step_primal: None,
            step_dual: None,
            step_temperature: None,
            step_ratio: 4.0,
            temperature_mode: TemperatureMode::Adaptive,
            temperature_search: TemperatureSearch::default(),
            eig_floor: 1e-12,
            seed: 0,
            check_every: 25,
            certify_every: 500,
            sub_tol: 1e-8,
            sub_max_iters: 500,
            trace_path: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {x}"
                )))
            }
        };
        positive("primal_tol", self.primal_tol)?;
        positive("dual_tol", self.dual_tol)?;
        positive("gap_tol", self.gap_tol)?;
        positive("step_ratio", self.step_ratio)?;
        positive("sub_tol", self.sub_tol)?;
        positive("eig_floor", self.eig_floor)?;
        for (name, s) in [
            ("step_primal", self.step_primal),
            ("step_dual", self.step_dual),
            ("step_temperature", self.step_temperature),
        ] {
            if let Some(s) = s {
                positive(name, s)?;
            }
        }
        if self.max_iters == 0 || self.check_every == 0 || self.certify_every == 0 {
            return Err(Error::InvalidConfig(
                "iteration counts must be positive".into(),
            ));
        }
        let ts = &self.temperature_search;
        if !(ts.t_min > 0.0 && ts.t_max > ts.t_min && ts.t_max.is_finite()) || ts.evaluations < 3 {
            return Err(Error::InvalidConfig(format!(
                "bad temperature search {ts:?}"
            )));
        }
        Ok(())
    }

    /// Primal and dual steps for a consistency map of norm at most `norm`.
    pub(crate) fn steps(&self, norm: f64) -> Result<(f64, f64, f64)> {
        let base = if norm > 0.0 { 0.9 / norm } else { 1.0 };
        let (tau, sigma) = match (self.step_primal, self.step_dual) {
            (Some(t), Some(s)) => (t, s),
            (Some(t), None) => (
                t,
                if norm > 0.0 {
                    0.81 / (t * norm * norm)
                } else {
                    1.0
                },
            ),
            (None, Some(s)) => (
                if norm > 0.0 {
                    0.81 / (s * norm * norm)
                } else {
                    1.0
                },
                s,
            ),
            (None, None) => (base * self.step_ratio.sqrt(), base / self.step_ratio.sqrt()),
        };
        if tau * sigma * norm * norm > 1.0 + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "steps {tau} and {sigma} violate the stability condition for norm {norm}"
            )));
        }
        Ok((tau, sigma, self.step_temperature.unwrap_or(sigma / 4.0)))
    }
}
