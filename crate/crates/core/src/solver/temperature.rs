use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve, SolverConfig};
use crate::error::{Error, Result};
use crate::relaxations::{build_med_free_energy, MarkovShieldPlan, RelaxationSpec};

/// Golden-section maximisation of `f` on `[lo, hi]` with `evaluations`
/// function calls. Returns the best abscissa and value seen.
pub(crate) fn golden_section_max(
    f: &mut impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    evaluations: usize,
) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 2..evaluations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Certified free-energy relaxation value at one temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub temperature: f64,
    /// Certified lower bound on `MED(T)`.
    pub value: f64,
    pub objective_primal: f64,
    pub iters: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSweep {
    /// Points in input order.
    pub points: Vec<SweepPoint>,
    /// Index of the largest value; `max_T MED(T)` lower-bounds the ground energy.
    pub argmax: usize,
}

impl TemperatureSweep {
    pub fn best(&self) -> &SweepPoint {
        &self.points[self.argmax]
    }
}

fn point(
    base: &RelaxationSpec,
    plan: &MarkovShieldPlan,
    t: f64,
    cfg: &SolverConfig,
) -> Result<SweepPoint> {
    let spec = build_med_free_energy(base, plan, t)?;
    let r = solve(&spec, cfg)?;
    Ok(SweepPoint {
        temperature: t,
        value: r.lower_bound_certified,
        objective_primal: r.objective_primal,
        iters: r.iters,
        converged: r.converged,
    })
}

/// Solves the free-energy relaxation at every temperature in parallel.
pub fn med_temperature_sweep(
    base: &RelaxationSpec,
    plan: &MarkovShieldPlan,
    temperatures: &[f64],
    cfg: &SolverConfig,
) -> Result<TemperatureSweep> {
    if temperatures.is_empty() {
        return Err(Error::InvalidConfig("no temperatures given".into()));
    }
    if let Some(t) = temperatures.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidSpec(format!(
            "temperature {t} must be finite and nonnegative"
        )));
    }
    let points: Vec<SweepPoint> = temperatures
        .par_iter()
        .map(|&t| point(base, plan, t, cfg))
        .collect::<Result<_>>()?;
    let argmax = (0..points.len())
        .max_by(|&a, &b| points[a].value.total_cmp(&points[b].value))
        .unwrap();
    Ok(TemperatureSweep { points, argmax })
}

/// Golden-section search of `max_T MED(T)` over `log T` in the configured
/// bracket, with `T = 0` evaluated as well. Points are sorted by temperature.
pub fn med_temperature_search(
    base: &RelaxationSpec,
    plan: &MarkovShieldPlan,
    cfg: &SolverConfig,
) -> Result<TemperatureSweep> {
    let ts = cfg.temperature_search;
    let mut points = vec![point(base, plan, 0.0, cfg)?];
    let mut eval = |log_t: f64| -> Result<f64> {
        let p = point(base, plan, log_t.exp(), cfg)?;
        let v = p.value;
        points.push(p);
        Ok(v)
    };
    golden_section_max(&mut eval, ts.t_min.ln(), ts.t_max.ln(), ts.evaluations)?;
    points.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
    let argmax = (0..points.len())
        .max_by(|&a, &b| points[a].value.total_cmp(&points[b].value))
        .unwrap();
    Ok(TemperatureSweep { points, argmax })
}
