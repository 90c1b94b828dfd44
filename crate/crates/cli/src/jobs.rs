use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use entrobound::graphcover::{epr_wm_bound, Graph};
use entrobound::hamiltonians::{
    extrapolate_energy_density, ti_ground_energy_density, Instance, LocalHamiltonian,
    EXTRAPOLATION_RINGS,
};
use entrobound::relaxations::{
    build_loc_for, build_loc_ti, build_med_constraints, build_wm, build_wm_ti, slice_support_scan,
    MarkovShieldPlan, RelaxationSpec, SupportScheme, WmOptions,
};
use entrobound::solver::{solve, SolverConfig, SolverResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::fmt12;

/// Default ring size of `ed` on chain instances.
pub const DEFAULT_ED_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Relaxation {
    Loc,
    Wm,
    Med,
    LocTi,
    WmTi,
}

impl Relaxation {
    pub fn name(self) -> &'static str {
        match self {
            Relaxation::Loc => "loc",
            Relaxation::Wm => "wm",
            Relaxation::Med => "med",
            Relaxation::LocTi => "loc-ti",
            Relaxation::WmTi => "wm-ti",
        }
    }

    fn is_chain(self) -> bool {
        matches!(self, Relaxation::LocTi | Relaxation::WmTi)
    }
}

/// Everything needed to repeat a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    Solve {
        instance: Instance,
        relaxation: Relaxation,
        level: usize,
        config: SolverConfig,
    },
    Sweep {
        instance: Instance,
        relaxation: Relaxation,
        levels: [usize; 2],
        config: SolverConfig,
    },
    Slice {
        delta: f64,
        relaxation: Relaxation,
        level: usize,
        angles: usize,
        config: SolverConfig,
    },
    Ed {
        instance: Instance,
        sites: Option<usize>,
    },
    Paircover {
        graph: Graph,
    },
}

pub enum Data {
    Json(Value),
    Csv(String),
}

/// Result of a job: the emitted data, the numeric summary that a rerun must
/// reproduce, and whether every solve converged.
pub struct Outcome {
    pub data: Data,
    pub summary: Value,
    pub complete: bool,
}

pub const SWEEP_HEADER: [&str; 7] = [
    "level",
    "bound",
    "e0_ref",
    "gap",
    "wall_seconds",
    "status",
    "iters",
];
pub const SLICE_HEADER: [&str; 5] = ["theta", "x", "z", "support", "status"];

fn local_loc(h: &LocalHamiltonian, level: usize) -> Result<RelaxationSpec> {
    let largest = h.terms().iter().map(|t| t.sites().len()).max().unwrap_or(0);
    let scheme = if level <= largest {
        SupportScheme::Terms
    } else {
        SupportScheme::Connected(level)
    };
    Ok(build_loc_for(h, scheme)?)
}

/// The relaxation of `instance` at `level`.
pub fn build_relaxation(
    instance: &Instance,
    relaxation: Relaxation,
    level: usize,
) -> Result<RelaxationSpec> {
    if level < 2 {
        bail!("level {level} is below 2");
    }
    if relaxation.is_chain() != instance.is_translation_invariant() {
        bail!(
            "relaxation {} does not apply to {} instances",
            relaxation.name(),
            instance.kind()
        );
    }
    Ok(match relaxation {
        Relaxation::LocTi => build_loc_ti(level, &instance.ti_term()?)?,
        Relaxation::WmTi => build_wm_ti(level, &instance.ti_term()?)?,
        Relaxation::Loc => local_loc(&instance.hamiltonian()?, level)?,
        Relaxation::Wm => build_wm(
            &local_loc(&instance.hamiltonian()?, level)?,
            level,
            &WmOptions::default(),
        )?,
        Relaxation::Med => {
            let h = instance.hamiltonian()?;
            let base = local_loc(&h, level)?;
            let order = h.system().sites().to_vec();
            let n = order.len();
            let plan = MarkovShieldPlan::covered_predecessors(&base, order, level - 1)?;
            build_med_constraints(&base, &plan, n)?
        }
    })
}

fn status(r: &SolverResult) -> &'static str {
    if r.converged {
        "converged"
    } else {
        "iteration_cap"
    }
}

/// Ground-energy reference for gap columns: the extrapolated energy density
/// for chains, the exact smallest eigenvalue otherwise.
pub fn reference_energy(instance: &Instance) -> Result<f64> {
    if instance.is_translation_invariant() {
        Ok(extrapolate_energy_density(&instance.ti_term()?, EXTRAPOLATION_RINGS)?.e0)
    } else {
        Ok(instance.hamiltonian()?.ground_energy()?)
    }
}

pub fn run(job: &Job) -> Result<Outcome> {
    match job {
        Job::Solve {
            instance,
            relaxation,
            level,
            config,
        } => run_solve(instance, *relaxation, *level, config),
        Job::Sweep {
            instance,
            relaxation,
            levels,
            config,
        } => run_sweep(instance, *relaxation, *levels, config),
        Job::Slice {
            delta,
            relaxation,
            level,
            angles,
            config,
        } => run_slice(*delta, *relaxation, *level, *angles, config),
        Job::Ed { instance, sites } => run_ed(instance, *sites),
        Job::Paircover { graph } => run_paircover(graph),
    }
}

fn run_solve(
    instance: &Instance,
    relaxation: Relaxation,
    level: usize,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let spec = build_relaxation(instance, relaxation, level)?;
    let r = solve(&spec, cfg)?;
    let max_dual = r
        .duals
        .consistency
        .iter()
        .flat_map(|m| m.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let data = json!({
        "relaxation": relaxation.name(),
        "level": level,
        "bound": r.lower_bound_certified,
        "objective_primal": r.objective_primal,
        "converged": r.converged,
        "status": status(&r),
        "iters": r.iters,
        "residuals": r.residuals,
        "duals": {
            "consistency_blocks": r.duals.consistency.len(),
            "consistency_max_abs": max_dual,
            "temperatures": r.duals.temperatures,
        },
    });
    let summary = json!({"bound": r.lower_bound_certified, "objective_primal": r.objective_primal, "iters": r.iters});
    Ok(Outcome {
        data: Data::Json(data),
        summary,
        complete: r.converged,
    })
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

fn run_sweep(
    instance: &Instance,
    relaxation: Relaxation,
    levels: [usize; 2],
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let [lo, hi] = levels;
    if lo > hi {
        bail!("empty level range {lo}..{hi}");
    }
    let e0 = reference_energy(instance)?;
    let results: Vec<(usize, std::result::Result<SolverResult, String>, f64)> = (lo..=hi)
        .into_par_iter()
        .map(|level| {
            let start = Instant::now();
            let r = build_relaxation(instance, relaxation, level)
                .and_then(|spec| Ok(solve(&spec, cfg)?))
                .map_err(|e| format!("{e:#}"));
            (level, r, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut complete = true;
    for (level, r, secs) in &results {
        match r {
            Ok(r) => {
                complete &= r.converged;
                let b = r.lower_bound_certified;
                rows.push(vec![
                    level.to_string(),
                    fmt12(b),
                    fmt12(e0),
                    fmt12(e0 - b),
                    fmt12(*secs),
                    status(r).into(),
                    r.iters.to_string(),
                ]);
                summary
                    .push(json!({"level": level, "bound": b, "e0_ref": e0, "status": status(r)}));
            }
            Err(msg) => {
                complete = false;
                let st = format!("failed: {msg}");
                rows.push(vec![
                    level.to_string(),
                    String::new(),
                    fmt12(e0),
                    String::new(),
                    fmt12(*secs),
                    st.clone(),
                    String::new(),
                ]);
                summary.push(json!({"level": level, "e0_ref": e0, "status": st}));
            }
        }
    }
    Ok(Outcome {
        data: Data::Csv(csv_text(&SWEEP_HEADER, &rows)?),
        summary: json!({"rows": summary}),
        complete,
    })
}

fn run_slice(
    delta: f64,
    relaxation: Relaxation,
    level: usize,
    angles: usize,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    if angles < 4 {
        bail!("at least 4 angles are needed, got {angles}");
    }
    let instance = Instance::TiChain {
        delta: Some(delta),
        term: None,
    };
    let spec = build_relaxation(&instance, relaxation, level)?;
    let thetas: Vec<f64> = (0..angles)
        .map(|k| 2.0 * PI * k as f64 / angles as f64)
        .collect();
    let points: Vec<_> = thetas
        .par_iter()
        .map(|&t| slice_support_scan(&spec, &[t], cfg).map(|mut p| p.remove(0)))
        .collect();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut complete = true;
    for (theta, p) in thetas.iter().zip(points) {
        match p {
            Ok(p) => {
                let st = if p.converged {
                    "converged"
                } else {
                    "iteration_cap"
                };
                complete &= p.converged;
                rows.push(vec![
                    fmt12(p.theta),
                    fmt12(p.x),
                    fmt12(p.z),
                    fmt12(p.support),
                    st.into(),
                ]);
                summary.push(json!({"theta": p.theta, "x": p.x, "z": p.z, "support": p.support, "status": st}));
            }
            Err(e) => {
                complete = false;
                let st = format!("failed: {e}");
                rows.push(vec![
                    fmt12(*theta),
                    String::new(),
                    String::new(),
                    String::new(),
                    st.clone(),
                ]);
                summary.push(json!({"theta": theta, "status": st}));
            }
        }
    }
    Ok(Outcome {
        data: Data::Csv(csv_text(&SLICE_HEADER, &rows)?),
        summary: json!({"rows": summary}),
        complete,
    })
}

fn run_ed(instance: &Instance, sites: Option<usize>) -> Result<Outcome> {
    let (lambda, density, m) = if instance.is_translation_invariant() {
        let m = sites.unwrap_or(DEFAULT_ED_SITES);
        let density = ti_ground_energy_density(&instance.ti_term()?, m)?;
        (density * m as f64, density, m)
    } else {
        if sites.is_some() {
            bail!("--sites only applies to ti_chain instances");
        }
        let h = instance.hamiltonian()?;
        let lambda = h.ground_energy()?;
        (lambda, lambda / h.n_sites() as f64, h.n_sites())
    };
    let data = json!({"lambda_min": lambda, "energy_density": density, "sites": m});
    Ok(Outcome {
        summary: data.clone(),
        data: Data::Json(data),
        complete: true,
    })
}

fn run_paircover(graph: &Graph) -> Result<Outcome> {
    let b = epr_wm_bound(graph)?;
    let data = json!({
        "pairs": b.pairing.pairs,
        "unmatched": b.pairing.unmatched,
        "bound": b.bound,
        "repairs": b.pairing.repairs,
    });
    Ok(Outcome {
        summary: data.clone(),
        data: Data::Json(data),
        complete: true,
    })
}
