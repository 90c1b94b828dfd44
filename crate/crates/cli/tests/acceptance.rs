//! Acceptance suite: runs every acceptance criterion at its stated tolerance
//! and time budget, printing one PASS/FAIL line per criterion. Exits nonzero
//! when any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use entrobound::graphcover::{edge_pair_cover, epr_wm_bound, Graph};
use entrobound::hamiltonians::{
    build_ghz_hyper, build_med_not_wm_marginals, build_quantum_maxcut, build_three_site_epr,
    build_wm_not_med_marginals, build_xxz, extrapolate_energy_density, solve_wm_not_med_lambda,
    LocalHamiltonian, EXTRAPOLATION_RINGS,
};
use entrobound::quantum::{
    conditional_entropy, conditional_entropy_gradient, Bipartition, CMatrix, DensityMatrix,
    EigenFloor, HermitianOperator, SiteSystem,
};
use entrobound::relaxations::{
    build_loc_for, build_loc_ti, build_med_constraints, build_wm, build_wm_ti, MarkovShieldPlan,
    RelaxationSpec, SupportScheme, WmOptions,
};
use entrobound::solver::{med_temperature_sweep, solve, SolverConfig, SolverResult};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Allowed ordering violation between relaxation values: twice the solver's
/// gap tolerance.
const ORDER_TOL: f64 = 2.0 * 1e-5;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<String, String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(format!("{:.2} s", t.as_secs_f64()))
    } else {
        Err(format!(
            "took {:.2} s, budget {:.0} s",
            t.as_secs_f64(),
            limit.as_secs_f64()
        ))
    }
}

fn solved(spec: &RelaxationSpec, cfg: &SolverConfig) -> SolverResult {
    solve(spec, cfg).expect("solver runs")
}

fn value(spec: &RelaxationSpec) -> f64 {
    solved(spec, &SolverConfig::default()).lower_bound_certified
}

fn loc2(h: &LocalHamiltonian) -> RelaxationSpec {
    build_loc_for(h, SupportScheme::Terms).unwrap()
}

fn wm(h: &LocalHamiltonian, l: usize) -> RelaxationSpec {
    build_wm(&loc2(h), l, &WmOptions::default()).unwrap()
}

fn loc3(h: &LocalHamiltonian) -> RelaxationSpec {
    build_loc_for(h, SupportScheme::Connected(3)).unwrap()
}

fn med(h: &LocalHamiltonian) -> RelaxationSpec {
    let base = loc2(h);
    let plan =
        MarkovShieldPlan::covered_predecessors(&base, h.system().sites().to_vec(), 1).unwrap();
    build_med_constraints(&base, &plan, plan.order().len()).unwrap()
}

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

fn random_objective(seed: u64) -> LocalHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = [[1, 2], [2, 3]]
        .iter()
        .map(|s| {
            let g = ginibre(&mut rng, 4);
            HermitianOperator::qubits(s, &g + g.adjoint()).unwrap()
        })
        .collect();
    LocalHamiltonian::new(SiteSystem::qubits(&[1, 2, 3]).unwrap(), terms).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = ginibre(rng, 1 << n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let sites: Vec<usize> = (1..=n).collect();
    DensityMatrix::from_matrix(SiteSystem::qubits(&sites).unwrap(), m / tr).unwrap()
}

fn cond(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> f64 {
    conditional_entropy(rho, &Bipartition::new(a, b).unwrap()).unwrap()
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Graph::new(n, &edges.into_iter().collect::<Vec<_>>()).unwrap()
}

fn three_site_exactness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("epr.json");
    std::fs::write(&inst, r#"{"kind":"three_site_epr"}"#).unwrap();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_entrobound"))
        .arg("ed")
        .arg(&inst)
        .output()
        .unwrap();
    let time = within(Duration::from_secs(1), start)?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let lambda = v["result"]["lambda_min"].as_f64().ok_or("no lambda_min")?;
    check(
        out.status.success() && (lambda + 0.75).abs() < 1e-9,
        format!("λ_min = {lambda}, {time}"),
    )
}

fn wm2_value() -> Outcome {
    let start = Instant::now();
    let b = value(&wm(&build_three_site_epr(), 2));
    let time = within(Duration::from_secs(30), start)?;
    check(
        (-0.8135..=-0.8085).contains(&b),
        format!("bound {b:.8} in [-0.8135, -0.8085], {time}"),
    )
}

fn loc2_value() -> Outcome {
    let start = Instant::now();
    let b = value(&loc2(&build_three_site_epr()));
    let time = within(Duration::from_secs(10), start)?;
    check((b + 1.0).abs() < 1e-6, format!("bound {b:.10}, {time}"))
}

fn sandwich() -> Outcome {
    let mut hams = vec![build_three_site_epr()];
    hams.extend((0..5).map(|k| random_objective(900 + k)));
    let mut worst: f64 = f64::NEG_INFINITY;
    for h in &hams {
        let (l2, w2, l3) = (value(&loc2(h)), value(&wm(h, 2)), value(&loc3(h)));
        worst = worst.max(w2 - l3).max(l2 - w2);
    }
    check(
        worst <= ORDER_TOL,
        format!(
            "Loc³ ≥ WM² ≥ Loc² on {} objectives, largest violation {worst:.2e}",
            hams.len()
        ),
    )
}

fn chain_gap_ordering() -> Outcome {
    let start = Instant::now();
    let term = build_xxz(0.0);
    let e0 = extrapolate_energy_density(&term, EXTRAPOLATION_RINGS)
        .map_err(|e| e.to_string())?
        .e0;
    let targets = [
        ("LocTI", [0.141016, 0.141077, 0.060094]),
        ("WMTI", [0.088476, 0.043885, 0.026399]),
    ];
    let mut ok = true;
    let mut parts = vec![format!("e0 = {e0:.9}")];
    for (name, gaps) in targets {
        for (l, target) in (3..=5).zip(gaps) {
            let spec = if name == "LocTI" {
                build_loc_ti(l, &term)
            } else {
                build_wm_ti(l, &term)
            }
            .unwrap();
            let gap = e0 - value(&spec);
            ok &= (gap - target).abs() <= 5e-3;
            parts.push(format!("{name}{l} {gap:.6} (ref {target})"));
        }
    }
    let time = within(Duration::from_secs(20 * 60), start);
    parts.push(time.clone().unwrap_or_else(|e| e));
    check(ok && time.is_ok(), parts.join(", "))
}

fn ti_sandwich() -> Outcome {
    let mut parts = Vec::new();
    let mut worst: f64 = f64::NEG_INFINITY;
    for delta in [0.0, 1.0] {
        let term = build_xxz(delta);
        let l5 = value(&build_loc_ti(5, &term).unwrap());
        let w3 = value(&build_wm_ti(3, &term).unwrap());
        let l3 = value(&build_loc_ti(3, &term).unwrap());
        worst = worst.max(w3 - l5).max(l3 - w3);
        parts.push(format!("Δ={delta}: {l5:.6} ≥ {w3:.6} ≥ {l3:.6}"));
    }
    parts.push(format!("largest violation {worst:.2e}"));
    check(worst <= ORDER_TOL, parts.join(", "))
}

/// `S(1) + Σ_{i=2..n} S(i|1)` for the weak-monotone family on `n` sites.
fn hub_med_sum(lambda: f64, n: usize) -> f64 {
    let m = build_wm_not_med_marginals(lambda, n).unwrap();
    let order: Vec<usize> = (1..=n).collect();
    let shields: Vec<Vec<usize>> = (1..=n)
        .map(|i| if i == 1 { vec![] } else { vec![1] })
        .collect();
    m.med_sum(&order, &shields).unwrap()
}

fn counterexamples() -> Outcome {
    let start = Instant::now();
    let lambda = solve_wm_not_med_lambda();
    let fam = build_wm_not_med_marginals(lambda, 8).unwrap();
    let wm_slack = fam.min_wm_two_body().unwrap();
    let med8 = hub_med_sum(lambda, 8);
    let first_negative = (3..=64).find(|&n| hub_med_sum(lambda, n) < 0.0);

    let werner = build_med_not_wm_marginals();
    let s = |a: usize, b: usize| werner.conditional_entropy(&[a], &[b]).unwrap();
    let one = werner.conditional_entropy(&[1], &[]).unwrap();
    let med_path = one + s(2, 1) + s(3, 2);
    let med_star = one + s(2, 1) + s(3, 1);
    let werner_wm = s(1, 2) + s(1, 3);
    let time = within(Duration::from_secs(5), start);

    let family_ok = wm_slack >= -1e-8 && med8 < 0.0;
    let werner_ok = med_path >= 0.0 && med_star >= 0.0 && werner_wm < 0.0;
    let detail = format!(
        "WM-not-MED (λ={lambda:.5}): min WM slack {wm_slack:.2e}, MED sum at N=8 {med8:.5} ({}), smallest violating N {}; \
         Werner: MED {med_path:.4}, {med_star:.4} ≥ 0, WM {werner_wm:.4} < 0; {}",
        if med8 < 0.0 { "violated" } else { "NOT violated" },
        first_negative.map_or("none ≤ 64".into(), |n| n.to_string()),
        time.clone().unwrap_or_else(|e| e),
    );
    check(family_ok && werner_ok && time.is_ok(), detail)
}

fn entropy_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = f64::INFINITY;
    let states = 500;
    for k in 0..states {
        let n = 3 + k % 2;
        let rho = random_state(&mut rng, n);
        let mut slacks = vec![
            cond(&rho, &[1], &[2]) - cond(&rho, &[1], &[2, 3]),
            cond(&rho, &[2], &[1]) + cond(&rho, &[2], &[3]),
        ];
        if n == 4 {
            slacks.push(cond(&rho, &[2], &[3]) - cond(&rho, &[2], &[1, 3, 4]));
            slacks.push(cond(&rho, &[1], &[2, 3]) + cond(&rho, &[1], &[4]));
        }
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let mut med = 0.0;
        for i in 0..n {
            let shield: Vec<usize> = order[..i]
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            med += cond(&rho, &[order[i]], &shield);
        }
        slacks.push(med);
        worst = worst.min(slacks.into_iter().fold(f64::INFINITY, f64::min));
    }

    let mut worst_rel: f64 = 0.0;
    let grads = 100;
    let part = Bipartition::new(&[1], &[2, 3]).unwrap();
    for _ in 0..grads {
        let pure = random_state(&mut rng, 3);
        let rho = pure
            .mix(&DensityMatrix::maximally_mixed(pure.system().clone()), 0.8)
            .unwrap();
        let grad = conditional_entropy_gradient(&rho, &part, EigenFloor::default()).unwrap();
        let g = ginibre(&mut rng, 8);
        let mut dir = &g + g.adjoint();
        let shift = dir.trace() / Complex64::new(8.0, 0.0);
        for i in 0..8 {
            dir[(i, i)] -= shift;
        }
        let h = 1e-4;
        let at = |t: f64| {
            let m = rho.matrix() + &dir * Complex64::new(t, 0.0);
            conditional_entropy(
                &DensityMatrix::from_matrix(rho.system().clone(), m).unwrap(),
                &part,
            )
            .unwrap()
        };
        let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
        let exact = (grad.matrix() * &dir).trace().re;
        worst_rel = worst_rel.max((fd - exact).abs() / exact.abs().max(1e-3));
    }
    check(
        worst >= -1e-9 && worst_rel < 1e-6,
        format!("{states} states: min SSA/WM/MED slack {worst:.3e}; {grads} gradients: max rel. error {worst_rel:.2e}"),
    )
}

fn graph_cover() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut graphs, mut with_ed) = (0, 0);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let g = random_connected(&mut rng, n);
        let p = edge_pair_cover(&g).map_err(|e| e.to_string())?;
        p.validate(&g)
            .map_err(|e| format!("{:?}: {e}", g.edges()))?;
        if 2 * p.pairs.len() + usize::from(p.unmatched.is_some()) != g.edge_count() {
            return Err(format!("pairing does not cover {:?}", g.edges()));
        }
        graphs += 1;
        if n <= 10 {
            let exact = build_quantum_maxcut(&g)
                .unwrap()
                .ground_energy()
                .map_err(|e| e.to_string())?;
            worst = worst.max(epr_wm_bound(&g).unwrap().bound - exact);
            with_ed += 1;
        }
    }
    let time = within(Duration::from_secs(60), start);
    check(
        worst <= 1e-9 && time.is_ok(),
        format!(
            "{graphs} graphs valid; bound − λ_min ≤ {worst:.4} on {with_ed} graphs with n ≤ 10; {}",
            time.clone().unwrap_or_else(|e| e)
        ),
    )
}

fn ghz_level_independence() -> Outcome {
    let v2 = value(&wm(&build_ghz_hyper(2).unwrap(), 2));
    let v3 = value(&wm(&build_ghz_hyper(3).unwrap(), 3));
    check(
        (v2 - v3).abs() < 5e-3,
        format!("l=2: {v2:.6}, l=3: {v3:.6}"),
    )
}

fn bound_safety() -> Outcome {
    let capped = SolverConfig {
        max_iters: 50,
        ..Default::default()
    };
    let mut hams = vec![build_three_site_epr(), build_ghz_hyper(2).unwrap()];
    hams.extend((0..3).map(|k| random_objective(1100 + k)));
    hams.push(
        build_quantum_maxcut(&Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap())
            .unwrap(),
    );
    let mut runs = Vec::new();
    for h in &hams {
        for spec in [loc2(h), wm(h, 2), med(h), loc3(h)] {
            runs.push((h.ground_energy().unwrap(), spec));
        }
    }
    let ghz3 = build_ghz_hyper(3).unwrap();
    runs.push((ghz3.ground_energy().unwrap(), wm(&ghz3, 3)));
    let (mut solves, mut capped_runs) = (0, 0);
    let mut worst: f64 = f64::NEG_INFINITY;
    for (exact, spec) in &runs {
        for cfg in [SolverConfig::default(), capped.clone()] {
            let r = solved(spec, &cfg);
            worst = worst.max(r.lower_bound_certified - exact);
            solves += 1;
            capped_runs += usize::from(!r.converged);
        }
    }
    check(
        worst <= 1e-9,
        format!(
            "{solves} solves ({capped_runs} stopped at the cap): max(bound − λ_min) = {worst:.3e}"
        ),
    )
}

fn free_energy_bound() -> Outcome {
    let ring = build_xxz(0.0).ring(6).unwrap();
    let base = loc2(&ring);
    let plan = MarkovShieldPlan::nearest_predecessors((1..=6).collect(), 1).unwrap();
    let sweep = med_temperature_sweep(&base, &plan, &[0.5, 1.0, 2.0], &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = f64::INFINITY;
    let mut parts = Vec::new();
    for p in &sweep.points {
        let exact = ring.free_energy(p.temperature).unwrap();
        worst = worst.min(exact - p.value);
        parts.push(format!("T={}: {:.5} ≤ {exact:.5}", p.temperature, p.value));
    }
    parts.push(format!("min slack {worst:.3e}"));
    check(sweep.points.len() == 3 && worst >= -1e-6, parts.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("three-site exactness", three_site_exactness),
        ("WM² value", wm2_value),
        ("Loc² triviality", loc2_value),
        ("sandwich ordering", sandwich),
        ("chain gaps at desk scale", chain_gap_ordering),
        ("translation-invariant sandwich", ti_sandwich),
        ("counterexample families", counterexamples),
        ("entropy inequalities", entropy_inequalities),
        ("graph cover", graph_cover),
        ("GHZ level independence", ghz_level_independence),
        ("bound safety", bound_safety),
        ("free-energy bound", free_energy_bound),
    ];
    let quiet = std::env::var_os("RUST_BACKTRACE").is_none();
    if quiet {
        std::panic::set_hook(Box::new(|_| {}));
    }
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{tag} criterion {:>2} ({name}, {secs:.1} s): {detail}",
            k + 1
        );
        if outcome.is_err() {
            failed.push(k + 1);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
