use entrobound::graphcover::Graph;
use entrobound::hamiltonians::{
    build_ghz_hyper, build_quantum_maxcut, build_three_site_epr, build_xxz, LocalHamiltonian,
};
use entrobound::quantum::{CMatrix, DensityMatrix, HermitianOperator, SiteSystem};
use entrobound::relaxations::{
    build_loc_for, build_loc_ti, build_med_constraints, build_med_free_energy, build_wm,
    build_wm_ti, MarkovShieldPlan, RelaxationSpec, SupportScheme, WmOptions,
};
use entrobound::solver::{med_temperature_sweep, solve, SolverConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-5;

fn random_term(rng: &mut ChaCha8Rng, sites: &[usize]) -> HermitianOperator {
    let d = 1 << sites.len();
    let a = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    HermitianOperator::qubits(sites, &a + a.adjoint()).unwrap()
}

fn random_chain(seed: u64) -> LocalHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = vec![
        random_term(&mut rng, &[1, 2]),
        random_term(&mut rng, &[2, 3]),
    ];
    LocalHamiltonian::new(SiteSystem::qubits(&[1, 2, 3]).unwrap(), terms).unwrap()
}

fn value(spec: &RelaxationSpec) -> f64 {
    let r = solve(spec, &SolverConfig::default()).unwrap();
    r.lower_bound_certified
}

fn wm2(h: &LocalHamiltonian) -> RelaxationSpec {
    build_wm(
        &build_loc_for(h, SupportScheme::Terms).unwrap(),
        2,
        &WmOptions::default(),
    )
    .unwrap()
}

fn family(h: &LocalHamiltonian) -> Vec<RelaxationSpec> {
    let loc2 = build_loc_for(h, SupportScheme::Terms).unwrap();
    let plan =
        MarkovShieldPlan::covered_predecessors(&loc2, h.system().sites().to_vec(), 1).unwrap();
    let med = build_med_constraints(&loc2, &plan, plan.order().len()).unwrap();
    vec![
        loc2,
        wm2(h),
        med,
        build_loc_for(h, SupportScheme::Connected(3)).unwrap(),
    ]
}

#[test]
fn certified_bounds_never_exceed_ground_energy() {
    let capped = SolverConfig {
        max_iters: 50,
        ..Default::default()
    };
    let mut hams = vec![build_three_site_epr(), build_ghz_hyper(2).unwrap()];
    hams.extend((0..4).map(random_chain));
    hams.push(
        build_quantum_maxcut(&Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap())
            .unwrap(),
    );
    for h in &hams {
        let exact = h.ground_energy().unwrap();
        for spec in family(h) {
            for cfg in [SolverConfig::default(), capped.clone()] {
                let r = solve(&spec, &cfg).unwrap();
                assert!(
                    r.lower_bound_certified <= exact + 1e-9,
                    "{} > {exact}",
                    r.lower_bound_certified
                );
                assert!(r.lower_bound_certified <= r.objective_primal + r.residuals.gap_estimate);
                assert!(r.duals.temperatures.iter().all(|&t| t >= 0.0));
            }
        }
    }
}

#[test]
fn edge_relaxation_of_max_cut_is_minus_edge_count() {
    let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap();
    let spec = build_loc_for(&build_quantum_maxcut(&g).unwrap(), SupportScheme::Terms).unwrap();
    assert!((value(&spec) + 6.0).abs() < TOL);
}

#[test]
fn sandwich_on_random_three_site_objectives() {
    for seed in 0..5 {
        let h = random_chain(100 + seed);
        let v: Vec<f64> = family(&h).iter().map(value).collect();
        let (loc2, wm, loc3) = (v[0], v[1], v[3]);
        assert!(loc3 >= wm - 2.0 * TOL && wm >= loc2 - 2.0 * TOL, "{v:?}");
        assert!((loc3 - h.ground_energy().unwrap()).abs() < TOL);
    }
}

#[test]
fn nearest_predecessor_med_is_no_stronger_than_weak_monotonicity() {
    for seed in 0..10 {
        let h = random_chain(200 + seed);
        let v: Vec<f64> = family(&h).iter().map(value).collect();
        assert!(v[2] <= v[1] + 2.0 * TOL, "MED {} above WM {}", v[2], v[1]);
    }
}

#[test]
fn marginals_of_global_states_satisfy_every_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = build_three_site_epr();
    for _ in 0..20 {
        let g = CMatrix::from_fn(8, 8, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let m = &g * g.adjoint();
        let tr = m.trace();
        let rho = DensityMatrix::from_matrix(h.system().clone(), m / tr).unwrap();
        for spec in family(&h) {
            let f = spec.feasibility(&spec.marginals_of(&rho).unwrap()).unwrap();
            assert!(f.consistency < 1e-12);
            assert!(f.min_entropy_slack >= -1e-9);
        }
    }
}

#[test]
fn ghz_bound_does_not_depend_on_hyperedge_size() {
    let v2 = value(&wm2(&build_ghz_hyper(2).unwrap()));
    let h3 = build_ghz_hyper(3).unwrap();
    let v3 = value(
        &build_wm(
            &build_loc_for(&h3, SupportScheme::Terms).unwrap(),
            3,
            &WmOptions::default(),
        )
        .unwrap(),
    );
    assert!((v2 - v3).abs() < 5e-3, "{v2} vs {v3}");
    assert!(v2 > -2.0 + 0.1);
}

#[test]
fn translation_invariant_values_increase_with_length() {
    for delta in [0.0, 1.0] {
        let term = build_xxz(delta);
        let loc: Vec<f64> = (2..=4)
            .map(|l| value(&build_loc_ti(l, &term).unwrap()))
            .collect();
        assert!(loc.windows(2).all(|w| w[1] >= w[0] - 2.0 * TOL), "{loc:?}");
        let wm3 = value(&build_wm_ti(3, &term).unwrap());
        assert!(wm3 >= loc[1] - 2.0 * TOL);
    }
}

#[test]
fn specs_survive_json_round_trip() {
    let spec = wm2(&build_three_site_epr());
    let back = RelaxationSpec::from_json(&spec.to_json()).unwrap();
    assert_eq!(back, spec);
    assert_eq!(value(&back), value(&spec));
}

#[test]
fn free_energy_relaxation_stays_below_exact_free_energy() {
    let term = build_xxz(0.0);
    let ring = term.ring(6).unwrap();
    let base = build_loc_for(&ring, SupportScheme::Terms).unwrap();
    let plan = MarkovShieldPlan::nearest_predecessors((1..=6).collect(), 1).unwrap();
    let temps = [0.0, 0.5, 1.0, 2.0];
    let sweep = med_temperature_sweep(&base, &plan, &temps, &SolverConfig::default()).unwrap();
    for p in &sweep.points {
        let exact = ring.free_energy(p.temperature).unwrap();
        assert!(
            p.value <= exact + 1e-6,
            "T={}: {} > {exact}",
            p.temperature,
            p.value
        );
    }
    let plain = value(&base);
    assert!((sweep.points[0].value - plain).abs() < TOL);
    assert!(sweep.best().value >= plain - TOL);
    assert!(build_med_free_energy(&base, &plan, -1.0).is_err());
}
