use entrobound::quantum::{
    conditional_entropy, conditional_entropy_gradient, gibbs_state, partial_trace,
    von_neumann_entropy, Bipartition, CMatrix, DensityMatrix, EigenFloor, HermitianOperator,
    SiteSystem,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

fn random_state(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(&mut rng, 1 << n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let sites: Vec<usize> = (1..=n).collect();
    DensityMatrix::from_matrix(SiteSystem::qubits(&sites).unwrap(), m / tr).unwrap()
}

fn s(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> f64 {
    conditional_entropy(rho, &Bipartition::new(a, b).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chain_rule(seed in any::<u64>()) {
        let rho = random_state(3, seed);
        let lhs = s(&rho, &[1, 2], &[3]);
        let rhs = s(&rho, &[1], &[2, 3]) + s(&rho, &[2], &[3]);
        prop_assert!((lhs - rhs).abs() < 1e-10);
        let s3 = von_neumann_entropy(&rho.marginal(&[3]).unwrap());
        prop_assert!((s(&rho, &[1, 2], &[]) + 0.0 - (s(&rho, &[1, 2], &[3]) + s3 - s(&rho, &[3], &[1, 2]))).abs() < 1e-10);
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), n in 3usize..=4) {
        let rho = random_state(n, seed);
        prop_assert!(s(&rho, &[1], &[2, 3]) <= s(&rho, &[1], &[2]) + 1e-9);
        if n == 4 {
            prop_assert!(s(&rho, &[2], &[1, 3, 4]) <= s(&rho, &[2], &[3]) + 1e-9);
        }
    }

    #[test]
    fn weak_monotonicity(seed in any::<u64>(), n in 3usize..=4) {
        let rho = random_state(n, seed);
        prop_assert!(s(&rho, &[2], &[1]) + s(&rho, &[2], &[3]) >= -1e-9);
        if n == 4 {
            prop_assert!(s(&rho, &[1], &[2, 3]) + s(&rho, &[1], &[4]) >= -1e-9);
            prop_assert!(s(&rho, &[3, 4], &[1]) + s(&rho, &[3, 4], &[2]) >= -1e-9);
        }
    }

    #[test]
    fn markov_entropy_decomposition(seed in any::<u64>(), n in 3usize..=4) {
        let rho = random_state(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for k in 0..n {
            let shield: Vec<usize> = order[..k].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            total += s(&rho, &[order[k]], &shield);
        }
        prop_assert!(total >= -1e-9, "{}", total);
    }

    #[test]
    fn gibbs_states_are_positive_and_normalised(seed in any::<u64>(), scale in 0.1f64..200.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ginibre(&mut rng, 8);
        let k = HermitianOperator::qubits(&[1, 2, 3], (&g + g.adjoint()) * Complex64::new(scale, 0.0)).unwrap();
        let rho = gibbs_state(&k);
        let ev = rho.eigenvalues();
        prop_assert!(ev.iter().all(|&x| x > -1e-14));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_traces_compose(seed in any::<u64>()) {
        let rho = random_state(4, seed);
        let once = partial_trace(rho.op(), &[2]).unwrap();
        let twice = partial_trace(&partial_trace(rho.op(), &[2, 4]).unwrap(), &[2]).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).norm() < 1e-13);
        let other = partial_trace(&partial_trace(rho.op(), &[1, 2, 3]).unwrap(), &[2]).unwrap();
        prop_assert!((once.matrix() - other.matrix()).norm() < 1e-13);
    }

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>()) {
        let n = 3;
        let pure = random_state(n, seed);
        let mixed = DensityMatrix::maximally_mixed(pure.system().clone());
        let rho = pure.mix(&mixed, 0.8).unwrap();
        let part = Bipartition::new(&[1], &[2, 3]).unwrap();
        let grad = conditional_entropy_gradient(&rho, &part, EigenFloor::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let g = ginibre(&mut rng, 8);
        let mut dir = &g + g.adjoint();
        let shift = dir.trace() / Complex64::new(8.0, 0.0);
        for i in 0..8 {
            dir[(i, i)] -= shift;
        }
        let h = 1e-4;
        let at = |t: f64| {
            let m = rho.matrix() + &dir * Complex64::new(t, 0.0);
            conditional_entropy(&DensityMatrix::from_matrix(rho.system().clone(), m).unwrap(), &part).unwrap()
        };
        let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
        let exact: f64 = (grad.matrix() * &dir).trace().re;
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{} vs {}", fd, exact);
    }
}
