mod common;

use std::sync::Arc;

use common::*;
use pmtherm::jarzynski::{
    jarzynski_exact, jarzynski_operator_trace, mean_and_standard_error, modified_jarzynski_check, tpm_sample,
    DriveSchedule, LinearInterpolation,
};
use pmtherm::linalg::{evolve, expectation, partial_trace, propagator, CompositeSpace, Operator, ProjectorSet, C64};
use pmtherm::measurement::{
    entangle_pointer, event_read, generalized_relative_entropy, nonselective_measure, phase_equivalence_trigger,
    redefine_system, EntropyLedger, PhaseDisplacement, PointerModel,
};
use pmtherm::relaxation::{entropy_of_weight, simulate, Description};
use pmtherm::scheme::{verify_round_trips, Scheme, SchemeConfig};
use pmtherm::superselection::energy_sectors;
use pmtherm::Error;
use proptest::prelude::*;
use rand::Rng;

/// Contiguous blocks of the computational basis as a complete projector set.
fn block_set(dim: usize, cuts: &[usize]) -> ProjectorSet {
    let mut edges: Vec<usize> = cuts
        .iter()
        .map(|c| 1 + c % (dim - 1).max(1))
        .filter(|c| *c < dim)
        .collect();
    edges.push(0);
    edges.push(dim);
    edges.sort();
    edges.dedup();
    let projectors = edges
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = (0..dim)
                .map(|k| if k >= w[0] && k < w[1] { 1.0 } else { 0.0 })
                .collect();
            Operator::diagonal(&d).unwrap()
        })
        .collect::<Vec<_>>();
    let labels = (0..projectors.len()).map(|k| k.to_string()).collect();
    ProjectorSet::new(projectors, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dephasing_is_a_trace_preserving_positive_projection(seed in any::<u64>(), dim in 2usize..=16, cuts in prop::collection::vec(0usize..16, 1..4)) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, dim).scaled(0.5 + r.random::<f64>()).unwrap();
        let set = block_set(dim, &cuts);
        let once = nonselective_measure(&rho, &set).unwrap();
        let twice = nonselective_measure(&once, &set).unwrap();
        let tr: f64 = (0..dim).map(|i| once.matrix()[(i, i)].re).sum();
        prop_assert!((tr - rho.trace_weight()).abs() < 1e-12);
        prop_assert!(twice.max_abs_diff(&once) < 1e-12);
        prop_assert!(once.eigenvalues().iter().all(|e| *e >= -1e-10));
        for y in 0..set.len() {
            let p = |m: &pmtherm::linalg::DensityMatrix| expectation(set.projector(y), m).unwrap();
            prop_assert!((p(&rho) - p(&once)).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_inverts_tensor(seed in any::<u64>(), a in 1usize..=4, b in 1usize..=4) {
        let mut r = rng(seed);
        let ra = random_density(&mut r, a);
        let rb = random_density(&mut r, b);
        let space = CompositeSpace::new([("a", a), ("b", b)]).unwrap();
        let ab = ra.tensor(&rb).unwrap();
        prop_assert!(partial_trace(&ab, &space, &["a"]).unwrap().max_abs_diff(&ra) < 1e-12);
        prop_assert!(partial_trace(&ab, &space, &["b"]).unwrap().max_abs_diff(&rb) < 1e-12);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), dim in 1usize..=6, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, dim);
        let rho = random_density(&mut r, dim);
        let two = evolve(&evolve(&rho, &h, t1).unwrap(), &h, t2).unwrap();
        let one = evolve(&rho, &h, t1 + t2).unwrap();
        prop_assert!(two.max_abs_diff(&one) < 1e-10);
    }

    #[test]
    fn propagator_matches_series(seed in any::<u64>(), dim in 1usize..=8, t in 0.0f64..1.0) {
        let h = random_hermitian(&mut rng(seed), dim);
        let u = propagator(&h, t).unwrap();
        prop_assert!(max_diff(u.matrix(), &expm_series(h.matrix(), t)) < 1e-10);
    }

    #[test]
    fn redefinition_preserves_expectations(seed in any::<u64>(), dim in 1usize..=16, sigma in -3.0f64..3.0) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, dim);
        let obs = random_hermitian(&mut r, dim);
        let (star, obs_star) = redefine_system(&rho, std::slice::from_ref(&obs), sigma).unwrap();
        let a = expectation(&obs_star[0], &star).unwrap();
        let b = expectation(&obs, &rho).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_of_rescaled_states(seed in any::<u64>(), dim in 1usize..=16) {
        let rho = random_density(&mut rng(seed), dim);
        let down = rho.scaled((-1.0f64).exp()).unwrap();
        let up = rho.scaled(1.0f64.exp()).unwrap();
        prop_assert!((generalized_relative_entropy(&rho, &down).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((generalized_relative_entropy(&rho, &up).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn ledger_stays_balanced(seed in any::<u64>(), reads in 1usize..20) {
        let mut r = rng(seed);
        let mut ledger = EntropyLedger::new();
        for k in 0..reads {
            let dim = 2 + k % 3;
            let rho = if r.random::<bool>() {
                pmtherm::linalg::Ket::basis(dim, k % dim).unwrap().to_density()
            } else {
                random_density(&mut r, dim)
            };
            let set = ProjectorSet::computational(dim).unwrap();
            let d = nonselective_measure(&rho, &set).unwrap();
            let (s, m) = if k % 2 == 0 { ("S", "M") } else { ("S", "experimenter") };
            ledger = event_read(&d, &set, seed ^ k as u64, ledger, s, m).unwrap().ledger;
            prop_assert!(ledger.entries().iter().all(|e| e.sigma_nats == 0.0 || e.sigma_nats.abs() == 1.0));
        }
        prop_assert_eq!(ledger.global_total(), 0.0);
        prop_assert!(ledger.is_balanced());
    }

    #[test]
    fn relaxation_is_monotone(dt in 0.01f64..5.0, extra in 0.0f64..5.0, steps in 1usize..500) {
        for d in Description::ALL {
            let t = simulate(d, dt, dt + extra, steps).unwrap();
            prop_assert_eq!(t.weights[0], 1.0);
            prop_assert!(t.weights.windows(2).all(|w| w[1] <= w[0]));
            let s = entropy_of_weight(&t);
            prop_assert!(s.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn trigger_phases_never_change_statistics(seed in any::<u64>(), dim in 2usize..=6, d1 in -10.0f64..10.0, d2 in -10.0f64..10.0) {
        let mut r = rng(seed);
        let amps: Vec<C64> = random_ket(&mut r, dim).amplitudes().iter().copied().collect();
        let values: Vec<f64> = (0..dim).map(|k| (dim - 1) as f64 - 2.0 * k as f64).collect();
        let branches = [PhaseDisplacement::new(d1, "a").unwrap(), PhaseDisplacement::new(d2, "b").unwrap()];
        prop_assert!(phase_equivalence_trigger(&amps, &branches, &values).unwrap());
    }

    #[test]
    fn energy_projectors_commute_with_h(seed in any::<u64>(), dim in 1usize..=8) {
        let h = random_hermitian(&mut rng(seed), dim);
        for s in energy_sectors(&h, 1e-8).unwrap() {
            prop_assert!(s.projector.commutator(&h).unwrap().iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn pointer_branch_map(seed in any::<u64>(), dim in 2usize..=4) {
        // eigenvalues spaced so each branch lands on its own cell of a 2·dim grid
        let mut r = rng(seed);
        let values: Vec<f64> = (0..dim).map(|k| k as f64).collect();
        let obs = Operator::diagonal(&values).unwrap();
        let model = PointerModel::cyclic(2 * dim, 1.0, 1.0).unwrap();
        let sys = random_ket(&mut r, dim);
        let out = entangle_pointer(&sys, &model.ready_state(), &obs, &model).unwrap();
        for (n, o) in values.iter().enumerate() {
            let cell = model.index_of(-(*o as i64));
            let amp = out.amplitudes()[n * 2 * dim + cell];
            prop_assert!((amp - sys.amplitudes()[n]).norm() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_routes_agree(seed in any::<u64>(), dim in 2usize..=3, beta in 0.1f64..3.0, steps in 1usize..60) {
        let mut r = rng(seed);
        let h0 = random_hermitian(&mut r, dim);
        let h1 = random_hermitian(&mut r, dim);
        let s = DriveSchedule::linear(Arc::new(LinearInterpolation::new(h0, h1).unwrap()), 2.0, steps).unwrap();
        let a = jarzynski_exact(&s, beta).unwrap();
        let b = jarzynski_operator_trace(&s, beta).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn jensen_on_sample_sets(seed in any::<u64>(), n in 2usize..500) {
        let mut r = rng(seed);
        let h0 = random_hermitian(&mut r, 2);
        let h1 = random_hermitian(&mut r, 2);
        let s = DriveSchedule::linear(Arc::new(LinearInterpolation::new(h0, h1).unwrap()), 1.0, 20).unwrap();
        let w: Vec<f64> = tpm_sample(&s, 1.0, n, seed, Some(1)).unwrap().iter().map(|x| x.work + 3.0).collect();
        let rep = modified_jarzynski_check(&w, 1.0, 0.0, 3.0).unwrap();
        prop_assert!(rep.jensen_holds);
        let x: Vec<f64> = w.iter().map(|v| -v + 3.0).collect();
        prop_assert!(mean_and_standard_error(&x).0.exp() <= rep.estimator_mean * (1.0 + 1e-12));
    }

    #[test]
    fn violating_entanglers_rejected(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = SchemeConfig { steps: 10, ..SchemeConfig::default() };
        let scheme = Scheme::with_entangler(&cfg, random_unitary(&mut r, 4)).unwrap();
        let rho = scheme.step_iii_nonselective(&scheme.step_ii_barrier(&scheme.step_i_prepare().unwrap()).unwrap()).unwrap();
        let rejected = matches!(scheme.step_iv_entangle(&rho), Err(Error::SchemeConstraint { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn round_trips_hold_on_random_configs(seed in any::<u64>(), three in any::<bool>()) {
        let mut r = rng(seed);
        let n = if three { 3 } else { 2 };
        let cfg = SchemeConfig {
            beta: 0.2 + 2.0 * r.random::<f64>(),
            s0_dim: n,
            meter_dim: n,
            cell_q_levels: 2,
            cell_p_levels: n,
            pointer_dim: 2 * n,
            j_start: 2.0 * r.random::<f64>(),
            j_end: r.random::<f64>(),
            bias: r.random::<f64>() - 0.5,
            t_f: 1.0 + 5.0 * r.random::<f64>(),
            steps: 20,
            entangler_phases: (0..n * n).map(|_| 6.0 * r.random::<f64>()).collect(),
            ..SchemeConfig::default()
        };
        let rep = verify_round_trips(&cfg, seed).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }
}
