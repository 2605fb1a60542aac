use pmtherm::relaxation::{
    entropy_of_weight, simulate_direct, simulate_poisson_cutoff, simulate_poisson_with, simulate_statistical,
    PoissonIntegrator,
};

#[test]
fn direct_description() {
    let t = simulate_direct(0.5, 2.0, 40).unwrap();
    assert_eq!(t.weights[0], 1.0);
    assert_eq!(t.weight_at(0.5), Some(0.0));
    assert_eq!(*t.weights.last().unwrap(), 0.0);
    let (pre, post) = t.kick();
    assert_eq!(pre - post, 1.0);
}

#[test]
fn statistical_description() {
    let t = simulate_statistical(1.0, 4.0, 40).unwrap();
    let e1 = (-1.0f64).exp();
    assert_eq!(t.weight_at(1.0), Some(e1));
    assert!((e1 - 0.3678794).abs() < 1e-7);
    let (pre, post) = t.kick();
    // the drop equals the pre-drop weight in log form: -Δ ln ρ = 1
    assert_eq!(pre.ln() - post.ln(), 1.0);
    assert!(t
        .times
        .iter()
        .zip(&t.weights)
        .filter(|(x, _)| **x < 1.0)
        .all(|(_, r)| *r == 1.0));
    let sigma = entropy_of_weight(&t);
    assert_eq!(sigma[t.dt_index()], 1.0);
    assert_eq!(sigma[0], 0.0);
}

#[test]
fn poisson_cutoff() {
    let dt = 1.0;
    let t = simulate_poisson_cutoff(dt, 2.0, 20_000).unwrap();
    assert_eq!(t.weight_at(dt), Some((-1.0f64).exp()));
    let half = t.weight_at(0.5).unwrap();
    assert!((half - (-0.5f64).exp()).abs() < 1e-6);
    let sigma = entropy_of_weight(&t);
    for (x, s) in t.times.iter().zip(&sigma) {
        if *x <= dt {
            assert!((s - x / dt).abs() < 1e-6);
        }
    }
    // coincides with the statistical description at 0 and from dt on
    let s = simulate_statistical(dt, 2.0, 20_000).unwrap();
    for k in 0..t.times.len() {
        if t.times[k] == 0.0 || t.times[k] >= dt {
            assert_eq!(t.weights[k], s.weights[k]);
        }
    }
}

#[test]
fn euler_error_halves_per_doubling() {
    let err = |steps| {
        let t = simulate_poisson_with(1.0, 1.0, steps, PoissonIntegrator::Euler).unwrap();
        t.times
            .iter()
            .zip(&t.weights)
            .map(|(x, r)| (r - (-x).exp()).abs())
            .fold(0.0, f64::max)
    };
    let e: Vec<f64> = [500, 1000, 2000, 4000].into_iter().map(err).collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1] - 2.0).abs() < 0.02, "{e:?}");
    }
}

#[test]
fn plateaus_do_not_depend_on_step_count() {
    for make in [simulate_direct, simulate_statistical, simulate_poisson_cutoff] {
        let a = make(0.7, 3.0, 10).unwrap();
        let b = make(0.7, 3.0, 10_000).unwrap();
        assert_eq!(a.kick().1, b.kick().1);
        assert_eq!(a.weights.last(), b.weights.last());
    }
}
