mod common;

use common::*;
use pmtherm::linalg::{CMatrix, DensityMatrix, Operator, ProjectorSet};
use pmtherm::superselection::{build_planck_basis, dephase, energy_sectors};
use pmtherm::Error;

#[test]
fn planck_cells() {
    let b = build_planck_basis(3, 2, (0.5, 2.0)).unwrap();
    let comm = b.position_operator().commutator(&b.momentum_operator()).unwrap();
    assert!(comm.iter().all(|z| *z == c(0.0, 0.0)));

    let one = build_planck_basis(1, 1, (1.0, 1.0)).unwrap();
    assert_eq!(one.cells().len(), 1);
    assert_eq!(one.cells()[0].projector.matrix(), Operator::identity(1).matrix());

    let four = build_planck_basis(2, 2, (1.0, 1.0)).unwrap();
    let mut sum = CMatrix::zeros(4, 4);
    for (k, a) in four.cells().iter().enumerate() {
        let p = a.projector.matrix();
        let rank: f64 = (0..4).map(|i| p[(i, i)].re).sum();
        assert_eq!(rank, 1.0);
        for b in &four.cells()[k + 1..] {
            assert!((p * b.projector.matrix()).iter().all(|z| z.norm() == 0.0));
        }
        sum += p;
    }
    assert_eq!(sum, CMatrix::identity(4, 4));

    assert!(matches!(build_planck_basis(2, 2, (0.0, 1.0)), Err(Error::Argument(_))));
    assert!(matches!(build_planck_basis(2, 2, (1.0, -1.0)), Err(Error::Argument(_))));
}

fn two_blocks() -> ProjectorSet {
    let p0 = Operator::diagonal(&[1.0, 1.0, 0.0, 0.0]).unwrap();
    let p1 = Operator::diagonal(&[0.0, 0.0, 1.0, 1.0]).unwrap();
    ProjectorSet::new(vec![p0, p1], vec!["low".into(), "high".into()]).unwrap()
}

#[test]
fn dephase_examples() {
    let blocky = DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert!(dephase(&blocky, &two_blocks()).unwrap().max_abs_diff(&blocky) < 1e-15);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = pmtherm::linalg::Ket::from_slice(&[c(h, 0.0), c(h, 0.0)]).unwrap();
    let z = ProjectorSet::computational(2).unwrap();
    let out = dephase(&plus.to_density(), &z).unwrap();
    assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);

    let rho = random_density(&mut rng(7), 4);
    let out = dephase(&rho, &two_blocks()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let same = (i < 2) == (j < 2);
            let want = if same { rho.matrix()[(i, j)] } else { c(0.0, 0.0) };
            assert_eq!(out.matrix()[(i, j)], want);
        }
    }

    let incomplete = ProjectorSet::new(vec![Operator::diagonal(&[1.0, 0.0]).unwrap()], vec!["only".into()]);
    let err = incomplete.and_then(|s| dephase(&DensityMatrix::maximally_mixed(2).unwrap(), &s));
    assert!(matches!(err, Err(Error::Argument(_))));
}

#[test]
fn energy_sector_examples() {
    let s = energy_sectors(&Operator::diagonal(&[0.0, 0.0, 1.0]).unwrap(), 1e-9).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!((s[0].energy, s[0].degeneracy), (0.0, 2));
    assert_eq!((s[1].energy, s[1].degeneracy), (1.0, 1));

    let s = energy_sectors(&Operator::identity(3), 1e-9).unwrap();
    assert_eq!(s.len(), 1);
    assert!(max_diff(s[0].projector.matrix(), &CMatrix::identity(3, 3)) < 1e-12);
}

#[test]
fn energy_sector_count_matches_reference_eigensolve() {
    let mut r = rng(8);
    for n in 2..=6 {
        let h = random_hermitian(&mut r, n);
        // reference: nalgebra's own hermitian eigensolver
        let mut ev: Vec<f64> = h.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let min_gap = ev.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let range = ev[n - 1] - ev[0];
        let tol = 0.1 * min_gap / range.max(1.0);
        let s = energy_sectors(&h, tol).unwrap();
        assert_eq!(s.len(), n);
        for sec in &s {
            let comm = sec.projector.commutator(&h).unwrap();
            assert!(comm.iter().all(|z| z.norm() < 1e-10));
        }
    }
}
