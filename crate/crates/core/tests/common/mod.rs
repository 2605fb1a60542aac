//! Random inputs and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use pmtherm::linalg::{CMatrix, DensityMatrix, Ket, Operator, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ginibre<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> Operator {
    let g = ginibre(rng, n);
    Operator::hermitian((&g + g.adjoint()).scale(0.5)).unwrap()
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Operator {
    let q = ginibre(rng, n).qr().q();
    Operator::unitary(q).unwrap()
}

pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n);
    let m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_ket<R: Rng>(rng: &mut R, n: usize) -> Ket {
    let v = pmtherm::linalg::CVector::from_fn(n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    Ket::normalized(v).unwrap()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(-i·h·t)` by scaling, a 50-term power series, and squaring.
pub fn expm_series(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    let a = h.scale(t) * c(0.0, -1.0);
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    let squarings = norm.log2().ceil().max(0.0) as u32 + 2;
    let a = a.unscale(2f64.powi(squarings as i32));
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=50 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Kronecker product by explicit index loop.
pub fn kron_loop(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}
