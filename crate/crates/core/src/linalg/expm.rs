use super::{hermitize, CMatrix, DensityMatrix, Ket, Operator, C64};
use crate::error::{arg, Error, Result};
use crate::policy::NumericPolicy;

/// Eigendecomposition of a hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let w = f(self.values[k]);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eigh(h: &Operator) -> Result<Spectrum> {
    h.require_hermitian("operator passed to eigh")?;
    let eig = hermitize(h.matrix().clone()).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors,
    })
}

/// `exp(-i·h·duration)` with ħ = 1, via eigendecomposition.
pub fn propagator(h: &Operator, duration: f64) -> Result<Operator> {
    if !duration.is_finite() {
        return Err(arg(format!("duration must be finite, got {duration}")));
    }
    h.require_hermitian("generator")?;
    if duration == 0.0 {
        return Ok(Operator::identity(h.dim()));
    }
    let spec = eigh(h)?;
    let u = spec.apply(|e| C64::from_polar(1.0, -e * duration));
    Ok(Operator::from_parts(
        u,
        crate::linalg::Flag::Unchecked,
        crate::linalg::Flag::Asserted,
        crate::linalg::Flag::Unchecked,
    ))
}

/// States that a unitary can act on.
pub trait Evolve: Sized {
    fn dim(&self) -> usize;
    /// Applies `u` (assumed unitary).
    fn apply_unitary(&self, u: &Operator) -> Self;
}

impl Evolve for Ket {
    fn dim(&self) -> usize {
        Ket::dim(self)
    }

    fn apply_unitary(&self, u: &Operator) -> Self {
        Ket::from_raw(u.matrix() * self.amplitudes())
    }
}

impl Evolve for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn apply_unitary(&self, u: &Operator) -> Self {
        let m = u.matrix() * self.matrix() * u.matrix().adjoint();
        DensityMatrix::from_raw(hermitize(m), self.trace_weight())
    }
}

/// Schrödinger / von Neumann evolution under a time-independent `h` for `duration`.
pub fn evolve<S: Evolve>(state: &S, h: &Operator, duration: f64) -> Result<S> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: state.dim(),
        });
    }
    let u = propagator(h, duration)?;
    Ok(state.apply_unitary(&u))
}

/// `tr[obs·ρ]`. The imaginary residue must stay below `imaginary_residue_tol`.
pub fn expectation(obs: &Operator, rho: &DensityMatrix) -> Result<f64> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            found: rho.dim(),
        });
    }
    obs.require_hermitian("observable")?;
    let n = obs.dim();
    let a = obs.matrix();
    let r = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * r[(j, i)];
        }
    }
    let tol = NumericPolicy::DEFAULT.imaginary_residue_tol * (1.0 + acc.re.abs());
    if acc.im.abs() > tol {
        return Err(Error::NumericalConsistency(format!(
            "expectation value has imaginary part {:e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn sigma_x() -> Operator {
        Operator::hermitian(CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        ))
        .unwrap()
    }

    #[test]
    fn zero_duration_is_identity() {
        let k = Ket::basis(2, 0).unwrap();
        let out = evolve(&k, &sigma_x(), 0.0).unwrap();
        assert_eq!(out, k);
    }

    #[test]
    fn sigma_x_half_pi_flips() {
        // exp(-i σx π/2) = -i σx, so |0> -> -i|1>
        let k = Ket::basis(2, 0).unwrap();
        let out = evolve(&k, &sigma_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let a = out.amplitudes();
        assert!(a[0].norm() < 1e-15);
        assert!((a[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let h = Operator::new(m).unwrap();
        let k = Ket::basis(2, 0).unwrap();
        assert!(matches!(evolve(&k, &h, 1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn non_finite_duration_rejected() {
        let k = Ket::basis(2, 0).unwrap();
        assert!(evolve(&k, &sigma_x(), f64::NAN).is_err());
    }

    #[test]
    fn propagator_is_unitary() {
        let u = propagator(&sigma_x(), 0.7).unwrap();
        assert!(u.unitary_deviation() < 1e-14);
    }

    #[test]
    fn expectation_basics() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let z = Operator::diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(expectation(&z, &half).unwrap(), 0.0);
        assert_eq!(expectation(&Operator::identity(2), &half).unwrap(), 1.0);
    }

    #[test]
    fn spectrum_reconstructs() {
        let h = sigma_x();
        let s = eigh(&h).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15 && (s.values[1] - 1.0).abs() < 1e-15);
        let back = s.apply(|e| C64::new(e, 0.0));
        assert!(max_abs(&(back - h.matrix())) < 1e-15);
    }
}
