//! Dense complex linear algebra over small Hilbert spaces.

mod expm;
mod operator;
mod projectors;
mod space;
mod state;

pub use expm::{eigh, evolve, expectation, propagator, Evolve, Spectrum};
pub use operator::{tensor, tensor_with, Flag, Operator};
pub use projectors::ProjectorSet;
pub use space::{partial_trace, CompositeSpace, LocalOperator, Subsystem};
pub use state::{DensityMatrix, Ket};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `(M + M†)/2`.
pub(crate) fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * C64::new(0.5, 0.0)
}
