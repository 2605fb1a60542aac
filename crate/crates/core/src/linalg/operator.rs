use serde::{Deserialize, Serialize};

use super::{max_abs, CMatrix, C64};
use crate::error::{arg, Error, Result};
use crate::policy::NumericPolicy;

/// Tri-state structural property of an [`Operator`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flag {
    Asserted,
    Refuted,
    #[default]
    Unchecked,
}

impl Flag {
    fn and(self, other: Flag) -> Flag {
        if self == Flag::Asserted && other == Flag::Asserted {
            Flag::Asserted
        } else {
            Flag::Unchecked
        }
    }
}

/// A dense square complex matrix with hermitian / unitary / projector flags.
///
/// A flag is only ever `Asserted` after the matching check passed (or when the
/// constructor builds the property in exactly, e.g. [`Operator::identity`]).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: CMatrix,
    hermitian: Flag,
    unitary: Flag,
    projector: Flag,
}

impl Operator {
    /// Wraps a square matrix without checking any property.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(arg(format!(
                "operator must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self {
            m,
            hermitian: Flag::Unchecked,
            unitary: Flag::Unchecked,
            projector: Flag::Unchecked,
        })
    }

    /// Checks `max |M - M†| ≤ hermitian_tol`.
    pub fn hermitian(m: CMatrix) -> Result<Self> {
        let mut op = Self::new(m)?;
        let dev = op.hermitian_deviation();
        if dev > NumericPolicy::DEFAULT.hermitian_tol {
            return Err(arg(format!("operator is not hermitian (deviation {dev:e})")));
        }
        op.hermitian = Flag::Asserted;
        Ok(op)
    }

    /// Checks `max |M†M - I| ≤ unitary_tol`.
    pub fn unitary(m: CMatrix) -> Result<Self> {
        let mut op = Self::new(m)?;
        let dev = op.unitary_deviation();
        if dev > NumericPolicy::DEFAULT.unitary_tol {
            return Err(arg(format!("operator is not unitary (deviation {dev:e})")));
        }
        op.unitary = Flag::Asserted;
        Ok(op)
    }

    /// Checks hermiticity and `max |M² - M| ≤ projector_tol`.
    pub fn projector(m: CMatrix) -> Result<Self> {
        let mut op = Self::hermitian(m)?;
        let dev = op.idempotence_deviation();
        if dev > NumericPolicy::DEFAULT.projector_tol {
            return Err(arg(format!("operator is not a projector (deviation {dev:e})")));
        }
        op.projector = Flag::Asserted;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
            hermitian: Flag::Asserted,
            unitary: Flag::Asserted,
            projector: Flag::Asserted,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::zeros(dim, dim),
            hermitian: Flag::Asserted,
            unitary: Flag::Refuted,
            projector: Flag::Asserted,
        }
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(arg("diagonal operator needs at least one entry"));
        }
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        Ok(Self {
            m,
            hermitian: Flag::Asserted,
            unitary: Flag::Unchecked,
            projector: Flag::Unchecked,
        })
    }

    /// `|k><k|` on a `dim`-dimensional space.
    pub fn basis_projector(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(arg(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self {
            m,
            hermitian: Flag::Asserted,
            unitary: Flag::Unchecked,
            projector: Flag::Asserted,
        })
    }

    pub(crate) fn from_parts(m: CMatrix, hermitian: Flag, unitary: Flag, projector: Flag) -> Self {
        Self {
            m,
            hermitian,
            unitary,
            projector,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn hermitian_flag(&self) -> Flag {
        self.hermitian
    }

    pub fn unitary_flag(&self) -> Flag {
        self.unitary
    }

    pub fn projector_flag(&self) -> Flag {
        self.projector
    }

    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn unitary_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.m.adjoint() * &self.m - CMatrix::identity(n, n)))
    }

    pub fn idempotence_deviation(&self) -> f64 {
        max_abs(&(&self.m * &self.m - &self.m))
    }

    /// True when asserted, or when unchecked and the check passes.
    pub fn is_hermitian(&self) -> bool {
        match self.hermitian {
            Flag::Asserted => true,
            Flag::Refuted => false,
            Flag::Unchecked => self.hermitian_deviation() <= NumericPolicy::DEFAULT.hermitian_tol,
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self.unitary {
            Flag::Asserted => true,
            Flag::Refuted => false,
            Flag::Unchecked => self.unitary_deviation() <= NumericPolicy::DEFAULT.unitary_tol,
        }
    }

    pub(crate) fn require_hermitian(&self, what: &str) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(arg(format!(
                "{what} must be hermitian (deviation {:e})",
                self.hermitian_deviation()
            )))
        }
    }

    pub(crate) fn require_unitary(&self, what: &str) -> Result<()> {
        if self.is_unitary() {
            Ok(())
        } else {
            Err(arg(format!(
                "{what} must be unitary (deviation {:e})",
                self.unitary_deviation()
            )))
        }
    }

    pub fn adjoint(&self) -> Operator {
        Self {
            m: self.m.adjoint(),
            ..self.clone()
        }
    }

    /// Multiplies by a real factor. Hermiticity survives, the other flags only for factor 1.
    pub fn scaled(&self, factor: f64) -> Operator {
        let keep = |f: Flag| if factor == 1.0 { f } else { Flag::Unchecked };
        Self {
            m: &self.m * C64::new(factor, 0.0),
            hermitian: self.hermitian,
            unitary: keep(self.unitary),
            projector: keep(self.projector),
        }
    }

    /// Sum of two operators of equal dimension.
    pub fn plus(&self, other: &Operator) -> Result<Operator> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
            hermitian: self.hermitian.and(other.hermitian),
            unitary: Flag::Unchecked,
            projector: Flag::Unchecked,
        })
    }

    /// Product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * &other.m,
            hermitian: Flag::Unchecked,
            unitary: self.unitary.and(other.unitary),
            projector: Flag::Unchecked,
        })
    }

    /// `[self, other]` as a raw matrix.
    pub fn commutator(&self, other: &Operator) -> Result<CMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(&self.m * &other.m - &other.m * &self.m)
    }
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Kronecker product `a ⊗ b` with the default dimension limit.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    tensor_with(a, b, &NumericPolicy::DEFAULT)
}

/// Kronecker product `a ⊗ b`; entry `(i·db + k, j·db + l)` is `a[i,j]·b[k,l]`.
pub fn tensor_with(a: &Operator, b: &Operator, policy: &NumericPolicy) -> Result<Operator> {
    let requested = a.dim().saturating_mul(b.dim());
    if requested > policy.max_total_dim {
        return Err(Error::Capacity {
            requested,
            limit: policy.max_total_dim,
        });
    }
    Ok(Operator {
        m: a.m.kronecker(&b.m),
        hermitian: a.hermitian.and(b.hermitian),
        unitary: a.unitary.and(b.unitary),
        projector: a.projector.and(b.projector),
    })
}
