use super::{hermitize, max_abs, trace, CMatrix, CVector, C64};
use crate::error::{arg, Error, Result};
use crate::policy::NumericPolicy;

/// A normalized state vector.
///
/// Subnormalized kets do not exist; redefined ensembles with weight other than
/// one are density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Requires `|ψ|² = 1` within `norm_tol`.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(arg("ket must have positive dimension"));
        }
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > NumericPolicy::DEFAULT.norm_tol {
            return Err(arg(format!("ket is not normalized (|ψ|² = {n2})")));
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let n = amps.norm();
        if amps.is_empty() || !n.is_finite() || n == 0.0 {
            return Err(arg("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { amps: amps.unscale(n) })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(arg(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Ok(Self { amps: v })
    }

    pub(crate) fn from_raw(amps: CVector) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `|self> ⊗ |other>`.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let d = self.dim() * other.dim();
        if d > NumericPolicy::DEFAULT.max_total_dim {
            return Err(Error::Capacity {
                requested: d,
                limit: NumericPolicy::DEFAULT.max_total_dim,
            });
        }
        Ok(Ket {
            amps: self.amps.kronecker(&other.amps),
        })
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::pure(self)
    }
}

/// A density matrix with an explicit trace weight.
///
/// Conventional ensembles have weight 1. Redefined ensembles `e^{-σ}·ρ` carry
/// weight `e^{-σ}`; for the measured side σ is negative and the weight exceeds one.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
    weight: f64,
}

impl DensityMatrix {
    /// Normalized density matrix (trace 1).
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_weight(m, 1.0)
    }

    /// Hermitian, eigenvalues `≥ eigenvalue_floor·weight`, trace equal to `weight`.
    pub fn with_weight(m: CMatrix, weight: f64) -> Result<Self> {
        let p = NumericPolicy::DEFAULT;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(arg(format!("trace weight must be positive and finite, got {weight}")));
        }
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(arg("density matrix must be square and non-empty"));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > p.hermitian_tol {
            return Err(arg(format!("density matrix is not hermitian (deviation {herm:e})")));
        }
        let tr = trace(&m);
        if (tr.re - weight).abs() > p.trace_tol * weight.max(1.0) {
            return Err(arg(format!(
                "density matrix trace {} does not match weight {weight}",
                tr.re
            )));
        }
        let m = hermitize(m);
        let min_ev = m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_ev < p.eigenvalue_floor * weight.max(1.0) {
            return Err(arg(format!("density matrix has negative eigenvalue {min_ev:e}")));
        }
        Ok(Self { m, weight })
    }

    /// `|ψ><ψ|`.
    pub fn pure(ket: &Ket) -> Self {
        let a = ket.amplitudes();
        Self {
            m: a * a.adjoint(),
            weight: 1.0,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(arg("dimension must be positive"));
        }
        Ok(Self {
            m: CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
            weight: 1.0,
        })
    }

    /// Diagonal state with the given populations; they must sum to 1.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, p) in populations.iter().enumerate() {
            m[(i, i)] = C64::new(*p, 0.0);
        }
        Self::new(m)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_raw(m: CMatrix, weight: f64) -> Self {
        Self { m, weight }
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

    pub fn trace_weight(&self) -> f64 {
        self.weight
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for hermitian ρ
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `ρ ⊗ σ`, weights multiply.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.dim() * other.dim();
        if d > NumericPolicy::DEFAULT.max_total_dim {
            return Err(Error::Capacity {
                requested: d,
                limit: NumericPolicy::DEFAULT.max_total_dim,
            });
        }
        Ok(Self {
            m: self.m.kronecker(&other.m),
            weight: self.weight * other.weight,
        })
    }

    /// `factor · ρ`; the weight scales with it.
    pub fn scaled(&self, factor: f64) -> Result<DensityMatrix> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(arg(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self {
            m: &self.m * C64::new(factor, 0.0),
            weight: self.weight * factor,
        })
    }

    /// Same matrix divided by its weight.
    pub fn normalized(&self) -> DensityMatrix {
        self.scaled(1.0 / self.weight)
            .map(|mut d| {
                d.weight = 1.0;
                d
            })
            .unwrap_or_else(|_| self.clone())
    }

    /// `max |ρ_ij - σ_ij|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.m - &other.m))
    }
}
