use super::space::Split;
use super::{hermitize, max_abs, CMatrix, CompositeSpace, DensityMatrix, Operator, C64};
use crate::error::{arg, Error, Result};
use crate::policy::NumericPolicy;

/// A family of mutually orthogonal projectors with outcome labels.
///
/// Completeness (`Σ P(y) = I`) is measured at construction but not enforced
/// here; channels that need it check [`ProjectorSet::is_complete`].
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    labels: Vec<String>,
    projectors: Vec<Operator>,
    completeness_deviation: f64,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Dense,
    /// Every projector is a 0/1 diagonal; `sector_of[i]` names the projector
    /// containing basis state `i` (or `usize::MAX`).
    Diagonal {
        sector_of: Vec<usize>,
    },
    /// Projectors of the form `P_local ⊗ I` on a composite space.
    Local {
        split: Split,
        local: Vec<CMatrix>,
        local_sector: Option<Vec<usize>>,
    },
}

impl ProjectorSet {
    pub fn new(projectors: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(arg("projector set must be nonempty"));
        }
        if projectors.len() != labels.len() {
            return Err(arg("one label per projector is required"));
        }
        let dim = projectors[0].dim();
        let tol = NumericPolicy::DEFAULT.projector_tol;
        let mut checked = Vec::with_capacity(projectors.len());
        for p in projectors {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            checked.push(match p.projector_flag() {
                super::Flag::Asserted => p,
                _ => Operator::projector(p.into_matrix())?,
            });
        }
        for a in 0..checked.len() {
            for b in (a + 1)..checked.len() {
                let overlap = max_abs(&(checked[a].matrix() * checked[b].matrix()));
                if overlap > tol {
                    return Err(arg(format!(
                        "projectors '{}' and '{}' are not orthogonal (overlap {overlap:e})",
                        labels[a], labels[b]
                    )));
                }
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &checked {
            sum += p.matrix();
        }
        let completeness_deviation = max_abs(&(sum - CMatrix::identity(dim, dim)));
        let repr = diagonal_sectors(&checked).map_or(Repr::Dense, |sector_of| Repr::Diagonal { sector_of });
        Ok(Self {
            labels,
            projectors: checked,
            completeness_deviation,
            repr,
        })
    }

    /// Rank-one projectors onto the computational basis, labeled `"0"`, `"1"`, ...
    pub fn computational(dim: usize) -> Result<Self> {
        let ps = (0..dim)
            .map(|k| Operator::basis_projector(dim, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ps, (0..dim).map(|k| k.to_string()).collect())
    }

    /// Lifts this set to `P(y) ⊗ I` on `space`, acting on `targets` (space order).
    pub fn embed(&self, space: &CompositeSpace, targets: &[&str]) -> Result<ProjectorSet> {
        let split = space.split(targets)?;
        if split.local_dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: split.local_dim,
                found: self.dim(),
            });
        }
        let projectors = self
            .projectors
            .iter()
            .map(|p| space.embed(p, targets))
            .collect::<Result<Vec<_>>>()?;
        let local_sector = match &self.repr {
            Repr::Diagonal { sector_of } => Some(sector_of.clone()),
            _ => None,
        };
        Ok(Self {
            labels: self.labels.clone(),
            projectors,
            // a local set is complete iff its embedding is
            completeness_deviation: self.completeness_deviation,
            repr: Repr::Local {
                split,
                local: self.projectors.iter().map(|p| p.matrix().clone()).collect(),
                local_sector,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn projector(&self, y: usize) -> &Operator {
        &self.projectors[y]
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// `max |Σ P(y) - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_deviation
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_deviation <= NumericPolicy::DEFAULT.completeness_tol
    }

    pub(crate) fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(arg(format!(
                "projector set is incomplete (|ΣP - I| = {:e})",
                self.completeness_deviation
            )))
        }
    }

    pub(crate) fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// `P(y) · m · P(y)`.
    pub(crate) fn sandwich(&self, y: usize, m: &CMatrix) -> CMatrix {
        match &self.repr {
            Repr::Dense => {
                let p = self.projectors[y].matrix();
                hermitize(p * m * p)
            }
            Repr::Diagonal { sector_of } => mask(m, |i, j| sector_of[i] == y && sector_of[j] == y),
            Repr::Local {
                split,
                local_sector: Some(sec),
                ..
            } => mask(m, |i, j| sec[split.local_of[i]] == y && sec[split.local_of[j]] == y),
            Repr::Local { split, local, .. } => split.sandwich(&local[y], m),
        }
    }

    /// `Re tr[P(y) · m]`.
    pub(crate) fn population(&self, y: usize, m: &CMatrix) -> f64 {
        match &self.repr {
            Repr::Dense => {
                let p = self.projectors[y].matrix();
                let n = m.nrows();
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += (p[(i, j)] * m[(j, i)]).re;
                    }
                }
                acc
            }
            Repr::Diagonal { sector_of } => (0..m.nrows())
                .filter(|&i| sector_of[i] == y)
                .map(|i| m[(i, i)].re)
                .sum(),
            Repr::Local { split, local, .. } => split.trace_product(&local[y], m).re,
        }
    }

    /// `Σ_y P(y) · m · P(y)`.
    pub(crate) fn dephase_matrix(&self, m: &CMatrix) -> CMatrix {
        match &self.repr {
            Repr::Diagonal { sector_of } => mask(m, |i, j| sector_of[i] == sector_of[j]),
            Repr::Local {
                split,
                local_sector: Some(sec),
                ..
            } => mask(m, |i, j| sec[split.local_of[i]] == sec[split.local_of[j]]),
            _ => {
                let mut out = CMatrix::zeros(m.nrows(), m.ncols());
                for y in 0..self.len() {
                    out += self.sandwich(y, m);
                }
                out
            }
        }
    }
}

fn mask(m: &CMatrix, keep: impl Fn(usize, usize) -> bool) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            if keep(i, j) {
                out[(i, j)] = m[(i, j)];
            }
        }
    }
    out
}

/// Returns the basis-to-sector map when every projector is an exact 0/1 diagonal.
fn diagonal_sectors(ps: &[Operator]) -> Option<Vec<usize>> {
    let n = ps[0].dim();
    let mut sector_of = vec![usize::MAX; n];
    for (y, p) in ps.iter().enumerate() {
        let m = p.matrix();
        for j in 0..n {
            for i in 0..n {
                let z = m[(i, j)];
                if i != j {
                    if z != C64::new(0.0, 0.0) {
                        return None;
                    }
                } else if z == C64::new(1.0, 0.0) {
                    if sector_of[i] != usize::MAX {
                        return None;
                    }
                    sector_of[i] = y;
                } else if z != C64::new(0.0, 0.0) {
                    return None;
                }
            }
        }
    }
    Some(sector_of)
}
