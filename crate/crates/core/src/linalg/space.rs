use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{hermitize, CMatrix, DensityMatrix, Operator, C64};
use crate::error::{arg, Error, Result};
use crate::policy::NumericPolicy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// An ordered tensor product of labeled subsystems.
///
/// The first subsystem is the most significant index: a basis state
/// `|i0, i1, ..., ik>` sits at `((i0·d1 + i1)·d2 + ...)`. The order is fixed at
/// construction and never rearranged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeSpace {
    subsystems: Vec<Subsystem>,
    total_dim: usize,
}

impl CompositeSpace {
    pub fn new<L: Into<String>>(parts: impl IntoIterator<Item = (L, usize)>) -> Result<Self> {
        Self::with_policy(parts, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy<L: Into<String>>(
        parts: impl IntoIterator<Item = (L, usize)>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let subsystems: Vec<Subsystem> = parts
            .into_iter()
            .map(|(l, d)| Subsystem {
                label: l.into(),
                dim: d,
            })
            .collect();
        if subsystems.is_empty() {
            return Err(arg("composite space needs at least one subsystem"));
        }
        let mut seen = HashSet::new();
        let mut total: usize = 1;
        for s in &subsystems {
            if s.dim == 0 {
                return Err(arg(format!("subsystem '{}' has zero dimension", s.label)));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(arg(format!("duplicate subsystem label '{}'", s.label)));
            }
            total = total.saturating_mul(s.dim);
        }
        if total > policy.max_total_dim {
            return Err(Error::Capacity {
                requested: total,
                limit: policy.max_total_dim,
            });
        }
        Ok(Self {
            subsystems,
            total_dim: total,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| arg(format!("unknown subsystem label '{label}'")))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.index_of(label)?].dim)
    }

    /// Product of the dimensions of `labels`.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().try_fold(1usize, |acc, l| Ok(acc * self.dim_of(l)?))
    }

    /// Resolves a target set. Targets must be listed in space order.
    pub(crate) fn split(&self, targets: &[&str]) -> Result<Split> {
        if targets.is_empty() {
            return Err(arg("target label set must be nonempty"));
        }
        let mut idx = Vec::with_capacity(targets.len());
        for t in targets {
            idx.push(self.index_of(t)?);
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(arg(format!(
                "target labels {targets:?} must be distinct and in subsystem order"
            )));
        }
        Ok(Split::new(self, &idx))
    }

    /// Lifts an operator on `targets` (in space order) to the whole space.
    pub fn embed(&self, op: &Operator, targets: &[&str]) -> Result<Operator> {
        let split = self.split(targets)?;
        if op.dim() != split.local_dim {
            return Err(Error::DimensionMismatch {
                expected: split.local_dim,
                found: op.dim(),
            });
        }
        let d = self.total_dim;
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if split.rest_of[i] == split.rest_of[j] {
                    m[(i, j)] = op.matrix()[(split.local_of[i], split.local_of[j])];
                }
            }
        }
        Ok(Operator::from_parts(
            m,
            op.hermitian_flag(),
            op.unitary_flag(),
            op.projector_flag(),
        ))
    }
}

/// Index bookkeeping for a target subset of a composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Split {
    pub local_dim: usize,
    pub rest_dim: usize,
    pub local_of: Vec<usize>,
    pub rest_of: Vec<usize>,
    /// `full[local * rest_dim + rest]` is the composite index.
    pub full: Vec<usize>,
}

impl Split {
    fn new(space: &CompositeSpace, targets: &[usize]) -> Self {
        let dims: Vec<usize> = space.subsystems.iter().map(|s| s.dim).collect();
        let local_dim: usize = targets.iter().map(|&t| dims[t]).product();
        let rest_dim = space.total_dim / local_dim;
        let mut local_of = vec![0; space.total_dim];
        let mut rest_of = vec![0; space.total_dim];
        let mut full = vec![0; space.total_dim];
        let mut digits = vec![0usize; dims.len()];
        for f in 0..space.total_dim {
            let mut rem = f;
            for k in (0..dims.len()).rev() {
                digits[k] = rem % dims[k];
                rem /= dims[k];
            }
            let (mut l, mut r) = (0, 0);
            for (k, &d) in dims.iter().enumerate() {
                if targets.contains(&k) {
                    l = l * d + digits[k];
                } else {
                    r = r * d + digits[k];
                }
            }
            local_of[f] = l;
            rest_of[f] = r;
            full[l * rest_dim + r] = f;
        }
        Self {
            local_dim,
            rest_dim,
            local_of,
            rest_of,
            full,
        }
    }

    /// `(op ⊗ I) · m`.
    pub fn left(&self, op: &CMatrix, m: &CMatrix) -> CMatrix {
        let d = m.nrows();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                let (li, ri) = (self.local_of[i], self.rest_of[i]);
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..self.local_dim {
                    let a = op[(li, k)];
                    if a.re != 0.0 || a.im != 0.0 {
                        acc += a * m[(self.full[k * self.rest_dim + ri], j)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `m · (op ⊗ I)†`.
    pub fn right_adjoint(&self, op: &CMatrix, m: &CMatrix) -> CMatrix {
        let d = m.nrows();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            let (lj, rj) = (self.local_of[j], self.rest_of[j]);
            for k in 0..self.local_dim {
                let a = op[(lj, k)].conj();
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let col = self.full[k * self.rest_dim + rj];
                for i in 0..d {
                    out[(i, j)] += m[(i, col)] * a;
                }
            }
        }
        out
    }

    /// `(op ⊗ I) · m · (op ⊗ I)†`, re-hermitized.
    pub fn sandwich(&self, op: &CMatrix, m: &CMatrix) -> CMatrix {
        hermitize(self.right_adjoint(op, &self.left(op, m)))
    }

    /// `tr[(op ⊗ I) · m]`.
    pub fn trace_product(&self, op: &CMatrix, m: &CMatrix) -> C64 {
        let d = m.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            let (li, ri) = (self.local_of[i], self.rest_of[i]);
            for k in 0..self.local_dim {
                let a = op[(li, k)];
                if a.re != 0.0 || a.im != 0.0 {
                    acc += a * m[(self.full[k * self.rest_dim + ri], i)];
                }
            }
        }
        acc
    }

    /// Partial trace over everything but the targets.
    pub fn keep(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.local_dim, self.local_dim);
        for a in 0..self.local_dim {
            for b in 0..self.local_dim {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..self.rest_dim {
                    acc += m[(self.full[a * self.rest_dim + r], self.full[b * self.rest_dim + r])];
                }
                out[(a, b)] = acc;
            }
        }
        out
    }
}

/// An operator acting on a subset of a composite space, applied without
/// forming the full Kronecker product.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    space: CompositeSpace,
    targets: Vec<String>,
    op: Operator,
    split: Split,
}

impl LocalOperator {
    pub fn new(space: &CompositeSpace, targets: &[&str], op: Operator) -> Result<Self> {
        let split = space.split(targets)?;
        if op.dim() != split.local_dim {
            return Err(Error::DimensionMismatch {
                expected: split.local_dim,
                found: op.dim(),
            });
        }
        Ok(Self {
            space: space.clone(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
            op,
            split,
        })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn targets(&self) -> Vec<&str> {
        self.targets.iter().map(String::as_str).collect()
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    /// The full-space operator `op ⊗ I`.
    pub fn embed(&self) -> Operator {
        self.space
            .embed(&self.op, &self.targets())
            .expect("validated at construction")
    }

    /// `O ρ O†`; the weight is carried over unchanged, so `O` should be unitary.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check(rho)?;
        Ok(DensityMatrix::from_raw(
            self.split.sandwich(self.op.matrix(), rho.matrix()),
            rho.trace_weight(),
        ))
    }

    /// Same as [`conjugate`](Self::conjugate) with the inverse, `O† ρ O`.
    pub fn conjugate_inverse(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check(rho)?;
        let adj = self.op.matrix().adjoint();
        Ok(DensityMatrix::from_raw(
            self.split.sandwich(&adj, rho.matrix()),
            rho.trace_weight(),
        ))
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.total_dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// Reduced state on the subsystems in `keep` (listed in space order).
pub fn partial_trace(rho: &DensityMatrix, space: &CompositeSpace, keep: &[&str]) -> Result<DensityMatrix> {
    if rho.dim() != space.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: rho.dim(),
        });
    }
    let split = space.split(keep)?;
    Ok(DensityMatrix::from_raw(
        hermitize(split.keep(rho.matrix())),
        rho.trace_weight(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket;

    #[test]
    fn rejects_duplicate_and_unknown_labels() {
        assert!(CompositeSpace::new([("a", 2), ("a", 3)]).is_err());
        let s = CompositeSpace::new([("a", 2), ("b", 3)]).unwrap();
        assert!(s.index_of("c").is_err());
        let rho = DensityMatrix::maximally_mixed(6).unwrap();
        assert!(partial_trace(&rho, &s, &["c"]).is_err());
        assert!(partial_trace(&rho, &s, &[]).is_err());
    }

    #[test]
    fn targets_must_follow_space_order() {
        let s = CompositeSpace::new([("a", 2), ("b", 3)]).unwrap();
        assert!(s.split(&["b", "a"]).is_err());
        assert!(s.split(&["a", "b"]).is_ok());
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_slice(&[
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ])
        .unwrap();
        let s = CompositeSpace::new([("q0", 2), ("q1", 2)]).unwrap();
        let r = partial_trace(&bell.to_density(), &s, &["q0"]).unwrap();
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(r.max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn capacity_limit_applies_to_spaces() {
        let err = CompositeSpace::new([("a", 64), ("b", 65)]).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn embed_matches_kronecker_for_middle_factor() {
        let s = CompositeSpace::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let op = Operator::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let e = s.embed(&op, &["b"]).unwrap();
        let k = crate::linalg::tensor(
            &crate::linalg::tensor(&Operator::identity(2), &op).unwrap(),
            &Operator::identity(2),
        )
        .unwrap();
        assert_eq!(e.matrix(), k.matrix());
    }
}
