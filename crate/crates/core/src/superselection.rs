//! Orbital superselection: Planck-cell bases, sector dephasing, and degenerate
//! energy projectors.
//!
//! A macroscopic apparatus is represented by an abstract orthonormal basis of
//! Planck cells `(q, p)`. The redefined position and momentum are diagonal in
//! that basis, so they commute exactly and coherence between cells carries no
//! observable meaning. [`dephase`] removes it.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg::{eigh, CMatrix, DensityMatrix, Operator, ProjectorSet, C64};

/// One cell of the apparatus phase space.
#[derive(Clone, Debug)]
pub struct PlanckCell {
    pub q_index: usize,
    pub p_index: usize,
    pub projector: Operator,
}

/// Complete orthonormal cell basis, `q`-major: cell `(q, p)` is basis state
/// `q·p_levels + p`.
#[derive(Clone, Debug)]
pub struct PlanckCellBasis {
    cells: Vec<PlanckCell>,
    widths: (f64, f64),
    q_levels: usize,
    p_levels: usize,
}

/// Builds `q_levels × p_levels` rank-one cell projectors.
///
/// The widths are carried for reporting only; nothing here depends on `Δq·Δp`.
pub fn build_planck_basis(q_levels: usize, p_levels: usize, widths: (f64, f64)) -> Result<PlanckCellBasis> {
    if !(widths.0 > 0.0 && widths.1 > 0.0 && widths.0.is_finite() && widths.1.is_finite()) {
        return Err(arg(format!("cell widths must be positive, got {widths:?}")));
    }
    if q_levels == 0 || p_levels == 0 {
        return Err(arg("cell counts must be positive"));
    }
    let dim = q_levels.saturating_mul(p_levels);
    let limit = crate::NumericPolicy::DEFAULT.max_total_dim;
    if dim > limit {
        return Err(crate::Error::Capacity { requested: dim, limit });
    }
    let mut cells = Vec::with_capacity(dim);
    for q in 0..q_levels {
        for p in 0..p_levels {
            cells.push(PlanckCell {
                q_index: q,
                p_index: p,
                projector: Operator::basis_projector(dim, q * p_levels + p)?,
            });
        }
    }
    Ok(PlanckCellBasis {
        cells,
        widths,
        q_levels,
        p_levels,
    })
}

impl PlanckCellBasis {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[PlanckCell] {
        &self.cells
    }

    pub fn widths(&self) -> (f64, f64) {
        self.widths
    }

    pub fn levels(&self) -> (usize, usize) {
        (self.q_levels, self.p_levels)
    }

    fn weighted_sum(&self, value: impl Fn(&PlanckCell) -> f64) -> Operator {
        let values: Vec<f64> = self.cells.iter().map(value).collect();
        Operator::diagonal(&values).expect("at least one cell")
    }

    /// Redefined position `Σ q·Δq·P(q, p)`.
    pub fn position_operator(&self) -> Operator {
        let dq = self.widths.0;
        self.weighted_sum(|c| c.q_index as f64 * dq)
    }

    /// Redefined momentum `Σ p·Δp·P(q, p)`.
    pub fn momentum_operator(&self) -> Operator {
        let dp = self.widths.1;
        self.weighted_sum(|c| c.p_index as f64 * dp)
    }

    /// The cells as superselection sectors, labeled `"q{q}p{p}"`.
    pub fn projector_set(&self) -> Result<ProjectorSet> {
        ProjectorSet::new(
            self.cells.iter().map(|c| c.projector.clone()).collect(),
            self.cells
                .iter()
                .map(|c| format!("q{}p{}", c.q_index, c.p_index))
                .collect(),
        )
    }
}

/// `Σ_y P(y)·ρ·P(y)`: removes every coherence between sectors.
pub fn dephase(rho: &DensityMatrix, sectors: &ProjectorSet) -> Result<DensityMatrix> {
    sectors.check_dim(rho)?;
    sectors.require_complete()?;
    Ok(DensityMatrix::from_raw(
        sectors.dephase_matrix(rho.matrix()),
        rho.trace_weight(),
    ))
}

/// A (possibly degenerate) eigenvalue of a Hamiltonian and its eigenprojector.
#[derive(Clone, Debug)]
pub struct EnergySector {
    pub energy: f64,
    pub projector: Operator,
    pub degeneracy: usize,
}

/// Summary of an [`EnergySector`] without the projector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorInfo {
    pub energy: f64,
    pub degeneracy: usize,
}

impl EnergySector {
    pub fn info(&self) -> SectorInfo {
        SectorInfo {
            energy: self.energy,
            degeneracy: self.degeneracy,
        }
    }
}

/// Groups the spectrum of `h` into sectors.
///
/// Consecutive sorted eigenvalues closer than `grouping_tol · max(1, range)`
/// share a sector; the sector energy is their mean.
pub fn energy_sectors(h: &Operator, grouping_tol: f64) -> Result<Vec<EnergySector>> {
    if !(grouping_tol >= 0.0 && grouping_tol.is_finite()) {
        return Err(arg(format!(
            "grouping tolerance must be non-negative, got {grouping_tol}"
        )));
    }
    let spec = eigh(h)?;
    let n = spec.values.len();
    let range = spec.values[n - 1] - spec.values[0];
    let threshold = grouping_tol * range.max(1.0);

    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        if spec.values[k] - spec.values[k - 1] > threshold {
            groups.push(vec![k]);
        } else {
            groups.last_mut().expect("nonempty").push(k);
        }
    }

    groups
        .into_iter()
        .map(|g| {
            let energy = g.iter().map(|&k| spec.values[k]).sum::<f64>() / g.len() as f64;
            let mut p = CMatrix::zeros(n, n);
            for &k in &g {
                let v = spec.vectors.column(k);
                p += v * v.adjoint();
            }
            let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
            Ok(EnergySector {
                energy,
                projector: Operator::projector(p)?,
                degeneracy: g.len(),
            })
        })
        .collect()
}

/// The sectors as an outcome family labeled `"E0"`, `"E1"`, ... (ascending energy).
pub fn sector_projector_set(sectors: &[EnergySector]) -> Result<ProjectorSet> {
    ProjectorSet::new(
        sectors.iter().map(|s| s.projector.clone()).collect(),
        (0..sectors.len()).map(|k| format!("E{k}")).collect(),
    )
}
