use rand::Rng;

use super::ledger::{EntropyCause, EntropyLedger};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, DensityMatrix, ProjectorSet};
use crate::policy::NumericPolicy;
use crate::sampling::{pick_with, stream_rng};
use crate::superselection::dephase;

/// `Σ_y P(y)·ρ·P(y)`.
pub fn nonselective_measure(rho: &DensityMatrix, outcomes: &ProjectorSet) -> Result<DensityMatrix> {
    dephase(rho, outcomes)
}

/// Result of one event reading.
#[derive(Clone, Debug)]
pub struct EventOutcome {
    pub index: usize,
    pub label: String,
    /// Born probability of the selected outcome.
    pub probability: f64,
    /// `P(y)·ρ·P(y)` normalized to trace 1.
    pub collapsed: DensityMatrix,
    /// Entropy produced (0 when only one outcome was possible, otherwise 1).
    pub sigma: f64,
    pub ledger: EntropyLedger,
}

/// Born probabilities `tr[P(y)·ρ] / weight`.
pub fn outcome_probabilities(rho: &DensityMatrix, outcomes: &ProjectorSet) -> Result<Vec<f64>> {
    outcomes.check_dim(rho)?;
    let w = rho.trace_weight();
    Ok((0..outcomes.len())
        .map(|y| (outcomes.population(y, rho.matrix()) / w).max(0.0))
        .collect())
}

/// Selects one outcome of an already dephased state and books the entropy.
///
/// The draw comes from stream 0 of `seed`. The ledger gains `(m_label, +σ)` and
/// `(s_label, -σ)` with σ = 1, or σ = 0 when a single outcome carries all the
/// probability.
pub fn event_read(
    rho: &DensityMatrix,
    outcomes: &ProjectorSet,
    seed: u64,
    ledger: EntropyLedger,
    s_label: &str,
    m_label: &str,
) -> Result<EventOutcome> {
    event_read_with(rho, outcomes, &mut stream_rng(seed, 0), ledger, s_label, m_label)
}

/// [`event_read`] drawing from a caller-supplied generator.
pub fn event_read_with<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    outcomes: &ProjectorSet,
    rng: &mut R,
    ledger: EntropyLedger,
    s_label: &str,
    m_label: &str,
) -> Result<EventOutcome> {
    read(rho, outcomes, rng, ledger, s_label, m_label, EntropyCause::EventReading)
}

/// Outcome distribution of a dephased state, before any selection.
#[derive(Clone, Debug, PartialEq)]
pub struct Branching {
    /// Born probabilities; if any outcome is supported, values at or below the
    /// support threshold are set to 0.
    pub probabilities: Vec<f64>,
    /// Number of outcomes above the support threshold.
    pub support: usize,
    /// Entropy a reading would produce: 0 for a single supported outcome, else 1.
    pub sigma: f64,
}

/// Validates the reading preconditions and returns the Born distribution.
pub fn branching(rho: &DensityMatrix, outcomes: &ProjectorSet) -> Result<Branching> {
    let policy = NumericPolicy::DEFAULT;
    outcomes.check_dim(rho)?;
    outcomes.require_complete()?;
    let coherence = max_abs(&(rho.matrix() - outcomes.dephase_matrix(rho.matrix())));
    if coherence > policy.coherence_tol * rho.trace_weight().max(1.0) {
        return Err(Error::Precondition(format!(
            "state keeps coherence {coherence:e} between outcome sectors; apply the non-selective measurement first"
        )));
    }
    let mut probabilities = outcome_probabilities(rho, outcomes)?;
    if probabilities.iter().all(|p| *p < policy.degenerate_probability) {
        return Err(Error::DegenerateDistribution {
            floor: policy.degenerate_probability,
        });
    }
    let support = probabilities.iter().filter(|p| **p > policy.outcome_support).count();
    if support > 0 {
        for p in probabilities.iter_mut().filter(|p| **p <= policy.outcome_support) {
            *p = 0.0;
        }
    }
    Ok(Branching {
        probabilities,
        support,
        sigma: if support <= 1 { 0.0 } else { 1.0 },
    })
}

/// `P(y)·ρ·P(y)` renormalized to trace 1.
pub fn collapse(rho: &DensityMatrix, outcomes: &ProjectorSet, y: usize) -> Result<DensityMatrix> {
    outcomes.check_dim(rho)?;
    if y >= outcomes.len() {
        return Err(crate::error::arg(format!("outcome {y} out of range")));
    }
    let block = outcomes.sandwich(y, rho.matrix());
    let tr: f64 = (0..block.nrows()).map(|i| block[(i, i)].re).sum();
    if tr <= 0.0 {
        return Err(Error::Precondition(format!("outcome {y} has zero probability")));
    }
    Ok(DensityMatrix::from_raw(block.unscale(tr), 1.0))
}

/// Ledger cause for a reading with the given entropy.
pub(crate) fn cause_for(sigma: f64, cause: EntropyCause) -> EntropyCause {
    if sigma == 0.0 {
        EntropyCause::None
    } else {
        cause
    }
}

pub(crate) fn read<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    outcomes: &ProjectorSet,
    rng: &mut R,
    mut ledger: EntropyLedger,
    s_label: &str,
    m_label: &str,
    cause: EntropyCause,
) -> Result<EventOutcome> {
    let b = branching(rho, outcomes)?;
    let index = pick_with(&b.probabilities, rng).expect("some probability is positive");
    let collapsed = collapse(rho, outcomes, index)?;
    ledger.record_reading(m_label, s_label, b.sigma, cause_for(b.sigma, cause));
    Ok(EventOutcome {
        index,
        label: outcomes.labels()[index].clone(),
        probability: b.probabilities[index],
        collapsed,
        sigma: b.sigma,
        ledger,
    })
}
