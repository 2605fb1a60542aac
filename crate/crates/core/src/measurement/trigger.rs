use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg::{CVector, C64};
use crate::policy::NumericPolicy;

/// One phase displacement produced by the black-box system A.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDisplacement {
    pub displacement: f64,
    pub branch_label: String,
}

impl PhaseDisplacement {
    pub fn new(displacement: f64, branch_label: impl Into<String>) -> Result<Self> {
        if !displacement.is_finite() {
            return Err(arg(format!("displacement must be finite, got {displacement}")));
        }
        Ok(Self {
            displacement,
            branch_label: branch_label.into(),
        })
    }
}

/// `Σ_n c_n·e^{-iδ·m_n}|m_n⟩`.
pub fn trigger_state(amplitudes: &[C64], displacement: f64, meter_values: &[f64]) -> Result<CVector> {
    if amplitudes.len() != meter_values.len() {
        return Err(arg(format!(
            "{} amplitudes for {} meter values",
            amplitudes.len(),
            meter_values.len()
        )));
    }
    Ok(CVector::from_iterator(
        amplitudes.len(),
        amplitudes
            .iter()
            .zip(meter_values)
            .map(|(c, m)| c * C64::from_polar(1.0, -displacement * m)),
    ))
}

/// True when every displacement gives the same meter-basis Born distribution
/// (within `1e-14` per outcome) as the first one.
pub fn phase_equivalence_trigger(
    amplitudes: &[C64],
    branches: &[PhaseDisplacement],
    meter_values: &[f64],
) -> Result<bool> {
    let tol = NumericPolicy::DEFAULT.degenerate_probability;
    let Some(first) = branches.first() else {
        return Ok(true);
    };
    let reference: Vec<f64> = trigger_state(amplitudes, first.displacement, meter_values)?
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    for b in &branches[1..] {
        let v = trigger_state(amplitudes, b.displacement, meter_values)?;
        if v.iter().zip(&reference).any(|(z, p)| (z.norm_sqr() - p).abs() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}
