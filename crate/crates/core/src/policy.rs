//! Numeric tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// One record holding every tolerance and limit the library checks against.
///
/// Entry-wise maxima (`max |a_ij - b_ij|`) are used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericPolicy {
    /// Kets must have squared norm 1 within this.
    pub norm_tol: f64,
    /// `max |M - M†|` for hermitian operators and density matrices.
    pub hermitian_tol: f64,
    /// `max |M†M - I|` for unitaries.
    pub unitary_tol: f64,
    /// `max |M² - M|` for projectors.
    pub projector_tol: f64,
    /// `|tr ρ - trace_weight|`.
    pub trace_tol: f64,
    /// Smallest admissible density-matrix eigenvalue.
    pub eigenvalue_floor: f64,
    /// Imaginary part an expectation value may carry before it is an error.
    pub imaginary_residue_tol: f64,
    /// `max |Σ P(y) - I|` for a complete projector family.
    pub completeness_tol: f64,
    /// Off-sector coherence allowed in an input to event reading.
    pub coherence_tol: f64,
    /// Support-inclusion slack for relative entropies.
    pub support_tol: f64,
    /// Outcome probabilities at or below this are numerical zeros.
    pub outcome_support: f64,
    /// If every outcome probability is below this the distribution is degenerate.
    pub degenerate_probability: f64,
    /// Pointer shifts must be within this of an integer.
    pub commensurability_tol: f64,
    /// Default eigenvalue clustering tolerance, relative to the spectral range.
    pub grouping_tol: f64,
    /// Largest composite Hilbert-space dimension allowed.
    pub max_total_dim: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        norm_tol: 1e-12,
        hermitian_tol: 1e-12,
        unitary_tol: 1e-10,
        projector_tol: 1e-10,
        trace_tol: 1e-12,
        eigenvalue_floor: -1e-10,
        imaginary_residue_tol: 1e-10,
        completeness_tol: 1e-10,
        coherence_tol: 1e-10,
        support_tol: 1e-10,
        outcome_support: 1e-12,
        degenerate_probability: 1e-14,
        commensurability_tol: 1e-9,
        grouping_tol: 1e-8,
        max_total_dim: 4096,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
