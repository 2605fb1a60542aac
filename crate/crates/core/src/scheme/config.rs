use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

/// Parameters of the five-step protocol. Every field has a default, so a
/// config file only lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub beta: f64,
    /// Sites of the measured system S0; also the number of meter values.
    pub s0_dim: usize,
    pub meter_dim: usize,
    /// Planck cells of the apparatus A' (`q_levels × p_levels`).
    pub cell_q_levels: usize,
    pub cell_p_levels: usize,
    pub cell_widths: (f64, f64),
    /// Grid size of the pointer A.
    pub pointer_dim: usize,
    /// Tunneling at the start and end of the barrier ramp.
    pub j_start: f64,
    pub j_end: f64,
    /// Site bias along the measured observable at the start of the ramp.
    pub bias: f64,
    /// Bias at the end of the ramp; absent means constant.
    pub bias_end: Option<f64>,
    pub t_f: f64,
    pub steps: usize,
    /// Coupling Λ and duration μ of the S0–A' interaction.
    pub nsm_coupling: f64,
    pub nsm_duration: f64,
    /// Coupling Λ and duration μ of the ψ–A interaction.
    pub event_coupling: f64,
    pub event_duration: f64,
    /// Phase displacements of A compared by the trigger check.
    pub displacements: Vec<f64>,
    /// Optional phases `φ_{n,m}` of the controlled shift `|n,m⟩ → e^{iφ}|n,m+n⟩`,
    /// row-major over `(n, m)`. Empty means no phases.
    pub entangler_phases: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Run steps III–V. Off gives a plain TPM run of the drive.
    pub measure: bool,
    /// Prepare S0 in the first eigenstate of the observable, without tunneling or drive.
    pub eigenstate_prep: bool,
    /// Keep every intermediate density matrix in the run records.
    pub keep_states: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            s0_dim: 2,
            meter_dim: 2,
            cell_q_levels: 2,
            cell_p_levels: 2,
            cell_widths: (1.0, 1.0),
            pointer_dim: 4,
            j_start: 1.0,
            j_end: 0.25,
            bias: 0.0,
            bias_end: None,
            t_f: 10.0,
            steps: 200,
            nsm_coupling: 1.0,
            nsm_duration: 1.0,
            event_coupling: 1.0,
            event_duration: 1.0,
            displacements: vec![0.3, 1.7],
            entangler_phases: Vec::new(),
            n_samples: 10_000,
            seed: 7,
            measure: true,
            eigenstate_prep: false,
            keep_states: false,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(arg(format!("beta must be positive, got {}", self.beta)));
        }
        if self.s0_dim < 2 {
            return Err(arg("s0_dim must be at least 2"));
        }
        if self.meter_dim != self.s0_dim {
            return Err(arg(format!(
                "meter_dim ({}) must equal s0_dim ({})",
                self.meter_dim, self.s0_dim
            )));
        }
        if self.cell_q_levels == 0 || self.cell_p_levels == 0 || self.pointer_dim == 0 {
            return Err(arg("cell counts and pointer_dim must be positive"));
        }
        if self.steps == 0 {
            return Err(arg("steps must be positive"));
        }
        if !(self.t_f >= 0.0 && self.t_f.is_finite()) {
            return Err(arg("t_f must be non-negative"));
        }
        if self.n_samples == 0 {
            return Err(arg("n_samples must be positive"));
        }
        if !self.entangler_phases.is_empty() && self.entangler_phases.len() != self.s0_dim * self.meter_dim {
            return Err(arg(format!(
                "entangler_phases needs {} entries",
                self.s0_dim * self.meter_dim
            )));
        }
        for x in [self.j_start, self.j_end, self.bias, self.bias_end.unwrap_or(0.0)] {
            if !x.is_finite() {
                return Err(arg("drive parameters must be finite"));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.cell_q_levels * self.cell_p_levels
    }
}
