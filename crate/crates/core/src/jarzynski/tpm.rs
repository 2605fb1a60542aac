use rand::Rng;
use serde::{Deserialize, Serialize};

use super::schedule::DriveSchedule;
use crate::error::{arg, Error, Result};
use crate::linalg::{eigh, CMatrix, DensityMatrix, Operator, C64};
use crate::policy::NumericPolicy;
use crate::sampling::{pick, run_batched};
use crate::superselection::{energy_sectors, EnergySector};

/// `e^{-βh}/Z`.
pub fn thermal_state(h: &Operator, beta: f64) -> Result<DensityMatrix> {
    check_beta(beta, true)?;
    let spec = eigh(h)?;
    let e0 = spec.values[0];
    let z: f64 = spec.values.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    let m = spec.apply(|e| C64::new((-beta * (e - e0)).exp() / z, 0.0));
    Ok(DensityMatrix::from_raw(crate::linalg::hermitize(m), 1.0))
}

/// `ln tr e^{-βh}`.
pub fn log_partition(h: &Operator, beta: f64) -> Result<f64> {
    check_beta(beta, true)?;
    let spec = eigh(h)?;
    let e0 = spec.values[0];
    let s: f64 = spec.values.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    Ok(-beta * e0 + s.ln())
}

/// `ΔF = -(1/β)·ln(Z_f/Z_0)`.
pub fn delta_f(h_initial: &Operator, h_final: &Operator, beta: f64) -> Result<f64> {
    check_beta(beta, false)?;
    Ok((log_partition(h_initial, beta)? - log_partition(h_final, beta)?) / beta)
}

fn check_beta(beta: f64, allow_zero: bool) -> Result<()> {
    let ok = beta.is_finite() && (beta > 0.0 || (allow_zero && beta == 0.0));
    if ok {
        Ok(())
    } else {
        Err(arg(format!(
            "β must be {}, got {beta}",
            if allow_zero { "non-negative" } else { "positive" }
        )))
    }
}

/// One two-point-measurement record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkSample {
    pub initial_energy: f64,
    pub final_energy: f64,
    /// `final_energy - initial_energy`.
    pub work: f64,
    pub initial_outcome_index: usize,
    pub final_outcome_index: usize,
    pub stream_id: u64,
    pub draw_id: u64,
}

/// Sector data and transition probabilities of a schedule, computed once.
#[derive(Clone, Debug)]
pub struct TpmModel {
    pub initial_sectors: Vec<EnergySector>,
    pub final_sectors: Vec<EnergySector>,
    /// Gibbs population of each initial sector.
    pub initial_probabilities: Vec<f64>,
    /// `transitions[i][f] = tr[P_f·U·P_i·U†] / d_i`, rows normalized.
    pub transitions: Vec<Vec<f64>>,
    pub beta: f64,
}

impl TpmModel {
    pub fn new(schedule: &DriveSchedule, beta: f64) -> Result<Self> {
        check_beta(beta, true)?;
        let tol = NumericPolicy::DEFAULT.grouping_tol;
        let h0 = schedule.initial_hamiltonian()?;
        let hf = schedule.final_hamiltonian()?;
        let initial_sectors = energy_sectors(&h0, tol)?;
        let final_sectors = energy_sectors(&hf, tol)?;
        let u = schedule.total_propagator()?;
        let e0 = initial_sectors[0].energy;
        let weights: Vec<f64> = initial_sectors
            .iter()
            .map(|s| s.degeneracy as f64 * (-beta * (s.energy - e0)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        let initial_probabilities = weights.iter().map(|w| w / z).collect();
        let um = u.matrix();
        let transitions = initial_sectors
            .iter()
            .map(|si| {
                let moved: CMatrix = um * si.projector.matrix() * um.adjoint();
                let row: Vec<f64> = final_sectors
                    .iter()
                    .map(|sf| trace_product(sf.projector.matrix(), &moved).max(0.0))
                    .collect();
                // each row is a distribution; dividing by its sum instead of d_i
                // removes roundoff in the normalization
                let total: f64 = row.iter().sum();
                row.into_iter().map(|t| t / total).collect()
            })
            .collect();
        Ok(Self {
            initial_sectors,
            final_sectors,
            initial_probabilities,
            transitions,
            beta,
        })
    }

    /// Draws one record using two uniforms from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let i = pick(&self.initial_probabilities, rng.random::<f64>()).expect("Gibbs weights are positive");
        let f = pick(&self.transitions[i], rng.random::<f64>()).expect("rows sum to one");
        (i, f)
    }

    /// `Σ_{i,f} p_i·T_{if}·e^{-β(E_f - E_i)}`, divided by `Σ p_i` to drop
    /// normalization roundoff.
    pub fn exact_average(&self) -> f64 {
        let norm: f64 = self.initial_probabilities.iter().sum();
        let mut acc = 0.0;
        for (i, si) in self.initial_sectors.iter().enumerate() {
            for (f, sf) in self.final_sectors.iter().enumerate() {
                acc += self.initial_probabilities[i]
                    * self.transitions[i][f]
                    * (-self.beta * (sf.energy - si.energy)).exp();
            }
        }
        acc / norm
    }
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Monte Carlo TPM records, reproducible for a given seed at any thread count.
pub fn tpm_sample(
    schedule: &DriveSchedule,
    beta: f64,
    n_samples: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<WorkSample>> {
    if n_samples == 0 {
        return Err(arg("n_samples must be positive"));
    }
    let model = TpmModel::new(schedule, beta)?;
    run_batched(n_samples, seed, threads, |rng, id| {
        let (i, f) = model.draw(rng);
        let e_i = model.initial_sectors[i].energy;
        let e_f = model.final_sectors[f].energy;
        Ok(WorkSample {
            initial_energy: e_i,
            final_energy: e_f,
            work: e_f - e_i,
            initial_outcome_index: i,
            final_outcome_index: f,
            stream_id: id.stream_id,
            draw_id: id.draw_id,
        })
    })
}

/// TPM average of `e^{-βW}` by enumerating every (initial, final) sector pair.
pub fn jarzynski_exact(schedule: &DriveSchedule, beta: f64) -> Result<f64> {
    Ok(TpmModel::new(schedule, beta)?.exact_average())
}

/// `tr[U†·e^{-βH_f}·U·e^{βH_0}·ρ_0]` with `U` the product of step propagators.
pub fn jarzynski_operator_trace(schedule: &DriveSchedule, beta: f64) -> Result<f64> {
    check_beta(beta, true)?;
    let h0 = schedule.initial_hamiltonian()?;
    let hf = schedule.final_hamiltonian()?;
    let u = schedule.total_propagator()?;
    let rho0 = thermal_state(&h0, beta)?;
    let s0 = eigh(&h0)?;
    let sf = eigh(&hf)?;
    // shift both exponentials by E_0(min) to keep them bounded; the shifts cancel
    let e_ref = s0.values[0];
    let up = s0.apply(|e| C64::new((beta * (e - e_ref)).exp(), 0.0));
    let down = sf.apply(|e| C64::new((-beta * (e - e_ref)).exp(), 0.0));
    let um = u.matrix();
    let m = um.adjoint() * down * um * up * rho0.matrix();
    let tr: C64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
    if tr.im.abs() > NumericPolicy::DEFAULT.imaginary_residue_tol * tr.re.abs().max(1.0) {
        return Err(Error::NumericalConsistency(format!(
            "operator trace has imaginary part {:e}",
            tr.im
        )));
    }
    Ok(tr.re)
}
