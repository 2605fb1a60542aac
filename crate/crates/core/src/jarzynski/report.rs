use serde::{Deserialize, Serialize};

use super::tpm::WorkSample;
use crate::error::{arg, Result};

/// Estimator summary for `⟨e^{-βW + σ_total}⟩` against `e^{-βΔF}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JarzynskiReport {
    pub estimator_mean: f64,
    pub standard_error: f64,
    pub exact_value: f64,
    pub delta_f: f64,
    pub sample_count: usize,
    pub beta: f64,
    /// 0 for the original equality.
    pub sigma_total: f64,
    pub mean_work: f64,
    pub work_standard_error: f64,
    /// `|mean - e^{-βΔF}| ≤ 3·standard_error`.
    pub passed: bool,
    /// `exp(mean x) ≤ mean exp(x)` for `x = -βW + σ_total`.
    pub jensen_holds: bool,
    /// `⟨W⟩ ≥ ΔF + σ_total/β`, allowing 3 standard errors of the work mean.
    pub inequality_holds: bool,
}

/// Mean and standard error (sample standard deviation with `n - 1`).
pub fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn work_values(samples: &[WorkSample]) -> Vec<f64> {
    samples.iter().map(|s| s.work).collect()
}

/// Original equality: `⟨e^{-βW}⟩` against `e^{-βΔF}`.
pub fn jarzynski_equality_check(works: &[f64], beta: f64, delta_f: f64) -> Result<JarzynskiReport> {
    modified_jarzynski_check(works, beta, delta_f, 0.0)
}

/// Modified equality: `⟨e^{-β𝒲 + σ_total}⟩` against `e^{-βΔF}`, with the
/// inequality `⟨𝒲⟩ ≥ ΔF + σ_total·k_BT`.
pub fn modified_jarzynski_check(works: &[f64], beta: f64, delta_f: f64, sigma_total: f64) -> Result<JarzynskiReport> {
    modified_jarzynski_check_per_run(works, &vec![sigma_total; works.len()], beta, delta_f)
}

/// Modified equality with a separate `σ` for every run. The report carries the
/// mean `σ`, which also enters the inequality.
pub fn modified_jarzynski_check_per_run(
    works: &[f64],
    sigmas: &[f64],
    beta: f64,
    delta_f: f64,
) -> Result<JarzynskiReport> {
    if works.is_empty() {
        return Err(arg("no work samples"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(arg(format!("β must be positive, got {beta}")));
    }
    if sigmas.len() != works.len() {
        return Err(arg(format!("{} works but {} sigmas", works.len(), sigmas.len())));
    }
    let exponents: Vec<f64> = works.iter().zip(sigmas).map(|(w, s)| -beta * w + s).collect();
    let (sigma_total, _) = mean_and_standard_error(sigmas);
    let weights: Vec<f64> = exponents.iter().map(|x| x.exp()).collect();
    let (estimator_mean, standard_error) = mean_and_standard_error(&weights);
    let (mean_work, work_standard_error) = mean_and_standard_error(works);
    let (mean_exponent, _) = mean_and_standard_error(&exponents);
    let exact_value = (-beta * delta_f).exp();
    // roundoff floor so that zero-variance sample sets compare sensibly
    let floor = 1e-12 * exact_value.max(1.0);
    let passed = (estimator_mean - exact_value).abs() <= 3.0 * standard_error + floor;
    let jensen_holds = mean_exponent.exp() <= estimator_mean * (1.0 + 1e-12);
    let inequality_holds = mean_work + 3.0 * work_standard_error + floor >= delta_f + sigma_total / beta;
    Ok(JarzynskiReport {
        estimator_mean,
        standard_error,
        exact_value,
        delta_f,
        sample_count: works.len(),
        beta,
        sigma_total,
        mean_work,
        work_standard_error,
        passed,
        jensen_holds,
        inequality_holds,
    })
}
