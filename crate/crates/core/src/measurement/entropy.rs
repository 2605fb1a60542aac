use crate::error::{arg, Error, Result};
use crate::linalg::{eigh, CMatrix, DensityMatrix, Operator, C64};
use crate::policy::NumericPolicy;

/// `(e^{-σ}·ρ, e^{σ}·O)` for every observable `O`.
///
/// Expectation values are unchanged: `tr[e^{σ}O · e^{-σ}ρ] = tr[O·ρ]`.
pub fn redefine_system(
    rho: &DensityMatrix,
    observables: &[Operator],
    sigma: f64,
) -> Result<(DensityMatrix, Vec<Operator>)> {
    if !sigma.is_finite() {
        return Err(arg(format!("σ must be finite, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok((rho.clone(), observables.to_vec()));
    }
    let up = sigma.exp();
    let down = (-sigma).exp();
    Ok((rho.scaled(down)?, observables.iter().map(|o| o.scaled(up)).collect()))
}

/// `tr[ρ ln ρ - ρ ln ρ*]` in nats. Either argument may carry any trace weight,
/// so the value can be negative.
///
/// Fails with a domain error when ρ has weight on the kernel of ρ*.
pub fn generalized_relative_entropy(rho: &DensityMatrix, rho_star: &DensityMatrix) -> Result<f64> {
    if rho.dim() != rho_star.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: rho_star.dim(),
        });
    }
    let tol = NumericPolicy::DEFAULT.support_tol;
    let own = eigh(&Operator::new(rho.matrix().clone())?)?;
    let self_term: f64 = own.values.iter().filter(|l| **l > 0.0).map(|l| l * l.ln()).sum();

    let other = eigh(&Operator::new(rho_star.matrix().clone())?)?;
    let mut cross = 0.0;
    for (j, &mu) in other.values.iter().enumerate() {
        let w = other.vectors.column(j);
        let overlap = (w.adjoint() * rho.matrix() * w)[(0, 0)].re;
        if mu <= tol {
            if overlap > tol {
                return Err(Error::Domain(format!(
                    "support of ρ is not inside the support of ρ* (eigenvalue {mu:e}, weight {overlap:e})"
                )));
            }
            continue;
        }
        cross += overlap * mu.ln();
    }
    Ok(self_term - cross)
}

/// `k_B·T·σ` with `k_B = 1`.
pub fn work_event_reading(temperature: f64, sigma: f64) -> Result<f64> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(arg(format!("temperature must be positive, got {temperature}")));
    }
    Ok(temperature * sigma)
}

/// Output of a truncated (non-trace-preserving) channel.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub retained: CMatrix,
    pub retained_weight: f64,
    /// Input weight minus retained weight.
    pub trace_deficit: f64,
}

/// Direct description: nothing of the input survives.
pub fn truncate_direct(rho: &DensityMatrix) -> Truncation {
    let n = rho.dim();
    Truncation {
        retained: CMatrix::zeros(n, n),
        retained_weight: 0.0,
        trace_deficit: rho.trace_weight(),
    }
}

/// Statistical description with the feeding term dropped: weight `e^{-1}` survives.
pub fn truncate_statistical(rho: &DensityMatrix) -> Truncation {
    let keep = (-1.0f64).exp();
    let w = rho.trace_weight();
    Truncation {
        retained: rho.matrix() * C64::new(keep, 0.0),
        retained_weight: w * keep,
        trace_deficit: w - w * keep,
    }
}
