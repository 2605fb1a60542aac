use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{arg, Error, Result};
use crate::linalg::{propagator, Operator};

/// A family of hermitian Hamiltonians indexed by a control value.
pub trait ControlHamiltonian: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn at(&self, lambda: f64) -> Result<Operator>;
}

/// `H(λ) = (1 - λ)·H₀ + λ·H₁`.
#[derive(Clone, Debug)]
pub struct LinearInterpolation {
    start: Operator,
    end: Operator,
}

impl LinearInterpolation {
    pub fn new(start: Operator, end: Operator) -> Result<Self> {
        if start.dim() != end.dim() {
            return Err(Error::DimensionMismatch {
                expected: start.dim(),
                found: end.dim(),
            });
        }
        start.require_hermitian("initial Hamiltonian")?;
        end.require_hermitian("final Hamiltonian")?;
        Ok(Self { start, end })
    }
}

impl ControlHamiltonian for LinearInterpolation {
    fn dim(&self) -> usize {
        self.start.dim()
    }

    fn at(&self, lambda: f64) -> Result<Operator> {
        if lambda == 0.0 {
            return Ok(self.start.clone());
        }
        if lambda == 1.0 {
            return Ok(self.end.clone());
        }
        self.start.scaled(1.0 - lambda).plus(&self.end.scaled(lambda))
    }
}

/// Control path `λ_{t_n}`, `t_n = n·t_f/N`, with piecewise-constant steps.
#[derive(Clone, Debug)]
pub struct DriveSchedule {
    hamiltonian: Arc<dyn ControlHamiltonian>,
    path: Vec<f64>,
    t_f: f64,
}

impl DriveSchedule {
    /// `path` holds `N + 1` control values.
    pub fn new(hamiltonian: Arc<dyn ControlHamiltonian>, path: Vec<f64>, t_f: f64) -> Result<Self> {
        if path.len() < 2 {
            return Err(arg("a schedule needs at least one step (N + 1 ≥ 2 path values)"));
        }
        if !(t_f >= 0.0 && t_f.is_finite()) {
            return Err(arg(format!("t_f must be non-negative, got {t_f}")));
        }
        if path.iter().any(|l| !l.is_finite()) {
            return Err(arg("control path must be finite"));
        }
        let s = Self { hamiltonian, path, t_f };
        for &l in &s.path {
            let h = s.hamiltonian.at(l)?;
            if h.dim() != s.dim() {
                return Err(arg(format!(
                    "H(λ = {l}) has dimension {} instead of {}",
                    h.dim(),
                    s.dim()
                )));
            }
            h.require_hermitian("scheduled Hamiltonian")?;
        }
        Ok(s)
    }

    /// `λ_{t_n} = n/N`.
    pub fn linear(hamiltonian: Arc<dyn ControlHamiltonian>, t_f: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(arg("N must be at least 1"));
        }
        let path = (0..=steps).map(|n| n as f64 / steps as f64).collect();
        Self::new(hamiltonian, path, t_f)
    }

    /// A time-independent Hamiltonian.
    pub fn constant(h: Operator, t_f: f64, steps: usize) -> Result<Self> {
        let ham = Arc::new(LinearInterpolation::new(h.clone(), h)?);
        Self::new(ham, vec![0.0; steps.max(1) + 1], t_f)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn steps(&self) -> usize {
        self.path.len() - 1
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn path(&self) -> &[f64] {
        &self.path
    }

    pub fn hamiltonian_at(&self, lambda: f64) -> Result<Operator> {
        self.hamiltonian.at(lambda)
    }

    pub fn initial_hamiltonian(&self) -> Result<Operator> {
        self.hamiltonian.at(self.path[0])
    }

    pub fn final_hamiltonian(&self) -> Result<Operator> {
        self.hamiltonian.at(self.path[self.steps()])
    }

    /// `U_n = exp(-i·H(λ_{t_n})·Δt)` for `n = 0..N`.
    pub fn step_propagators(&self) -> Result<Vec<Operator>> {
        let dt = self.t_f / self.steps() as f64;
        self.path[..self.steps()]
            .iter()
            .map(|&l| propagator(&self.hamiltonian.at(l)?, dt))
            .collect()
    }

    /// Time-ordered product `U_{N-1}···U_1·U_0`.
    pub fn total_propagator(&self) -> Result<Operator> {
        let mut u = Operator::identity(self.dim());
        for step in self.step_propagators()? {
            u = step.compose(&u)?;
        }
        Ok(u)
    }

    /// Same control, `N` replaced by `steps` along a linearly resampled path.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(arg("N must be at least 1"));
        }
        let old = self.steps() as f64;
        let path = (0..=steps)
            .map(|n| {
                let x = n as f64 / steps as f64 * old;
                let k = (x.floor() as usize).min(self.steps() - 1);
                let frac = x - k as f64;
                self.path[k] * (1.0 - frac) + self.path[k + 1] * frac
            })
            .collect();
        Self::new(self.hamiltonian.clone(), path, self.t_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn constant_schedule_propagator_matches_single_exponential() {
        let h = Operator::diagonal(&[0.0, 1.3]).unwrap();
        let s = DriveSchedule::constant(h.clone(), 2.0, 7).unwrap();
        let u = s.total_propagator().unwrap();
        let direct = propagator(&h, 2.0).unwrap();
        assert!(max_abs(&(u.matrix() - direct.matrix())) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Operator::diagonal(&[0.0, 1.0]).unwrap();
        let b = Operator::diagonal(&[0.0, 1.0, 2.0]).unwrap();
        assert!(LinearInterpolation::new(a, b).is_err());
    }

    #[test]
    fn resampled_path_keeps_endpoints() {
        let a = Operator::diagonal(&[0.0, 1.0]).unwrap();
        let b = Operator::diagonal(&[0.0, 2.0]).unwrap();
        let s = DriveSchedule::linear(Arc::new(LinearInterpolation::new(a, b).unwrap()), 1.0, 4).unwrap();
        let r = s.with_steps(10).unwrap();
        assert_eq!(r.path()[0], 0.0);
        assert_eq!(r.path()[10], 1.0);
        assert!((r.path()[5] - 0.5).abs() < 1e-15);
    }
}
