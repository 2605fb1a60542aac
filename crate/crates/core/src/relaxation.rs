//! One-time relaxation of the surviving statistical weight `ρ(t)` and its
//! entropy production `σ = -ln ρ`.
//!
//! Three descriptions share a uniform grid over `[0, horizon]` with `dt`
//! always included as a grid point. The instantaneous kick is applied at `dt`,
//! so plateau values do not depend on the step count.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Description {
    /// Conventional ensemble: `ρ = 1 - θ(t - dt)`.
    Direct,
    /// Enlarged ensemble: `ρ = exp(-θ(t - dt))`.
    Statistical,
    /// `ρ = exp(-t/dt)` up to `dt`, then frozen.
    PoissonCutoff,
}

impl Description {
    pub const ALL: [Description; 3] = [
        Description::Direct,
        Description::Statistical,
        Description::PoissonCutoff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Description::Direct => "direct",
            Description::Statistical => "statistical",
            Description::PoissonCutoff => "poisson",
        }
    }
}

impl std::str::FromStr for Description {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Description::Direct),
            "statistical" => Ok(Description::Statistical),
            "poisson" | "poisson_cutoff" => Ok(Description::PoissonCutoff),
            other => Err(arg(format!("unknown description '{other}'"))),
        }
    }
}

/// Integrator for the Poisson segment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonIntegrator {
    /// Multiplies by the exact step factor; exact at every grid point.
    #[default]
    ExactFactor,
    /// `ρ ← ρ·(1 - h/dt)`, first order in the step.
    Euler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTrajectory {
    pub description: Description,
    pub dt: f64,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RelaxationTrajectory {
    /// Grid index of `dt`.
    pub fn dt_index(&self) -> usize {
        self.index_of(self.dt).expect("dt is always on the grid")
    }

    /// Index of an exact grid time.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|x| *x == t)
    }

    pub fn weight_at(&self, t: f64) -> Option<f64> {
        self.index_of(t).map(|k| self.weights[k])
    }

    /// `(ρ just before dt, ρ(dt))`.
    pub fn kick(&self) -> (f64, f64) {
        let k = self.dt_index();
        (self.weights[k - 1], self.weights[k])
    }
}

fn grid(dt: f64, horizon: f64, steps: usize) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(arg(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(arg(format!("horizon {horizon} must be at least dt = {dt}")));
    }
    if steps == 0 {
        return Err(arg("steps must be positive"));
    }
    let mut t: Vec<f64> = (0..=steps).map(|k| horizon * k as f64 / steps as f64).collect();
    if !t.contains(&dt) {
        let at = t.partition_point(|x| *x < dt);
        t.insert(at, dt);
    }
    Ok(t)
}

fn step_profile(dt: f64, horizon: f64, steps: usize, after: f64, d: Description) -> Result<RelaxationTrajectory> {
    let times = grid(dt, horizon, steps)?;
    let weights = times.iter().map(|&t| if t < dt { 1.0 } else { after }).collect();
    Ok(RelaxationTrajectory {
        description: d,
        dt,
        times,
        weights,
    })
}

pub fn simulate_direct(dt: f64, horizon: f64, steps: usize) -> Result<RelaxationTrajectory> {
    step_profile(dt, horizon, steps, 0.0, Description::Direct)
}

pub fn simulate_statistical(dt: f64, horizon: f64, steps: usize) -> Result<RelaxationTrajectory> {
    step_profile(dt, horizon, steps, (-1.0f64).exp(), Description::Statistical)
}

pub fn simulate_poisson_cutoff(dt: f64, horizon: f64, steps: usize) -> Result<RelaxationTrajectory> {
    simulate_poisson_with(dt, horizon, steps, PoissonIntegrator::ExactFactor)
}

pub fn simulate_poisson_with(
    dt: f64,
    horizon: f64,
    steps: usize,
    integrator: PoissonIntegrator,
) -> Result<RelaxationTrajectory> {
    let times = grid(dt, horizon, steps)?;
    let mut weights = Vec::with_capacity(times.len());
    weights.push(1.0);
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let prev = weights[k - 1];
        let next = if t0 >= dt {
            prev
        } else {
            match integrator {
                // closed form at each node, so ρ(dt) = e^{-1} exactly
                PoissonIntegrator::ExactFactor => (-t1 / dt).exp(),
                // dt is a grid point, so h ≤ dt and the factor stays ≥ 0
                PoissonIntegrator::Euler => prev * (1.0 - (t1 - t0) / dt),
            }
        };
        weights.push(next);
    }
    Ok(RelaxationTrajectory {
        description: Description::PoissonCutoff,
        dt,
        times,
        weights,
    })
}

pub fn simulate(d: Description, dt: f64, horizon: f64, steps: usize) -> Result<RelaxationTrajectory> {
    match d {
        Description::Direct => simulate_direct(dt, horizon, steps),
        Description::Statistical => simulate_statistical(dt, horizon, steps),
        Description::PoissonCutoff => simulate_poisson_cutoff(dt, horizon, steps),
    }
}

/// `σ(t) = -ln ρ(t)`; `ρ = 0` maps to `+∞`.
pub fn entropy_of_weight(trajectory: &RelaxationTrajectory) -> Vec<f64> {
    trajectory
        .weights
        .iter()
        .map(|&r| if r > 0.0 { 0.0 - r.ln() } else { f64::INFINITY })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dt_inserted_when_off_grid() {
        let t = simulate_statistical(0.3, 1.0, 4).unwrap();
        assert!(t.index_of(0.3).is_some());
        assert_eq!(t.times.len(), 6);
    }

    #[test]
    fn kick_values() {
        let s = simulate_statistical(1.0, 3.0, 30).unwrap();
        assert_eq!(s.kick(), (1.0, (-1.0f64).exp()));
        let d = simulate_direct(1.0, 3.0, 30).unwrap();
        assert_eq!(d.kick(), (1.0, 0.0));
        assert_eq!(*d.weights.last().unwrap(), 0.0);
        let sig = entropy_of_weight(&d);
        assert_eq!(sig[0], 0.0);
        assert_eq!(*sig.last().unwrap(), f64::INFINITY);
    }

    #[test]
    fn euler_is_first_order() {
        let err = |steps| {
            let t = simulate_poisson_with(1.0, 1.0, steps, PoissonIntegrator::Euler).unwrap();
            t.times
                .iter()
                .zip(&t.weights)
                .map(|(x, r)| (r - (-x).exp()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(100) / err(200);
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn parse_names() {
        for d in Description::ALL {
            assert_eq!(d.name().parse::<Description>().unwrap(), d);
        }
        assert!("fast".parse::<Description>().is_err());
    }
}
