use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::schedule::{DriveSchedule, LinearInterpolation};
use crate::error::{arg, Result};
use crate::linalg::{CMatrix, Operator, C64};

/// Named single-qubit drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `H = diag(0, ε)` throughout.
    Constant,
    /// `diag(0, ε) → diag(0, 2ε)`.
    CommutingQuench,
    /// `H(λ) = (1-λ)(ε/2)σ_z + λ(ε'/2)σ_x`.
    DrivenQubit,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Constant => "constant",
            Scenario::CommutingQuench => "commuting-quench",
            Scenario::DrivenQubit => "driven-qubit",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Scenario::Constant),
            "commuting-quench" => Ok(Scenario::CommutingQuench),
            "driven-qubit" => Ok(Scenario::DrivenQubit),
            other => Err(arg(format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub t_f: f64,
    pub steps: usize,
    pub beta: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            epsilon_prime: 2.0,
            t_f: 1.0,
            steps: 400,
            beta: 1.0,
        }
    }
}

pub fn sigma_x() -> Operator {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    Operator::hermitian(CMatrix::from_row_slice(2, 2, &[z, o, o, z])).expect("hermitian")
}

pub fn sigma_z() -> Operator {
    Operator::diagonal(&[1.0, -1.0]).expect("nonempty")
}

impl Scenario {
    pub fn schedule(self, p: &ScenarioParams) -> Result<DriveSchedule> {
        let e = p.epsilon;
        match self {
            Scenario::Constant => DriveSchedule::constant(Operator::diagonal(&[0.0, e])?, p.t_f, p.steps),
            Scenario::CommutingQuench => DriveSchedule::linear(
                Arc::new(LinearInterpolation::new(
                    Operator::diagonal(&[0.0, e])?,
                    Operator::diagonal(&[0.0, 2.0 * e])?,
                )?),
                p.t_f,
                p.steps,
            ),
            Scenario::DrivenQubit => DriveSchedule::linear(
                Arc::new(LinearInterpolation::new(
                    sigma_z().scaled(e / 2.0),
                    sigma_x().scaled(p.epsilon_prime / 2.0),
                )?),
                p.t_f,
                p.steps,
            ),
        }
    }
}
