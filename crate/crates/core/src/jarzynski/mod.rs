//! Two-point-measurement work statistics and the Jarzynski equality.
//!
//! Two exact evaluators exist. [`jarzynski_exact`] sums over every pair of
//! initial and final energy sectors; [`jarzynski_operator_trace`] multiplies the
//! step propagators into a single operator trace. Both equal `Z_f/Z_0` for any
//! unitary, so their agreement and the gap to `e^{-βΔF}` are at roundoff level.

mod report;
mod scenarios;
mod schedule;
mod tpm;

pub use report::{
    jarzynski_equality_check, mean_and_standard_error, modified_jarzynski_check, modified_jarzynski_check_per_run,
    work_values, JarzynskiReport,
};
pub use scenarios::{sigma_x, sigma_z, Scenario, ScenarioParams};
pub use schedule::{ControlHamiltonian, DriveSchedule, LinearInterpolation};
pub use tpm::{
    delta_f, jarzynski_exact, jarzynski_operator_trace, log_partition, thermal_state, tpm_sample, TpmModel, WorkSample,
};
