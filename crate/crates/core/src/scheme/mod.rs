//! The five-step protocol on `S = (S0, A')` and `M = (ψ, A)`.
//!
//! I: S thermal, M ready. II: barrier ramp on S0. III: S0–A' coupling and
//! dephasing. IV: controlled shift copying the S0 sector into the meter ψ.
//! V: ψ–A coupling, dephasing, and M's reading of the meter. The experimenter
//! reads the energy of S before step II and after step V.

mod config;
mod model;
mod round_trip;
mod run;

pub use config::SchemeConfig;
pub use model::{
    controlled_shift, hopping, observable, step_iv_entangle, BarrierDrive, Scheme, A_PRIME, EXPERIMENTER, MEASURED_S,
    M_LABELS, POINTER, PSI, READER_M, S0, STEP_IV_TOL, S_LABELS,
};
pub use round_trip::{verify_round_trips, verify_round_trips_with, RoundTripReport, RoundTripStage, ROUND_TRIP_TOL};
pub use run::{
    run_scheme, run_scheme_with, work_distribution, SchemeOutput, SchemeRunRecord, SectorRecord, StageState,
    WorkComponents, WorkOutcome,
};
