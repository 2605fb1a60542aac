//! Pointer coupling, non-selective measurement, event reading, and the entropy
//! bookkeeping that goes with it.

mod entropy;
mod event;
mod ledger;
mod pointer;
mod trigger;

pub use entropy::{
    generalized_relative_entropy, redefine_system, truncate_direct, truncate_statistical, work_event_reading,
    Truncation,
};
pub use event::{
    branching, collapse, event_read, event_read_with, nonselective_measure, outcome_probabilities, Branching,
    EventOutcome,
};
pub(crate) use event::{cause_for, read};
pub use ledger::{EntropyCause, EntropyLedger, LedgerEntry};
pub use pointer::{entangle_pointer, von_neumann_hamiltonian, PointerModel};
pub use trigger::{phase_equivalence_trigger, trigger_state, PhaseDisplacement};
