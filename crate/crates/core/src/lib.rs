//! Finite state-vector simulation of particles on a circle, built to track
//! total angular momentum through preparation and measurement outcome by
//! outcome.
//!
//! * [`lattice`] and [`state`]: wavefunctions on a cyclic momentum lattice
//!   and sparse joint states of labeled subsystems.
//! * [`density`]: partial traces, fidelities, entanglement entropies.
//! * [`representations`]: angle representation and the frame-relative
//!   factorization of prepared states.
//! * [`interactions`]: shift-prepare, pointer coupling and swap, plus
//!   exhaustive unitarity and conservation verifiers.
//! * [`measurement`]: outcome tables and seeded Born-rule sampling.
//! * [`conservation`]: per-outcome ledgers, the grand-preparer chain report
//!   and its closed-form oracle.
//! * [`scenario`] and [`report`]: declarative scenarios and their JSON/CSV
//!   reports, as used by the `angmom` binary.

pub mod conservation;
pub mod density;
pub mod error;
pub mod interactions;
pub mod lattice;
pub mod measurement;
pub mod report;
pub mod representations;
pub mod scenario;
pub mod state;
pub mod tolerance;

pub use num_complex;

pub use conservation::{
    branch_mean_offsets, build_ledger, chain_report, meter_untouched_check, table1_oracle, BranchOffsets,
    ChainReport, ConservationLedger, LedgerEntry, MeterCheck, Table1,
};
pub use density::{entanglement_entropy, fidelity_to, reduced_density, DensityOperator};
pub use error::{Error, Result};
pub use interactions::{
    pointer_couple, shift_prepare, swap_states, verify_conserves_total_l, verify_unitary, BasisAction,
    InteractionKind, WrapPolicy,
};
pub use lattice::{ModeWavefunction, Window};
pub use measurement::{outcome_table, sample_outcome, OutcomeRecord};
pub use representations::{
    frame_factorization_residual, joint_angle_amplitudes, to_angle, to_momentum, AngleWavefunction,
};
pub use state::{CompositeState, Distribution, SubsystemLabel};
