//! Numerical tolerances shared across the crate.

/// Amplitudes, probabilities, norms and traces.
pub const AMPLITUDE_TOL: f64 = 1e-10;

/// Von Neumann entropies.
pub const ENTROPY_TOL: f64 = 1e-9;

/// Outcomes with probability at or below this are dropped from outcome tables.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Amplitudes at or below this magnitude are not stored in sparse states.
pub const PRUNE: f64 = 1e-15;

/// Default cap on the number of basis states enumerated by the verifiers.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;
