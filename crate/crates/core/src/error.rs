use crate::state::SubsystemLabel;

/// Errors raised by state construction, interactions and scenario runs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("lattice dimension must be positive, got {0}")]
    NonPositiveDim(i64),

    #[error("all amplitudes are zero; cannot normalize")]
    ZeroState,

    #[error("duplicate subsystem label {0}")]
    DuplicateLabel(SubsystemLabel),

    #[error("subsystem {0} is not present in the state")]
    UnknownLabel(SubsystemLabel),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("empty scope")]
    EmptyScope,

    #[error("{label} is not in the |0> fiducial state (P(0) = {p0})")]
    NotFiducial { label: SubsystemLabel, p0: f64 },

    #[error("momentum shift wrapped around the lattice of size {dim} ({detail})")]
    Wrap { dim: usize, detail: String },

    #[error("pointer overflow: meter dim {meter_dim} < source dim {source_dim}")]
    PointerOverflow { meter_dim: usize, source_dim: usize },

    #[error("{0} must be a meter label")]
    NotAMeter(SubsystemLabel),

    #[error("{0} is a meter label and carries no angular momentum lattice")]
    MeterNotAllowed(SubsystemLabel),

    #[error("state must be supported on exactly {expected:?}, found {found:?}")]
    ExtraLabels {
        expected: Vec<SubsystemLabel>,
        found: Vec<SubsystemLabel>,
    },

    #[error("enumeration of {size} basis states exceeds the cap of {cap}")]
    EnumerationCap { size: usize, cap: usize },

    #[error("outcome {value} of {label} has zero probability")]
    ZeroProbability { label: SubsystemLabel, value: i64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
