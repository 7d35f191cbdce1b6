//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, operator application and protocol
/// runs. The `AbortAt*` variants are successful eavesdropping detections,
/// not failures; [`Error::is_detection`] distinguishes them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two subsystems with the same name in one state.
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    /// A target label that does not exist in the state.
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    /// Two-qubit operation addressed to one qubit twice.
    #[error("identical target labels `{0}`")]
    IdenticalTargets(String),

    /// Operator matrix is not unitary at the required tolerance.
    #[error("matrix is not unitary (max residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// Matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian (max residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    /// Density matrix trace differs from one.
    #[error("density matrix trace deviates from 1 by {residual:.3e}")]
    TraceNotOne { residual: f64 },

    /// Density matrix has an eigenvalue below the round-off floor.
    #[error("density matrix eigenvalue {value:.3e} below tolerance")]
    NegativeEigenvalue { value: f64 },

    /// A stored amplitude is NaN or infinite.
    #[error("non-finite amplitude in quantum state")]
    NonFiniteAmplitude,

    /// State vector norm differs from one.
    #[error("state vector norm deviates from 1 by {residual:.3e}")]
    NormNotOne { residual: f64 },

    /// Composite dimension would exceed the engine cap of 16 (4 qubits).
    #[error("composite dimension {requested} exceeds the 4-qubit cap of 16")]
    DimensionCap { requested: usize },

    /// Operator or amplitude-vector dimension does not match its targets.
    #[error("dimension {dim} does not match {targets} target qubit(s)")]
    OperatorShape { dim: usize, targets: usize },

    /// Keep set for a partial trace is empty.
    #[error("partial trace must keep at least one subsystem")]
    EmptyKeepSet,

    /// Numeric parameter outside its admissible interval.
    #[error("parameter `{name}` = {value} outside [{lo}, {hi}]")]
    ParamRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Integer parameter violating a count constraint.
    #[error("parameter `{name}` = {value}: {requirement}")]
    ParamCount {
        name: &'static str,
        value: i64,
        requirement: &'static str,
    },

    /// A character that is not a hex digit in a message string.
    #[error("invalid hex digit `{0}` in message")]
    InvalidHexDigit(char),

    /// Session configuration leaves no room for message pairs.
    #[error("config leaves no message pairs: N={n_pairs}, samples={n_samples}, decoys={k_decoys}")]
    NoMessageCapacity {
        n_pairs: usize,
        n_samples: usize,
        k_decoys: usize,
    },

    /// Message does not fit the session capacity.
    #[error("message of {got} bits exceeds capacity of {capacity} bits")]
    CapacityMismatch { capacity: usize, got: usize },

    /// No same-basis comparisons (or too few surviving pairs) for the
    /// error-rate estimate.
    #[error("insufficient samples for the error-rate estimate")]
    InsufficientSamples,

    /// Step-3 basis check failed: correlation error rate above threshold.
    #[error(
        "aborted at sample check: error rate {rate:.6} over {compared} compared samples exceeds threshold {threshold:.6}"
    )]
    AbortAtSampleCheck {
        compared: usize,
        errors: usize,
        rate: f64,
        threshold: f64,
    },

    /// Step-3 beam-splitter check failed: multi-photon signals detected.
    #[error(
        "aborted at sample check: multi-photon signals (both-click rate {rate:.6} over {checked} splitter signals exceeds threshold {threshold:.6})"
    )]
    AbortAtTrojanCheck {
        checked: usize,
        both_clicks: usize,
        rate: f64,
        threshold: f64,
    },

    /// Step-7 decoy verification failed: announcement mismatches above
    /// threshold.
    #[error(
        "aborted at verification: mismatch rate {rate:.6} over {checked} decoys exceeds threshold {threshold:.6}"
    )]
    AbortAtVerification {
        checked: usize,
        mismatches: usize,
        rate: f64,
        threshold: f64,
    },
}

impl Error {
    /// True for protocol aborts that represent a successful detection of
    /// tampering (as opposed to usage or numeric errors).
    pub fn is_detection(&self) -> bool {
        matches!(
            self,
            Error::AbortAtSampleCheck { .. }
                | Error::AbortAtTrojanCheck { .. }
                | Error::AbortAtVerification { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
