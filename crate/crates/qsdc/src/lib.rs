//! Deterministic simulator for EPR-pair quantum secure direct communication
//! over a three-party network cell (server, sender, receiver).
//!
//! The crate provides:
//!
//! - [`state`]: an exact engine for labeled systems of up to four qubits —
//!   tensor products, unitaries, Z/X and Bell measurements, partial trace
//!   and von Neumann entropy;
//! - [`bell`]: the symbolic algebra of Bell labels and the four encoding
//!   operations, including the entanglement-swapping expansion tables;
//! - [`adversary`]: intercept-resend and ancilla-entangling channel
//!   attacks, a lying server, and the multi-photon probe model with its
//!   beam-splitter countermeasure;
//! - [`bidirectional`]: the seven-step session where both photon sequences
//!   return to the server, with decoy auditing and one-time-pad masking;
//! - [`swapping`]: the variant where encoded photons never return to the
//!   server, decoded through entanglement swapping;
//! - [`security`]: Holevo-bound leakage analysis of the ancilla attack and
//!   a detection/leakage sweep driver.
//!
//! Every run is a pure function of its configuration and seed: transcripts
//! rendered from two runs with identical inputs are byte-identical.

pub mod adversary;
pub mod bell;
pub mod bidirectional;
pub mod error;
pub mod linalg;
pub mod rng;
pub mod security;
pub mod state;
pub mod swapping;
pub mod transcript;

pub use adversary::{AttackModel, AttackTarget, BasisPolicy};
pub use bell::{BellIndex, PauliOp};
pub use bidirectional::{run_session, SessionConfig, Transcript};
pub use error::{Error, Result};
pub use rng::RandomStream;
pub use security::{attack_sweep, holevo_numeric, i0_closed_form, sweep_csv, PriorVector};
pub use state::{MeasurementBasis, QuantumState};
pub use swapping::{run_swap_session, setup_channel, SwapSessionConfig, SwapTranscript};
pub use transcript::{EfficiencyReport, Message};
