//! Steane-type fault-tolerant state preparation for CSS codes.
//!
//! The crate synthesizes four CNOT circuits preparing the logical `|0>` of a
//! CSS code, checks that their fault sets are pairwise `t`-distinct so the
//! cross-verified protocol is strictly fault tolerant, and estimates logical
//! error and acceptance rates with a Pauli-frame simulator.
//!
//! Module layout, bottom up:
//!
//! - [`gf2`]: packed GF(2) vectors and matrices.
//! - [`code`]: CSS codes, logical operators, distance, built-in registry.
//! - [`circuit`]: preparation circuits and their text format.
//! - [`faults`]: fault-set construction and coset weight queries.
//! - [`ftcheck`]: `t`-distinctness and strict fault tolerance.
//! - [`synth`]: greedy and fault-set guided synthesis.
//! - [`protocol`]: the four-block verification gadget.
//! - [`sim`]: noise model, frame simulation, decoding, estimators.
//! - [`cli`]: the `ftsp` command line.

pub mod circuit;
pub mod cli;
pub mod code;
pub mod faults;
pub mod ftcheck;
pub mod gf2;
pub mod protocol;
pub mod sim;
pub mod synth;

pub use circuit::{Cnot, InitBasis, PrepCircuit};
pub use code::{Basis, CssCode};
pub use faults::{FaultSet, PauliError};
pub use gf2::{BitMatrix, BitVector};

/// Errors surfaced by library operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),

    #[error("unknown code '{name}'; available: {}", available.join(", "))]
    UnknownCode { name: String, available: Vec<String> },

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("synthesis of {stage} failed after {restarts} restarts ({backtracks} backtracks, longest partial circuit {best_gates} gates)")]
    SynthesisExhausted {
        stage: String,
        restarts: usize,
        backtracks: usize,
        best_gates: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
