//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when validating, transforming, simulating,
/// or compiling circuits and Hamiltonians.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {qubit} used more than once in a single gate")]
    DuplicateQubit { qubit: usize },

    #[error("gate {kind} expects {expected} target(s), got {got}")]
    ArityMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("qubit mapping is not injective: {first} and {second} both map to {image}")]
    NonInjectiveMapping {
        first: usize,
        second: usize,
        image: usize,
    },

    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown gate mnemonic `{mnemonic}` on line {line}")]
    UnknownGate { mnemonic: String, line: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance too large: {what} is {got}, limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("state norm drifted to {norm}; amplitudes are corrupt")]
    NormDrift { norm: f64 },

    #[error("bounds do not separate: case-2 lower {lower} <= case-1 upper {upper}")]
    NoGap { lower: f64, upper: f64 },

    #[error("rotation angle {phi} outside (0, pi/4]")]
    PhiOutOfRange { phi: f64 },

    #[error("epsilon {epsilon} outside [0, 1/3]")]
    EpsilonOutOfRange { epsilon: f64 },

    #[error("promise gap {gap} below configured minimum {min}")]
    GapTooSmall { gap: f64, min: f64 },

    #[error("repetition count {r} must be odd")]
    EvenRepetition { r: usize },

    #[error("diagonal overlap magnitude {magnitude} too small for a phase")]
    VanishingOverlap { magnitude: f64 },

    #[error("cannot compile an empty circuit")]
    EmptyCircuit,

    #[error("matrix is not Hermitian (max deviation {deviation})")]
    NotHermitian { deviation: f64 },

    #[error("non-Hermitian action detected: imaginary energy {imaginary}")]
    NonHermitianDetected { imaginary: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
