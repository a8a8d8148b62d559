use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty Pauli string")]
    EmptyPauli,
    #[error("invalid Pauli character {ch:?} at index {index}")]
    InvalidPauliChar { index: usize, ch: char },
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("slot {slot} out of range for {n} qubits")]
    SlotOutOfRange { slot: usize, n: usize },
    #[error("two-qubit gate needs distinct slots, got {0} twice")]
    RepeatedSlot(usize),
    #[error("cannot parse gate line {line}: {reason}")]
    GateParse { line: usize, reason: String },
    #[error("cannot parse tableau: {0}")]
    TableauParse(String),
    #[error("tableau does not preserve the symplectic form")]
    NotSymplectic,
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("fidelity {0} outside [0, 1]")]
    FidelityRange(f64),
    #[error("cannot parse state literal {0:?}")]
    StateLiteral(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("success probability is zero, output state undefined")]
    ZeroSuccess,
    #[error("empty input list")]
    EmptyInputs,
    #[error("indeterminate 0/0 fidelity ratio")]
    Indeterminate,
    #[error("precondition not met: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
