use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register size {0} outside supported range 1..=26")]
    Capacity(usize),
    #[error("qubit {qubit} out of range for {n_qubits}-qubit state")]
    TargetOutOfRange { qubit: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("gate {kind} expects {expected} targets, got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("controlled-phase angle {0} outside (-pi, pi]")]
    AngleOutOfRange(f64),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("reset of qubit {0}: both outcome probabilities are below threshold")]
    CorruptedState(usize),
    #[error("branch cap {cap} exceeded while simulating {context}")]
    BranchCap { cap: usize, context: String },
    #[error("syndrome must have 3 or 4 bits, got {0}")]
    SyndromeLength(usize),
    #[error("state left the code space after recovery (stabilizer expectation {0})")]
    UncorrectableResidual(f64),
    #[error("ambiguous logical classification between {0} and {1}")]
    AmbiguousClassification(String, String),
    #[error("conditioning on at least {k_min} faults has probability {probability:e}")]
    InfeasibleConditioning { k_min: usize, probability: f64 },
    #[error("invalid noise parameter: {0}")]
    InvalidNoise(String),
    #[error("unknown gadget `{0}`")]
    UnknownGadget(String),
    #[error("inconsistent gadget options: {0}")]
    InconsistentOptions(String),
    #[error("fault configuration does not match circuit: {0}")]
    ConfigMismatch(String),
    #[error("no analytic coefficient for gadget `{gadget}` label `{label}`")]
    UnknownCoefficient { gadget: String, label: String },
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),
    #[error("break-even model denominator is not positive ({0})")]
    NonPositiveDenominator(f64),
    #[error("invalid sampling request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
