use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the model, evaluators and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate problem")]
    DegenerateProblem,
    #[error("invalid payoff: {0}")]
    InvalidPayoff(f64),
    #[error("invalid probability: {0}")]
    InvalidProbability(f64),
    #[error("no stepwise marginal: quantum strategies only define joint exit behaviour")]
    NoStepwiseMarginal,
    #[error("bad index: intersection {index} with {destinations} destinations")]
    BadIndex { index: usize, destinations: usize },
    #[error("bad destination: {index} with {destinations} destinations")]
    BadDestination { index: usize, destinations: usize },
    #[error("strategy/problem mismatch: strategy has {strategy} steps, problem has {problem} intersections")]
    Mismatch { strategy: usize, problem: usize },
    #[error("duplicate term: |{0}>")]
    DuplicateTerm(String),
    #[error("ragged terms: |{found}> has length {}, expected {expected}", found.len())]
    RaggedTerms { found: String, expected: usize },
    #[error("bad basis string {0:?}: expected a non-empty string of 0 and 1")]
    BadBasisString(String),
    #[error("too many qubits: {0} (limit {max})", max = crate::quantum::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("invalid amplitude for |{0}>")]
    InvalidAmplitude(String),
    #[error("not normalized: norm {0}")]
    NotNormalized(f64),
    #[error("objective error: f({alpha}) = {value}")]
    Objective { alpha: f64, value: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(f64),
    #[error("no trials")]
    NoTrials,
    #[error("internal error: {0}")]
    Internal(String),
}
