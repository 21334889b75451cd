use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible box.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    Range {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The channel is not completely positive (`mu2^2 > mu1`).
    #[error("not completely positive: mu2^2 = {mu2_sq} exceeds mu1 = {mu1}")]
    CompletePositivity { mu1: f64, mu2_sq: f64 },

    /// A closed-form expression was evaluated outside the branch it was derived for.
    #[error("domain error: {0}")]
    Domain(String),

    /// Probe too large for the dense density-matrix path.
    #[error("probe of {n} qubits exceeds the oracle cap of {cap}")]
    Size { n: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Threshold search bracket does not separate the two predicate values.
    #[error("predicate is {value} at both ends of [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, value: bool },

    /// A ratio against the separable baseline is undefined because `mu2 = 0`.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid probe: {0}")]
    Probe(String),
}

pub type Result<T> = std::result::Result<T, Error>;
