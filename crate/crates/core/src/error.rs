use thiserror::Error;

use crate::econ::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid economy: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("no allocation supplied for agent {0}")]
    MissingAgent(usize),

    #[error("regime mismatch: operation needs {expected}, economy is in {found}")]
    RegimeMismatch { expected: String, found: String },

    /// Classification found no cell. The regimes partition the admissible set,
    /// so this is a bug rather than a property of the input.
    #[error("no regime matched an admissible economy")]
    NoRegime,

    #[error("root bracket failed: {0}")]
    Bracket(String),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("not solvable: {0}")]
    Insolvable(String),

    #[error("perturbation leaves the admissible set: {0}")]
    InvalidPerturbation(String),

    #[error("condition fails at t = {period}: {reason}")]
    Condition { period: usize, reason: String },

    #[error("no constructor applies ({} hypotheses rejected)", .0.len())]
    NoConstructor(Vec<(String, String)>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
