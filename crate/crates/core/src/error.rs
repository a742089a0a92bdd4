use thiserror::Error;

use crate::behavior::ValidityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario needs at least {min} settings per party, got {got}")]
    TooFewSettings { min: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("scenario mismatch: expected N={expected}, got N={got}")]
    ScenarioMismatch { expected: usize, got: usize },

    #[error("behavior violates positivity: {0}")]
    Invalid(ValidityReport),

    #[error("convex weights must be non-negative and sum to 1")]
    BadWeights,

    #[error(
        "recipe undefined: joint coefficient {value} at ({alice}, {bob}) is not in {{-1, 0, 1}}"
    )]
    RecipeUndefined {
        alice: usize,
        bob: usize,
        value: i64,
    },

    #[error("machine input {input} out of range for a {n_inputs}-input machine")]
    InputOutOfRange { input: usize, n_inputs: usize },

    #[error("enumeration at N={n} exceeds the cap of {cap}; raise the cap explicitly")]
    CapExceeded { n: usize, cap: usize },

    #[error("violation counts differ inside class {class}: {detail}")]
    InconsistentClass { class: String, detail: String },

    #[error("lemma check found {count} counterexample(s) at N={n}")]
    Lemma1Counterexample { n: usize, count: usize },

    #[error("vertex could not be assigned to a class: {0}")]
    Unclassified(String),

    #[error("quantum input not normalized: {0}")]
    NotNormalized(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
