use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse rational {0:?}: expected \"p/q\" with q != 0")]
pub struct ParseRatioError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance:\n{0}")]
    InvalidInstance(ValidationReport),

    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),

    #[error("{0:?} is not a certificate")]
    NotACertificate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no prover exists: in-class datapoint {0:?} has no adjacent certificate")]
    NoProver(String),

    #[error("invalid prover assignment: {0}")]
    InvalidProver(String),

    #[error("invalid verifier: {0}")]
    InvalidVerifier(String),

    #[error("undefined precision: certificate set has an empty neighbourhood")]
    UndefinedPrecision,

    #[error("undefined verifier precision: accepted certificates have an empty neighbourhood")]
    UndefinedVerifierPrecision,

    #[error("precision formula undefined: 1 - eps_c + eps_s is zero")]
    FormulaUndefined,

    #[error("kappa undefined for this (certificate, set): {0}")]
    KappaUndefined(String),

    #[error("AFC undefined: no certificate set touches both classes")]
    AfcUndefined,

    #[error("{what} needs enumeration over {size} items, budget is {budget}{hint}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        budget: usize,
        hint: &'static str,
    },

    #[error("infeasible: no prover/verifier pair satisfies the constraints")]
    Infeasible,

    #[error("solution does not match the reduction artifact: {0}")]
    ArtifactMismatch(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, size: usize, budget: usize) -> Self {
        Error::BudgetExceeded {
            what,
            size,
            budget,
            hint: "",
        }
    }
}
