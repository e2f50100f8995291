use thiserror::Error;

use crate::formula::Relation;
use crate::theory::AtomTheory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relation `{relation}` is not in the signature of {theory}")]
    Signature {
        relation: Relation,
        theory: AtomTheory,
    },

    /// The external solver failed, answered `unknown`, or printed something
    /// that is not a satisfiability verdict. Carries the solver's own output.
    #[error("SMT solver failure: {0}")]
    Solver(String),

    #[error("conditional on lists of different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("step bound of {0} exceeded")]
    StepBoundExceeded(usize),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
