//! Exhaustive finite-horizon checks: monotone monochromatic factorizations,
//! Ramsey-style tails, the prepend constructions and the audit of the
//! linear-recurrence consequences the coloring relies on.

mod audit;
mod factorization;
pub mod oracle;
mod ramsey;
mod theorem;

use thiserror::Error;

use crate::returns::ReturnError;

pub use audit::{audit_recurrence, AuditRecord, BandViolation, CountViolation, PowerWitness};
pub use factorization::{enumerate_monotone, Factorization, MonotoneCompositions};
pub use ramsey::{
    check_example_prepend, find_ramsey_tail, find_strongly_mono_prefix, prepend_power, verify_strongly_monochromatic,
    RamseyTail,
};
pub use theorem::{check_theorem, CheckOptions, Counterexample, SearchStrategy, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("position {requested} is beyond the colorable horizon {available}")]
    OutOfRange { requested: usize, available: usize },
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("buffer has {available} symbols, {needed} needed")]
    BufferTooShort { needed: usize, available: usize },
    #[error("word does not start with the requested power of u")]
    NotAPrependedWord,
    #[error("internal check failed: {0}")]
    InvalidResult(String),
    #[error(transparent)]
    Return(#[from] ReturnError),
}
