//! Factor colorings of linearly recurrent words.
//!
//! [`word`] generates prefixes of fixed points, Sturmian and eventually
//! periodic words, [`returns`] computes return words and derived sequences,
//! [`coloring`] builds the level coloring and [`verifier`] runs the
//! finite-horizon checks.

pub mod cli;
pub mod coloring;
pub mod par;
pub mod report;
pub mod returns;
pub mod specfile;
pub mod verifier;
pub mod word;

pub use coloring::{
    build_context, Color, ColorId, ColoringContext, ColoringError, ConstantColoring, FactorColoring,
    FirstLetterColoring, FnColoring, RecurrenceConstant,
};
pub use par::Parallelism;
pub use returns::{
    estimate_k, lambda_morphism, prefix_return_system, return_system, KEstimate, ReturnError, ReturnSystem,
};
pub use specfile::{parse_spec, read_spec, SpecError, WordSpec};
pub use verifier::{check_theorem, CheckOptions, VerificationReport, VerifyError};
pub use word::{prefix, Alphabet, PrefixBuffer, Substitution, Symbol, WordError, WordSource};
