//! Decimal-comparison domain vocabulary and the expert-elicited student
//! network generated from the expectation table.
//!
//! Every type-node CPT row is a binomial over the items of that type, with
//! per-item success probability `1 - pcm` where the experts expect High,
//! `pcm` where they expect Low, and 0.5 where they gave no expectation.

mod classes;
mod expert;
mod student;

pub use classes::{band_of, Band, ClassLabel, CoarseClass, Expectation, FineClass, Pcm, ValueScheme};
pub use expert::{binomial_pmf, ExpertModel, N_TYPES};
pub use student::{type_states, type_var, ClassPrior, StudentNet, CLASS_VAR, COARSE_VAR};
