//! Exact Dedekind sums and computational checks of the numerator conjecture
//! for normalized Dedekind sums with a fixed reduced denominator `q`.

pub mod coverage_search;
pub mod dedekind_core;
pub mod error;
pub mod exact_arith;
pub mod girstmair;

pub use error::{Error, Precondition, Result};
pub use exact_arith::{int, Fraction, Integer};
