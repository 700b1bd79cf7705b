//! Coverage searches over `Γ_q`, the seed constructions for the
//! arithmetic-progression argument, and brute-force numerator enumeration.

pub mod checkpoint;
mod enumerate;
mod search;
mod seed;
mod tracker;

pub use enumerate::enumerate_numerators;
pub use search::{
    run_search, search_full_family, search_single_family, verify_conjecture, ConjectureReport,
    SearchConfig, SearchReport,
};
pub use seed::{construct_seed, progression_gcd, verify_arithmetic_progression_coverage};
pub use tracker::{signed_at, signed_order, CoverageTracker, Family, Witness};
