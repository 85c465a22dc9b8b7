//! Truncated sums `S_d(m)` and the registry of congruence claims about them.

mod claims;
mod series;

pub use claims::{
    modulus_exponent, truncation_index, verify_claim, ClaimId, ClaimKind, ClaimReport, SumPath,
    VerifyOptions, EXACT_LIMIT,
};
pub use series::{archimedean_sanity, sum_s, sum_s_general, sum_s_modular, ArchimedeanReport};
