//! Exact rationals, p-adic valuations and residues modulo prime powers.

mod residue;
mod valuation;
mod valued;

pub use residue::{prime_power, rational_to_residue, Residue};
pub(crate) use residue::mul_mod;
pub use valuation::{
    ensure_odd_prime, format_rational, int, is_odd_prime, parse_rational, pow_p, rat, vp,
    vp_integer, Rational, Valuation,
};
pub use valued::{congruent, residual_against_lift, Congruence, LiftedResidual, ValuedNumber};
