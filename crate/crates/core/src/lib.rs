//! Exact verification of Ramanujan-type supercongruences.
//!
//! The crate evaluates the truncated series
//! `S_d(m) = Σ_{n=0}^{m} (-1)^n (2dn+1) (1/d)_n^3 / n!^3` exactly, evaluates the
//! Morita p-adic gamma function modulo prime powers, checks a Wilf–Zeilberger
//! pair for that series, and decides each registered congruence by the p-adic
//! valuation of `lhs - rhs`.

pub mod error;
pub mod exact_arith;
pub mod padic_gamma;
pub mod pochhammer;
pub mod supercongruence;
pub mod wz;
pub mod harness;

pub use error::{Error, Result};
pub use exact_arith::{Rational, Residue, Valuation, ValuedNumber};
