use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{rat, rational_to_residue, Rational, Residue, ValuedNumber};

/// `S(m) = Σ_{n=0}^{m} (-1)^n (8n+1) (1/4)_n^3 / n!^3`.
pub fn sum_s(m: u64) -> Rational {
    sum_general_unchecked(4, m)
}

/// `S_d(m) = Σ_{n=0}^{m} (-1)^n (2dn+1) (1/d)_n^3 / n!^3`.
pub fn sum_s_general(d: u64, m: u64) -> Result<Rational> {
    if d < 2 {
        return Err(Error::InvalidParameters(format!("d = {d} must be >= 2")));
    }
    Ok(sum_general_unchecked(d, m))
}

// Term n is (-1)^n (2dn+1) U_n / D_n with U_n = ∏_{i<=n} (di-d+1)^3 and
// D_n = ∏_{i<=n} (di)^3, so the partial numerators over D_n satisfy
// N_n = N_{n-1} (dn)^3 + (-1)^n (2dn+1) U_n. One reduction at the end.
fn sum_general_unchecked(d: u64, m: u64) -> Rational {
    let mut numer = BigInt::one();
    let mut denom = BigInt::one();
    let mut u = BigInt::one();
    for n in 1..=m {
        let a = BigInt::from(d * n - d + 1);
        let b = BigInt::from(d * n);
        u *= &a * &a * &a;
        let b3 = &b * &b * &b;
        numer *= &b3;
        denom *= &b3;
        let t = BigInt::from(2 * d * n + 1) * &u;
        if n % 2 == 0 {
            numer += t;
        } else {
            numer -= t;
        }
    }
    Rational::new(numer, denom)
}

fn split(x: u64, p: u64) -> (i64, u64) {
    let (mut x, mut v) = (x, 0);
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// `S_d(m)` as `p^v · u` with `u` known modulo `p^M`, from valuation-tracked
/// terms summed at working precision `2M`.
pub fn sum_s_modular(d: u64, m: u64, p: u64, precision: u32) -> Result<ValuedNumber> {
    if d < 2 {
        return Err(Error::InvalidParameters(format!("d = {d} must be >= 2")));
    }
    let work = precision.checked_mul(2).ok_or(Error::PrecisionTooLarge { p, precision })?;
    let zero = Residue::zero(p, work)?;
    let modulus = zero.modulus();
    let unit = |x: u64| rational_to_residue(&rat(x as i64, 1), p, work);

    // (valuation, unit) of |term_n|; the sign is applied when summing
    let mut terms: Vec<(i64, Residue)> = Vec::with_capacity(m as usize + 1);
    let mut v = 0i64;
    let mut acc = Residue::one(p, work)?;
    terms.push((0, acc));
    for n in 1..=m {
        let (va, ua) = split(d * n - d + 1, p);
        let (vb, ub) = split(d * n, p);
        v += 3 * (va - vb);
        let ratio = unit(ua)?.checked_div(&unit(ub)?)?;
        acc = acc.checked_mul(&ratio.pow(3))?;
        let (vc, uc) = split(2 * d * n + 1, p);
        terms.push((v + vc, acc.checked_mul(&unit(uc)?)?));
    }
    let vmin = terms.iter().map(|t| t.0).min().expect("at least one term");
    let mut total = zero;
    for (n, (vn, un)) in terms.iter().enumerate() {
        let shift = (vn - vmin) as u64;
        if shift >= work as u64 {
            continue;
        }
        let scaled = un.checked_mul(&zero.with_value(p.pow(shift as u32) % modulus))?;
        total = if n % 2 == 0 { total.checked_add(&scaled)? } else { total.checked_sub(&scaled)? };
    }
    if total.is_zero() {
        return Err(Error::PrecisionLoss { lost: work, available: precision });
    }
    let (lost, rest) = split(total.value(), p);
    if lost as u32 > work - precision {
        return Err(Error::PrecisionLoss { lost: lost as u32, available: work - precision });
    }
    // total = p^lost · rest with rest known mod p^{work - lost} >= p^M
    let unit = Residue::new(p, precision, rest as i128)?;
    ValuedNumber::new(vmin + lost, unit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchimedeanReport {
    pub m: u64,
    pub value: f64,
    pub target: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Floating-point `S(m)` against `2√2/π`. A convergence sanity check for the
/// series, not a p-adic statement; only the error envelope is meaningful.
pub fn archimedean_sanity(m: u64, tolerance: f64) -> ArchimedeanReport {
    let mut term = 1.0f64;
    let mut value = 1.0f64;
    for n in 1..=m {
        let ratio = (n as f64 - 0.75) / n as f64;
        term *= -ratio * ratio * ratio;
        value += (8.0 * n as f64 + 1.0) * term;
    }
    let target = 2.0 * std::f64::consts::SQRT_2 / std::f64::consts::PI;
    let error = (value - target).abs();
    ArchimedeanReport { m, value, target, error, tolerance, pass: error < tolerance }
}
