use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::valuation::{ensure_odd_prime, mod_u64, vp, Rational, Valuation};
use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 62;

/// `p^precision`, if it stays inside the supported residue range.
pub fn prime_power(p: u64, precision: u32) -> Result<u64> {
    let too_large = || Error::PrecisionTooLarge { p, precision };
    let m = p.checked_pow(precision).ok_or_else(too_large)?;
    if m > MAX_MODULUS {
        return Err(too_large());
    }
    Ok(m)
}

/// An integer class modulo `p^precision`, stored by its least non-negative
/// representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    p: u64,
    precision: u32,
    modulus: u64,
    value: u64,
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub(crate) fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

impl Residue {
    pub fn new(p: u64, precision: u32, value: i128) -> Result<Self> {
        ensure_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::InvalidParameters("precision must be positive".into()));
        }
        let modulus = prime_power(p, precision)?;
        Ok(Self::from_parts(p, precision, modulus, value.rem_euclid(modulus as i128) as u64))
    }

    pub(crate) fn from_parts(p: u64, precision: u32, modulus: u64, value: u64) -> Self {
        debug_assert!(value < modulus);
        Self { p, precision, modulus, value }
    }

    pub fn from_bigint(p: u64, precision: u32, n: &BigInt) -> Result<Self> {
        let base = Self::new(p, precision, 0)?;
        Ok(base.with_value(mod_u64(n, base.modulus)))
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 0)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.p != 0
    }

    /// Same ring, different representative (reduced).
    pub(crate) fn with_value(&self, value: u64) -> Self {
        Self { value: value % self.modulus, ..*self }
    }

    fn check_same_ring(&self, other: &Residue) -> Result<()> {
        if self.p != other.p || self.precision != other.precision {
            return Err(Error::MismatchedModulus(self.p, self.precision, other.p, other.precision));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Residue) -> Result<Residue> {
        self.check_same_ring(other)?;
        let s = (self.value as u128 + other.value as u128) % self.modulus as u128;
        Ok(self.with_value(s as u64))
    }

    pub fn checked_sub(&self, other: &Residue) -> Result<Residue> {
        self.check_same_ring(other)?;
        Ok(self.with_value((self.value + self.modulus - other.value) % self.modulus))
    }

    pub fn checked_mul(&self, other: &Residue) -> Result<Residue> {
        self.check_same_ring(other)?;
        Ok(self.with_value(mul_mod(self.value, other.value, self.modulus)))
    }

    pub fn checked_div(&self, other: &Residue) -> Result<Residue> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn neg(&self) -> Residue {
        self.with_value((self.modulus - self.value) % self.modulus)
    }

    pub fn inverse(&self) -> Result<Residue> {
        let non_invertible = || Error::NonInvertible {
            value: self.value,
            p: self.p,
            precision: self.precision,
        };
        if !self.is_unit() {
            return Err(non_invertible());
        }
        inverse_mod(self.value, self.modulus)
            .map(|v| self.with_value(v))
            .ok_or_else(non_invertible)
    }

    pub fn pow(&self, mut exp: u64) -> Residue {
        let mut base = self.value;
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base, self.modulus);
            }
            base = mul_mod(base, base, self.modulus);
            exp >>= 1;
        }
        self.with_value(acc)
    }

    /// `(-1)^exp` in this ring.
    pub fn sign(&self, exp: i64) -> Residue {
        if exp.rem_euclid(2) == 0 {
            self.with_value(1)
        } else {
            self.with_value(self.modulus - 1)
        }
    }

    /// Residue of the same value at a lower precision.
    pub fn reduce(&self, precision: u32) -> Result<Residue> {
        if precision > self.precision || precision == 0 {
            return Err(Error::InvalidParameters(format!(
                "cannot reduce precision {} to {precision}",
                self.precision
            )));
        }
        let modulus = prime_power(self.p, precision)?;
        Ok(Self::from_parts(self.p, precision, modulus, self.value % modulus))
    }

    /// Little-endian base-p digits, exactly `precision` of them.
    pub fn digits(&self) -> Vec<u64> {
        let mut v = self.value;
        (0..self.precision)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.precision)
    }
}

/// `a * b^-1 mod p^M` for `q = a/b` in lowest terms.
pub fn rational_to_residue(q: &Rational, p: u64, precision: u32) -> Result<Residue> {
    let zero = Residue::zero(p, precision)?;
    if q.is_zero() {
        return Ok(zero);
    }
    if let Valuation::Finite(v) = vp(q, p) {
        if v < 0 {
            return Err(Error::NegativeValuation(q.to_string()));
        }
    }
    let m = zero.modulus();
    let numer = zero.with_value(mod_u64(q.numer(), m));
    let denom = zero.with_value(mod_u64(q.denom(), m));
    numer.checked_div(&denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::valuation::{int, rat};

    #[test]
    fn rational_reduction_examples() {
        assert_eq!(rational_to_residue(&rat(1, 4), 7, 1).unwrap().value(), 2);
        assert_eq!(rational_to_residue(&int(1), 11, 3).unwrap().value(), 1);
        assert!(matches!(
            rational_to_residue(&rat(1, 3), 3, 2),
            Err(Error::NegativeValuation(_))
        ));
        assert_eq!(rational_to_residue(&int(-1), 5, 2).unwrap().value(), 24);
    }

    #[test]
    fn ring_examples() {
        let a = Residue::new(3, 4, 3).unwrap();
        let b = Residue::new(3, 4, 27).unwrap();
        assert_eq!(a.checked_mul(&b).unwrap().value(), 0);
        assert_eq!(Residue::new(3, 4, 44).unwrap().inverse().unwrap().value(), 35);
        let x = Residue::new(5, 3, 77).unwrap();
        assert_eq!(x.checked_add(&Residue::zero(5, 3).unwrap()).unwrap(), x);
    }

    #[test]
    fn ring_errors() {
        let a = Residue::new(3, 4, 3).unwrap();
        let b = Residue::new(3, 3, 1).unwrap();
        let c = Residue::new(5, 4, 1).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::MismatchedModulus(..))));
        assert!(matches!(a.checked_mul(&c), Err(Error::MismatchedModulus(..))));
        assert!(matches!(a.inverse(), Err(Error::NonInvertible { .. })));
        assert!(matches!(Residue::new(9, 2, 1), Err(Error::NotOddPrime(9))));
        assert!(matches!(Residue::new(3, 60, 1), Err(Error::PrecisionTooLarge { .. })));
    }

    #[test]
    fn digits_are_little_endian() {
        let x = Residue::new(7, 3, 342).unwrap();
        assert_eq!(x.digits(), vec![6, 6, 6]);
        let y = Residue::new(3, 4, 5).unwrap();
        assert_eq!(y.digits(), vec![2, 1, 0, 0]);
    }

    #[test]
    fn pow_and_sign() {
        let x = Residue::new(5, 2, 2).unwrap();
        assert_eq!(x.pow(10).value(), 1024 % 25);
        assert_eq!(x.sign(3).value(), 24);
        assert_eq!(x.sign(-2).value(), 1);
    }

    #[test]
    fn inverse_brute_force() {
        for p in [3u64, 5, 7] {
            let m = prime_power(p, 3).unwrap();
            for v in (1..m).filter(|v| v % p != 0) {
                let inv = Residue::new(p, 3, v as i128).unwrap().inverse().unwrap();
                assert_eq!(v * inv.value() % m, 1);
            }
        }
    }
}
