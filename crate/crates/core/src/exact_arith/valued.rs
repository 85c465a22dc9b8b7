use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::residue::{rational_to_residue, Residue};
use super::valuation::{pow_p, vp, Rational, Valuation};
use crate::error::{Error, Result};

/// `p^valuation * unit`, with the unit known modulo `p^precision`.
/// The exact zero carries an infinite valuation and a zero unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedNumber {
    valuation: Valuation,
    unit: Residue,
}

impl ValuedNumber {
    pub fn new(valuation: i64, unit: Residue) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::InvalidParameters(format!("{unit} is not a unit")));
        }
        Ok(Self { valuation: Valuation::Finite(valuation), unit })
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Ok(Self { valuation: Valuation::Infinite, unit: Residue::zero(p, precision)? })
    }

    pub fn from_rational(q: &Rational, p: u64, precision: u32) -> Result<Self> {
        match vp(q, p) {
            Valuation::Infinite => Self::zero(p, precision),
            Valuation::Finite(v) => {
                let unit = rational_to_residue(&(q / pow_p(p, v)), p, precision)?;
                Self::new(v, unit)
            }
        }
    }

    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    pub fn unit(&self) -> Residue {
        self.unit
    }

    pub fn p(&self) -> u64 {
        self.unit.p()
    }

    pub fn precision(&self) -> u32 {
        self.unit.precision()
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_infinite()
    }

    /// Absolute p-adic precision of the representation: `v + M`, infinite for exact zero.
    pub fn absolute_precision(&self) -> Valuation {
        match self.valuation {
            Valuation::Finite(v) => Valuation::Finite(v + self.precision() as i64),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn checked_mul(&self, other: &ValuedNumber) -> Result<ValuedNumber> {
        let unit = self.unit.checked_mul(&other.unit)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self { valuation: Valuation::Infinite, unit: unit.with_value(0) });
        }
        Ok(Self { valuation: self.valuation + other.valuation, unit })
    }

    pub fn inverse(&self) -> Result<ValuedNumber> {
        match self.valuation {
            Valuation::Infinite => Err(Error::NonInvertible {
                value: 0,
                p: self.p(),
                precision: self.precision(),
            }),
            Valuation::Finite(v) => Self::new(-v, self.unit.inverse()?),
        }
    }

    /// Reassembles the rational `p^v * u` from the canonical unit representative.
    pub fn lift(&self) -> Rational {
        match self.valuation {
            Valuation::Infinite => Rational::zero(),
            Valuation::Finite(v) => pow_p(self.p(), v) * Rational::from_integer(self.unit.to_bigint()),
        }
    }
}

impl fmt::Display for ValuedNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation {
            Valuation::Infinite => write!(f, "0"),
            Valuation::Finite(v) => write!(f, "{}^{} * ({})", self.p(), v, self.unit),
        }
    }
}

/// Outcome of a congruence test: whether `vp(a - b) >= r`, and the actual
/// valuation of the difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    pub holds: bool,
    pub residual: Valuation,
}

/// `a ≡ b (mod p^r)` decided through the valuation of `a - b`, so it is total
/// even when either side is not p-integral.
pub fn congruent(a: &Rational, b: &Rational, p: u64, r: i64) -> Congruence {
    let residual = vp(&(a - b), p);
    Congruence { holds: residual.at_least(r), residual }
}

/// Residual valuation of `lhs - rhs` when either side is only known to a
/// finite absolute precision (`v + M` for a lifted residue, infinite when exact).
/// If the observed valuation reaches the precision cap, the cap is reported and
/// `exact` is false: the true residual is at least that value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedResidual {
    pub residual: Valuation,
    pub exact: bool,
}

pub fn residual_against_lift(
    lhs: &Rational,
    lhs_precision: Valuation,
    rhs: &Rational,
    rhs_precision: Valuation,
    p: u64,
) -> LiftedResidual {
    let raw = vp(&(lhs - rhs), p);
    let cap = lhs_precision.min(rhs_precision);
    if raw >= cap && !cap.is_infinite() {
        LiftedResidual { residual: cap, exact: false }
    } else {
        LiftedResidual { residual: raw, exact: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::valuation::{int, rat};

    #[test]
    fn valued_examples() {
        let x = ValuedNumber::from_rational(&rat(9, 4), 3, 3).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(2));
        assert_eq!(x.unit().value(), 7);
        let one = ValuedNumber::from_rational(&int(1), 5, 4).unwrap();
        assert_eq!((one.valuation(), one.unit().value()), (Valuation::Finite(0), 1));
        let ninth = ValuedNumber::from_rational(&rat(1, 9), 3, 2).unwrap();
        assert_eq!((ninth.valuation(), ninth.unit().value()), (Valuation::Finite(-2), 1));
        let z = ValuedNumber::from_rational(&int(0), 3, 2).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.lift(), int(0));
    }

    #[test]
    fn product_and_inverse() {
        let a = ValuedNumber::from_rational(&rat(18, 5), 3, 4).unwrap();
        let b = ValuedNumber::from_rational(&rat(7, 27), 3, 4).unwrap();
        let ab = a.checked_mul(&b).unwrap();
        assert_eq!(ab, ValuedNumber::from_rational(&rat(18 * 7, 5 * 27), 3, 4).unwrap());
        let inv = a.inverse().unwrap();
        assert_eq!(inv, ValuedNumber::from_rational(&rat(5, 18), 3, 4).unwrap());
        assert!(ValuedNumber::zero(3, 4).unwrap().inverse().is_err());
    }

    #[test]
    fn congruence_examples() {
        let c = congruent(&rat(30285, 32768), &int(9), 3, 4);
        assert!(c.holds);
        let same = congruent(&rat(2, 7), &rat(2, 7), 5, 100);
        assert_eq!(same, Congruence { holds: true, residual: Valuation::Infinite });
        let off = congruent(&int(1), &int(1 + 7), 7, 2);
        assert_eq!(off, Congruence { holds: false, residual: Valuation::Finite(1) });
        // not p-integral on one side: false, never an error
        let neg = congruent(&rat(1, 3), &int(0), 3, 1);
        assert_eq!(neg.residual, Valuation::Finite(-1));
        assert!(!neg.holds);
    }

    #[test]
    fn lifted_residual_caps_at_precision() {
        let lhs = rat(1, 2);
        let lifted = ValuedNumber::from_rational(&lhs, 3, 2).unwrap();
        let r = residual_against_lift(&lhs, Valuation::Infinite, &lifted.lift(), lifted.absolute_precision(), 3);
        assert_eq!(r, LiftedResidual { residual: Valuation::Finite(2), exact: false });
        let r = residual_against_lift(&lhs, Valuation::Infinite, &int(2), Valuation::Finite(5), 3);
        assert_eq!(r, LiftedResidual { residual: Valuation::Finite(1), exact: true });
        let r = residual_against_lift(&lhs, Valuation::Infinite, &lhs, Valuation::Infinite, 3);
        assert_eq!(r, LiftedResidual { residual: Valuation::Infinite, exact: true });
    }
}
