//! Rising factorials `(a)_n`, their p-divisible factors, and the three
//! rising-factorial ratio identities for `p ≡ 3 (mod 4)` and odd `r`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{
    ensure_odd_prime, format_rational, int, pow_p, rat, rational_to_residue, vp, Rational, Residue,
    Valuation,
};
use crate::padic_gamma::GammaContext;

fn product_of(lo: u64, hi: u64, f: &impl Fn(u64) -> BigInt) -> BigInt {
    match hi - lo {
        0 => BigInt::one(),
        1 => f(lo),
        len => {
            let mid = lo + len / 2;
            product_of(lo, mid, f) * product_of(mid, hi, f)
        }
    }
}

/// `(a)_n = a (a+1) ⋯ (a+n-1)`, with `(a)_0 = 1`.
pub fn rising(a: &Rational, n: u64) -> Rational {
    let (u, v) = (a.numer(), a.denom());
    let numer = product_of(0, n, &|i| u + v * BigInt::from(i));
    Rational::new(numer, num_traits::pow(v.clone(), n as usize))
}

/// `1/(1)_m`: `1/m!` for `m >= 0` and exactly zero for negative `m`.
pub fn reciprocal_rising_one(m: i64) -> Rational {
    if m < 0 {
        return Rational::zero();
    }
    Rational::new(BigInt::one(), product_of(1, m as u64 + 1, &BigInt::from))
}

/// Prefix cache of `(a)_0, (a)_1, …` for a fixed base, safe to share.
#[derive(Debug)]
pub struct RisingCache {
    base: Rational,
    prefixes: Mutex<Vec<Rational>>,
}

impl RisingCache {
    pub fn new(base: Rational) -> Self {
        Self { base, prefixes: Mutex::new(vec![Rational::one()]) }
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn get(&self, n: u64) -> Rational {
        let mut prefixes = self.prefixes.lock().expect("rising cache poisoned");
        while prefixes.len() as u64 <= n {
            let i = prefixes.len() as u64 - 1;
            let next = &prefixes[i as usize] * (&self.base + int(i as i64));
            prefixes.push(next);
        }
        prefixes[n as usize].clone()
    }
}

/// The p-divisible elements of `a, a+1, …, a+n-1` and their product.
#[derive(Clone, Debug, PartialEq)]
pub struct PFactorDecomposition {
    pub base: Rational,
    pub length: u64,
    pub p: u64,
    pub product: Rational,
    pub indices: Vec<u64>,
    /// `(a)_n = (-1)^n A Γ_p(a+n)/Γ_p(a)` holds modulo `p^M` after removing p-content.
    pub cofactor_check: bool,
}

fn ensure_p_integral(a: &Rational, p: u64) -> Result<()> {
    match vp(a, p) {
        Valuation::Finite(v) if v < 0 => Err(Error::NotPIntegral(format_rational(a))),
        _ => Ok(()),
    }
}

fn p_divisible_indices(a: &Rational, n: u64, p: u64) -> Vec<u64> {
    // vp(a + i) > 0  ⇔  p | (u + i v), since p ∤ v for p-integral a
    let (u, v) = (a.numer(), a.denom());
    let pb = BigInt::from(p);
    (0..n)
        .filter(|&i| (u + v * BigInt::from(i)) % &pb == BigInt::zero())
        .collect()
}

pub fn p_factor_decompose(a: &Rational, n: u64, ctx: &GammaContext) -> Result<PFactorDecomposition> {
    let p = ctx.p();
    ensure_p_integral(a, p)?;
    let indices = p_divisible_indices(a, n, p);
    let product = indices
        .iter()
        .fold(Rational::one(), |acc, &i| acc * (a + int(i as i64)));

    let full = rising(a, n);
    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
    let cofactor_check = if product.is_zero() {
        false
    } else {
        let unit_part = full / (sign * &product);
        match vp(&unit_part, p) {
            Valuation::Finite(0) => {
                let lhs = rational_to_residue(&unit_part, p, ctx.precision())?;
                let num = ctx.gamma_rational(&(a + int(n as i64)))?;
                let den = ctx.gamma_rational(a)?;
                lhs == num.checked_div(&den)?
            }
            _ => false,
        }
    };
    Ok(PFactorDecomposition {
        base: a.clone(),
        length: n,
        p,
        product,
        indices,
        cofactor_check,
    })
}

/// `(a)_n = p^{p_power} · deflated` with `deflated` a p-unit, found by scanning
/// the factors one at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct PPart {
    pub p_power: i64,
    pub deflated: Rational,
    pub indices: Vec<u64>,
}

pub fn f_p_extract(a: &Rational, n: u64, p: u64) -> Result<PPart> {
    ensure_p_integral(a, p)?;
    let indices = p_divisible_indices(a, n, p);
    let mut p_power = 0i64;
    for &i in &indices {
        match vp(&(a + int(i as i64)), p) {
            Valuation::Finite(v) => p_power += v,
            Valuation::Infinite => {
                return Err(Error::InvalidParameters(format!(
                    "({})_{n} contains the factor 0",
                    format_rational(a)
                )))
            }
        }
    }
    let deflated = rising(a, n) / pow_p(p, p_power);
    Ok(PPart { p_power, deflated, indices })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma23Identity {
    /// `(1/4)_{(p^r-3)/2} / (1/4)_{(p^{r-2}-3)/2}`.
    A,
    /// `(1)_{(p^r-3)/4} / (1)_{(p^{r-2}-3)/4}`.
    B,
    /// `(1/4)_{(p^r-3)/4} / (1/4)_{(p^{r-2}-3)/4}` with the printed middle
    /// gamma argument `p^{r-1}/2 + 1/2`.
    C,
    /// Same ratio as `C` with the middle argument `p^{r-1}/4 + 1/2`, which is
    /// where `(3/4)_{(p^{r-1}-1)/4}` actually ends.
    CProofDerived,
}

impl Lemma23Identity {
    pub const ALL: [Lemma23Identity; 4] = [Self::A, Self::B, Self::C, Self::CProofDerived];

    pub fn name(self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::CProofDerived => "c-proof-derived",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

/// Exact valuation comparison plus unit-part comparison modulo `p^M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub p: u64,
    pub r: u32,
    pub precision: u32,
    pub lhs: String,
    pub rhs: String,
    pub lhs_valuation: Valuation,
    pub rhs_valuation: Valuation,
    pub valuation_match: bool,
    /// Number of base-p digits (at most `precision`) on which the unit parts agree.
    pub unit_agreement: u32,
    pub unit_match: bool,
    pub pass: bool,
}

struct RatioIdentity {
    base: Rational,
    upper: u64,
    lower: u64,
    p_exp: i64,
    sign_exp: i64,
    gamma_num: Vec<Rational>,
    gamma_den: Vec<Rational>,
    cofactor: Rational,
    rhs_text: String,
}

pub(crate) fn ensure_three_mod_four_odd_r(p: u64, r: u32, min_r: u32) -> Result<()> {
    ensure_odd_prime(p)?;
    if p % 4 != 3 {
        return Err(Error::InvalidParameters(format!("p = {p} is not ≡ 3 (mod 4)")));
    }
    if r % 2 == 0 || r < min_r {
        return Err(Error::InvalidParameters(format!("r = {r} must be odd and >= {min_r}")));
    }
    Ok(())
}

fn ratio_identity(p: u64, r: u32, which: Lemma23Identity) -> Result<RatioIdentity> {
    let pw = |e: u32| -> Result<i64> {
        p.checked_pow(e)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or(Error::PrecisionTooLarge { p, precision: e })
    };
    let (pr, pr1, pr2) = (pw(r)?, pw(r - 1)?, pw(r - 2)?);
    let q = |n: i64, d: i64| rat(n, d);
    let identity = match which {
        Lemma23Identity::A => RatioIdentity {
            base: q(1, 4),
            upper: ((pr - 3) / 2) as u64,
            lower: ((pr2 - 3) / 2) as u64,
            p_exp: (pr1 + pr2) / 2,
            sign_exp: (pr + pr1 - 4) / 2,
            gamma_num: vec![q(2 * pr - 5, 4), q(2 * pr1 + 1, 4)],
            gamma_den: vec![q(1, 4), q(3, 4)],
            cofactor: q(2 * pr2 - 5, 4) * q(2 * pr2 - 1, 4),
            rhs_text: "p^((p^(r-1)+p^(r-2))/2) (-1)^((p^r+p^(r-1)-4)/2) Γ(p^r/2-5/4)/Γ(1/4) Γ(p^(r-1)/2+1/4)/Γ(3/4) (p^(r-2)/2-5/4)(p^(r-2)/2-1/4)".into(),
        },
        Lemma23Identity::B => RatioIdentity {
            base: int(1),
            upper: ((pr - 3) / 4) as u64,
            lower: ((pr2 - 3) / 4) as u64,
            p_exp: (pr1 + pr2 - 4) / 4,
            sign_exp: (pr + pr1 - 4) / 4,
            gamma_num: vec![q(pr + 1, 4), q(pr1 + 3, 4)],
            gamma_den: vec![],
            cofactor: int(1),
            rhs_text: "p^((p^(r-1)+p^(r-2)-4)/4) (-1)^((p^r+p^(r-1)-4)/4) Γ((p^r+1)/4) Γ((p^(r-1)+3)/4)".into(),
        },
        Lemma23Identity::C | Lemma23Identity::CProofDerived => {
            let (middle, text) = if which == Lemma23Identity::C {
                (q(pr1 + 1, 2), "Γ(p^(r-1)/2+1/2)")
            } else {
                (q(pr1 + 2, 4), "Γ(p^(r-1)/4+1/2)")
            };
            RatioIdentity {
                base: q(1, 4),
                upper: ((pr - 3) / 4) as u64,
                lower: ((pr2 - 3) / 4) as u64,
                p_exp: (pr1 + pr2) / 4,
                sign_exp: (pr + pr1 - 4) / 4,
                gamma_num: vec![q(pr - 2, 4), middle],
                gamma_den: vec![q(1, 4), q(3, 4)],
                cofactor: q(pr2 - 2, 4),
                rhs_text: format!(
                    "p^((p^(r-1)+p^(r-2))/4) (-1)^((p^r+p^(r-1)-4)/4) Γ(p^r/4-1/2)/Γ(1/4) {text}/Γ(3/4) (p^(r-2)/4-1/2)"
                ),
            }
        }
    };
    Ok(identity)
}

/// Checks one ratio identity at `(p, r)`: valuations exactly, unit parts mod `p^M`
/// (default `M = r + 2`). A failing identity is reported, never raised.
pub fn check_lemma23(p: u64, r: u32, which: Lemma23Identity, precision: Option<u32>) -> Result<IdentityReport> {
    ensure_three_mod_four_odd_r(p, r, 3)?;
    let m = precision.unwrap_or(r + 2);
    let ctx = GammaContext::new(p, m)?;
    let id = ratio_identity(p, r, which)?;

    let lhs = rising(&id.base, id.upper) / rising(&id.base, id.lower);
    let lhs_valuation = vp(&lhs, p);
    let cof_valuation = vp(&id.cofactor, p);
    let rhs_valuation = Valuation::Finite(id.p_exp) + cof_valuation;

    let unit_of = |q: &Rational, v: Valuation| -> Result<Residue> {
        let v = v.finite().ok_or_else(|| Error::InvalidParameters("zero side".into()))?;
        rational_to_residue(&(q / pow_p(p, v)), p, m)
    };
    let lhs_unit = unit_of(&lhs, lhs_valuation)?;
    let mut rhs_unit = unit_of(&id.cofactor, cof_valuation)?;
    rhs_unit = rhs_unit.checked_mul(&rhs_unit.sign(id.sign_exp))?;
    for (g, inverse) in ctx
        .gamma_rational_many(&id.gamma_num)?
        .into_iter()
        .map(|g| (g, false))
        .chain(ctx.gamma_rational_many(&id.gamma_den)?.into_iter().map(|g| (g, true)))
    {
        let g = if inverse { g.inverse()? } else { g };
        rhs_unit = rhs_unit.checked_mul(&g)?;
    }

    let diff = lhs_unit.checked_sub(&rhs_unit)?;
    let unit_agreement = if diff.is_zero() {
        m
    } else {
        diff.digits().iter().take_while(|&&d| d == 0).count() as u32
    };
    let valuation_match = lhs_valuation == rhs_valuation;
    let unit_match = unit_agreement == m;
    Ok(IdentityReport {
        name: format!("lemma23-{}", which.name()),
        p,
        r,
        precision: m,
        lhs: format!("({})_{} / ({})_{}", format_rational(&id.base), id.upper, format_rational(&id.base), id.lower),
        rhs: id.rhs_text,
        lhs_valuation,
        rhs_valuation,
        valuation_match,
        unit_agreement,
        unit_match,
        pass: valuation_match && unit_match,
    })
}
