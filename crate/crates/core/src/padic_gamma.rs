//! Morita's p-adic gamma function modulo `p^M`.
//!
//! On positive integers `Γ_p(n) = (-1)^n ∏_{0<j<n, p∤j} j`. Because the
//! product of the units in any window of `p^M` consecutive integers is
//! `≡ -1 (mod p^M)` for odd `p`, `Γ_p(n + p^M) ≡ Γ_p(n) (mod p^M)`; a
//! p-integral rational `x` is therefore evaluated at its representative
//! `n ∈ [1, p^M]` with `n ≡ x (mod p^M)`, at full precision `M`.

use std::collections::BTreeMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{
    ensure_odd_prime, format_rational, mul_mod, prime_power, rational_to_residue, vp, Rational,
    Residue, Valuation,
};

/// Moduli up to this size get a full prefix-product table on first use.
const TABLE_LIMIT: u64 = 1 << 22;

/// Γ_p at a fixed prime and precision, with a thread-safe cache of unit
/// prefix products `P(n) = ∏_{0<j<n, p∤j} j mod p^M`.
#[derive(Debug)]
pub struct GammaContext {
    p: u64,
    precision: u32,
    modulus: u64,
    table: OnceLock<Vec<u64>>,
    memo: RwLock<BTreeMap<u64, u64>>,
}

impl GammaContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        ensure_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::InvalidParameters("precision must be positive".into()));
        }
        let modulus = prime_power(p, precision)?;
        let mut memo = BTreeMap::new();
        memo.insert(1, 1 % modulus);
        Ok(Self { p, precision, modulus, table: OnceLock::new(), memo: RwLock::new(memo) })
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

    fn residue(&self, value: u64) -> Residue {
        Residue::from_parts(self.p, self.precision, self.modulus, value)
    }

    fn signed(&self, n: u64, prefix: u64) -> Residue {
        let r = self.residue(prefix);
        if n % 2 == 0 {
            r
        } else {
            r.neg()
        }
    }

    fn prefix_table(&self) -> &[u64] {
        self.table.get_or_init(|| {
            let (p, m) = (self.p, self.modulus);
            let mut table = Vec::with_capacity(m as usize + 1);
            table.push(1 % m);
            table.push(1 % m);
            let mut acc = 1 % m;
            for j in 1..m {
                if j % p != 0 {
                    acc = mul_mod(acc, j, m);
                }
                table.push(acc);
            }
            table
        })
    }

    /// `P(n)`, continuing from the closest cached prefix below `n`.
    fn prefix(&self, n: u64) -> u64 {
        if self.modulus <= TABLE_LIMIT {
            return self.prefix_table()[n as usize];
        }
        let (start, mut acc) = {
            let memo = self.memo.read().expect("gamma memo poisoned");
            let (&k, &v) = memo.range(..=n).next_back().expect("memo holds P(1)");
            (k, v)
        };
        if start == n {
            return acc;
        }
        for j in start..n {
            if j % self.p != 0 {
                acc = mul_mod(acc, j, self.modulus);
            }
        }
        self.memo.write().expect("gamma memo poisoned").insert(n, acc);
        acc
    }

    /// Γ_p(n) mod p^M for `1 <= n <= p^M`.
    pub fn gamma_int(&self, n: u64) -> Result<Residue> {
        if n == 0 || n > self.modulus {
            return Err(Error::OutOfRange { n, bound: self.modulus });
        }
        Ok(self.signed(n, self.prefix(n)))
    }

    /// Γ_p at many integer arguments in one increasing pass.
    pub fn gamma_int_many(&self, ns: &[u64]) -> Result<Vec<Residue>> {
        let mut order: Vec<usize> = (0..ns.len()).collect();
        order.sort_by_key(|&i| ns[i]);
        let mut out = vec![self.residue(0); ns.len()];
        for i in order {
            out[i] = self.gamma_int(ns[i])?;
        }
        Ok(out)
    }

    /// The representative `n ∈ [1, p^M]` of a p-integral rational.
    pub fn representative(&self, x: &Rational) -> Result<u64> {
        let r = rational_to_residue(x, self.p, self.precision)
            .map_err(|_| Error::NotPIntegral(format_rational(x)))?;
        Ok(if r.value() == 0 { self.modulus } else { r.value() })
    }

    pub fn gamma_rational(&self, x: &Rational) -> Result<Residue> {
        self.gamma_int(self.representative(x)?)
    }

    pub fn gamma_rational_many(&self, xs: &[Rational]) -> Result<Vec<Residue>> {
        let ns = xs.iter().map(|x| self.representative(x)).collect::<Result<Vec<_>>>()?;
        self.gamma_int_many(&ns)
    }
}

/// Γ_p(n) mod p^M straight from the defining product, for any `n >= 1`.
pub fn gamma_int_direct(p: u64, precision: u32, n: u64) -> Result<Residue> {
    if n == 0 {
        return Err(Error::OutOfRange { n, bound: u64::MAX });
    }
    let zero = Residue::zero(p, precision)?;
    let m = zero.modulus();
    let mut acc = 1 % m;
    for j in (1..n).filter(|j| j % p != 0) {
        acc = mul_mod(acc, j % m, m);
    }
    let r = zero.with_value(acc);
    Ok(if n % 2 == 0 { r } else { r.neg() })
}

/// `a0(x) ∈ {1, …, p}` with `a0 ≡ x (mod p)`; the class of zero maps to `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A0Witness {
    pub x: Rational,
    pub a0: u64,
}

pub fn a0(x: &Rational, p: u64) -> Result<A0Witness> {
    let r = rational_to_residue(x, p, 1).map_err(|e| match e {
        Error::NegativeValuation(_) => Error::NotPIntegral(format_rational(x)),
        other => other,
    })?;
    let a0 = if r.value() == 0 { p } else { r.value() };
    Ok(A0Witness { x: x.clone(), a0 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaIdentityRow {
    pub x: String,
    /// Γ_p(x+1)/Γ_p(x) = -x for units, -1 otherwise.
    pub functional_equation: bool,
    /// Γ_p(x) Γ_p(1-x) = (-1)^{a0(x)}.
    pub reflection: bool,
    /// Γ_p(x + p) ≡ Γ_p(x) (mod p).
    pub continuity_mod_p: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaIdentityReport {
    pub p: u64,
    pub precision: u32,
    pub rows: Vec<GammaIdentityRow>,
    pub pass: bool,
}

pub fn check_gamma_identities(ctx: &GammaContext, samples: &[Rational]) -> Result<GammaIdentityReport> {
    let p = ctx.p();
    let one = Rational::from_integer(1.into());
    let mut rows = Vec::with_capacity(samples.len());
    for x in samples {
        let gx = ctx.gamma_rational(x)?;
        let gx1 = ctx.gamma_rational(&(x + &one))?;
        let expected_ratio = match vp(x, p) {
            Valuation::Finite(0) => rational_to_residue(x, p, ctx.precision())?.neg(),
            _ => gx.sign(1),
        };
        let functional_equation = gx1 == gx.checked_mul(&expected_ratio)?;

        let reflected = ctx.gamma_rational(&(&one - x))?;
        let reflection = gx.checked_mul(&reflected)? == gx.sign(a0(x, p)?.a0 as i64);

        let shifted = ctx.gamma_rational(&(x + Rational::from_integer(p.into())))?;
        let continuity_mod_p = shifted.value() % p == gx.value() % p;

        rows.push(GammaIdentityRow {
            x: format_rational(x),
            functional_equation,
            reflection,
            continuity_mod_p,
        });
    }
    let pass = rows.iter().all(|r| r.functional_equation && r.reflection && r.continuity_mod_p);
    Ok(GammaIdentityReport { p, precision: ctx.precision(), rows, pass })
}
