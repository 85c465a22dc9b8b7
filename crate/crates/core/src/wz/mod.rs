//! The Wilf–Zeilberger pair for `S(m)`:
//!
//! ```text
//! F(n,k) = (-1)^{n+k} (8n+1) (1/4)_n^2 (1/4)_{n+k} / [ (1)_n^2 (1)_{n-k} (1/4)_k^2 ]
//! G(n,k) = (-1)^{n+k} 4 (1/4)_n^2 (1/4)_{n+k-1} / [ (1)_{n-1}^2 (1)_{n-k} (1/4)_k^2 ]
//! ```
//!
//! with `1/(1)_m = 0` for negative `m`, satisfying
//! `F(n,k-1) - F(n,k) = G(n+1,k) - G(n,k)`.

mod poly;

pub use poly::BivarPoly;

use std::sync::LazyLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{
    format_rational, int, pow_p, rat, residual_against_lift, vp, Rational, Valuation,
};
use crate::padic_gamma::GammaContext;
use crate::pochhammer::{ensure_three_mod_four_odd_r, reciprocal_rising_one, rising, RisingCache};

static QUARTER: LazyLock<RisingCache> = LazyLock::new(|| RisingCache::new(rat(1, 4)));

fn sign(e: u64) -> Rational {
    if e % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

pub fn eval_f(n: u64, k: u64) -> Rational {
    if k > n {
        return int(0);
    }
    let inv_n = reciprocal_rising_one(n as i64);
    let q_n = QUARTER.get(n);
    let q_k = QUARTER.get(k);
    sign(n + k) * int(8 * n as i64 + 1) * &q_n * &q_n * QUARTER.get(n + k) * &inv_n * &inv_n
        * reciprocal_rising_one(n as i64 - k as i64)
        / (&q_k * &q_k)
}

pub fn eval_g(n: u64, k: u64) -> Rational {
    // 1/(1)_{n-1} vanishes at n = 0 and 1/(1)_{n-k} for k > n
    if n == 0 || k > n {
        return int(0);
    }
    let inv = reciprocal_rising_one(n as i64 - 1);
    let q_n = QUARTER.get(n);
    let q_k = QUARTER.get(k);
    sign(n + k) * int(4) * &q_n * &q_n * QUARTER.get(n + k - 1) * &inv * &inv
        * reciprocal_rising_one(n as i64 - k as i64)
        / (&q_k * &q_k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WzValue {
    pub n: u64,
    pub k: u64,
    pub f: String,
    pub g: String,
}

pub fn wz_value(n: u64, k: u64) -> WzValue {
    WzValue { n, k, f: format_rational(&eval_f(n, k)), g: format_rational(&eval_g(n, k)) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescopingReport {
    pub n_max: u64,
    pub k_max: u64,
    pub cells_checked: u64,
    /// Cells `(n, k)` where the identity fails, sorted.
    pub violations: Vec<(u64, u64)>,
    pub pass: bool,
}

/// Checks `F(n,k-1) - F(n,k) = G(n+1,k) - G(n,k)` exactly on
/// `0 <= n <= n_max`, `1 <= k <= k_max`.
pub fn check_telescoping_grid(n_max: u64, k_max: u64) -> Result<TelescopingReport> {
    if n_max < 1 || k_max < 1 {
        return Err(Error::InvalidParameters("grid bounds must be >= 1".into()));
    }
    let violations: Vec<(u64, u64)> = (0..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            (1..=k_max).filter_map(move |k| {
                let lhs = eval_f(n, k - 1) - eval_f(n, k);
                let rhs = eval_g(n + 1, k) - eval_g(n, k);
                (lhs != rhs).then_some((n, k))
            })
        })
        .collect();
    Ok(TelescopingReport {
        n_max,
        k_max,
        cells_checked: (n_max + 1) * k_max,
        pass: violations.is_empty(),
        violations,
    })
}

/// One ratio of the certificate, written as `numerator / denominator` in `(n, k)`.
#[derive(Clone, Debug)]
pub struct CertificateRatio {
    pub name: &'static str,
    pub numerator: BivarPoly,
    pub denominator: BivarPoly,
}

/// The closed-form ratios `F(n,k-1)/F(n,k)`, `G(n+1,k)/F(n,k)` and `G(n,k)/F(n,k)`.
pub fn certificate_ratios() -> [CertificateRatio; 3] {
    let n = BivarPoly::n;
    let k = BivarPoly::k;
    let c = |a: i64, b: i64| BivarPoly::constant(rat(a, b));
    let lin = |a: i64, b: i64, d: i64| &(&n().scale(&int(a)) + &k().scale(&int(b))) + &c(d, 1);
    // (4k-3)/4, (4n+4k-3)/4, (4n+1)/4, n-k+1, 8n+1
    let k_shift = lin(0, 4, -3).scale(&rat(1, 4));
    let nk_shift = lin(4, 4, -3).scale(&rat(1, 4));
    let n_shift = lin(4, 0, 1).scale(&rat(1, 4));
    let gap = lin(1, -1, 1);
    let eight = lin(8, 0, 1);
    [
        CertificateRatio {
            name: "F(n,k-1)/F(n,k)",
            numerator: -&k_shift.pow(2),
            denominator: &nk_shift * &gap,
        },
        CertificateRatio {
            name: "G(n+1,k)/F(n,k)",
            numerator: -&n_shift.pow(2).scale(&int(4)),
            denominator: &eight * &gap,
        },
        CertificateRatio {
            name: "G(n,k)/F(n,k)",
            numerator: n().pow(2).scale(&int(4)),
            denominator: &nk_shift * &eight,
        },
    ]
}

/// `(R1 - 1) - (R2 - R3)` with all denominators cleared.
pub fn certificate_difference() -> BivarPoly {
    let [r1, r2, r3] = certificate_ratios();
    let t1 = &(&(&r1.numerator - &r1.denominator) * &r2.denominator) * &r3.denominator;
    let t2 = &(&r2.numerator * &r1.denominator) * &r3.denominator;
    let t3 = &(&r3.numerator * &r1.denominator) * &r2.denominator;
    &(&t1 - &t2) + &t3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub difference: String,
    pub difference_is_zero: bool,
    pub points_validated: u32,
    pub points_skipped: u32,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

fn validate_ratio(ratio: &CertificateRatio, n: u64, k: u64) -> Result<bool> {
    let f = eval_f(n, k);
    if f == int(0) {
        return Err(Error::DegenerateDenominator(n as i64, k as i64));
    }
    let (rn, rk) = (int(n as i64), int(k as i64));
    let den = ratio.denominator.eval(&rn, &rk);
    if den == int(0) {
        return Err(Error::DegenerateDenominator(n as i64, k as i64));
    }
    let closed = ratio.numerator.eval(&rn, &rk) / den;
    let defined = match ratio.name {
        "F(n,k-1)/F(n,k)" => eval_f(n, k - 1),
        "G(n+1,k)/F(n,k)" => eval_g(n + 1, k),
        _ => eval_g(n, k),
    } / f;
    Ok(closed == defined)
}

pub const CERTIFICATE_SAMPLE_POINTS: u32 = 50;

/// Proves the certificate symbolically, then compares each closed-form ratio
/// against the Pochhammer definitions of `F` and `G` on grid points in
/// row-major order until [`CERTIFICATE_SAMPLE_POINTS`] points validate.
/// Poles are skipped and counted.
pub fn check_ratio_certificate() -> CertificateReport {
    let difference = certificate_difference();
    let ratios = certificate_ratios();
    let mut validated = 0;
    let mut skipped = 0;
    let mut mismatches = Vec::new();
    'grid: for n in 0..64u64 {
        for k in 0..=n + 1 {
            if validated == CERTIFICATE_SAMPLE_POINTS {
                break 'grid;
            }
            let mut point_ok = true;
            for ratio in ratios.iter().filter(|r| k >= 1 || r.name != "F(n,k-1)/F(n,k)") {
                match validate_ratio(ratio, n, k) {
                    Ok(true) => {}
                    Ok(false) => mismatches.push(format!("{} at ({n},{k})", ratio.name)),
                    Err(Error::DegenerateDenominator(..)) => point_ok = false,
                    Err(e) => mismatches.push(format!("{} at ({n},{k}): {e}", ratio.name)),
                }
            }
            if point_ok {
                validated += 1;
            } else {
                skipped += 1;
            }
        }
    }
    let difference_is_zero = difference.is_zero();
    CertificateReport {
        difference: difference.to_string(),
        difference_is_zero,
        points_validated: validated,
        points_skipped: skipped,
        pass: difference_is_zero && mismatches.is_empty() && validated == CERTIFICATE_SAMPLE_POINTS,
        mismatches,
    }
}

/// Prefix valuations `vp((1/4)_j)` and `vp(j!)` for `j <= len`.
struct ValuationTables {
    quarter: Vec<i64>,
    factorial: Vec<i64>,
}

impl ValuationTables {
    fn new(p: u64, len: u64) -> Self {
        let v = |mut x: u64| {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            e
        };
        let mut quarter = vec![0i64];
        let mut factorial = vec![0i64];
        for i in 0..len {
            quarter.push(quarter[i as usize] + v(4 * i + 1));
            factorial.push(factorial[i as usize] + v(i + 1));
        }
        Self { quarter, factorial }
    }

    fn g(&self, n: u64, k: u64) -> Valuation {
        if n == 0 || k > n {
            return Valuation::Infinite;
        }
        let (q, f) = (&self.quarter, &self.factorial);
        let (n, k) = (n as usize, k as usize);
        Valuation::Finite(2 * q[n] + q[n + k - 1] - 2 * f[n - 1] - f[n - k] - 2 * q[k])
    }
}

/// `vp(G(n, k))` from prefix valuation tables, without forming `G`.
pub fn g_valuation(n: u64, k: u64, p: u64) -> Valuation {
    ValuationTables::new(p, n + k + 1).g(n, k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma32Report {
    pub p: u64,
    pub r: u32,
    /// The fixed first argument `(p^r + 1)/4`.
    pub n: u64,
    pub k_max: u64,
    pub bound: i64,
    pub min_valuation: Valuation,
    pub argmin_k: u64,
    pub violations: u64,
    /// Up to 16 `(k, vp)` pairs below the bound, smallest k first.
    pub first_violations: Vec<(u64, i64)>,
    pub tight: bool,
    pub pass: bool,
}

/// Exact valuations of `G((p^r+1)/4, k)` for `1 <= k <= (p^r-3)/4`, compared
/// with the bound `3(r-1)/2`.
pub fn check_lemma32(p: u64, r: u32) -> Result<Lemma32Report> {
    ensure_three_mod_four_odd_r(p, r, 3)?;
    let pr = p
        .checked_pow(r)
        .filter(|v| *v < 1 << 40)
        .ok_or(Error::PrecisionTooLarge { p, precision: r })?;
    let n = (pr + 1) / 4;
    let k_max = (pr - 3) / 4;
    let bound = 3 * (r as i64 - 1) / 2;
    let tables = ValuationTables::new(p, 2 * n + 1);
    let mut min_valuation = Valuation::Infinite;
    let mut argmin_k = 0;
    let mut violations = 0;
    let mut first_violations = Vec::new();
    for k in 1..=k_max {
        let v = tables.g(n, k);
        if v < min_valuation {
            min_valuation = v;
            argmin_k = k;
        }
        if !v.at_least(bound) {
            violations += 1;
            if first_violations.len() < 16 {
                first_violations.push((k, v.finite().unwrap_or(i64::MAX)));
            }
        }
    }
    Ok(Lemma32Report {
        p,
        r,
        n,
        k_max,
        bound,
        min_valuation,
        argmin_k,
        violations,
        first_violations,
        tight: min_valuation == Valuation::Finite(bound),
        pass: violations == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeastIndexReport {
    pub p: u64,
    pub r: u32,
    /// Observed least `j` for `((p^r-2)/4)_j`, `((-1-p^r)/4)_j`, `(1/4)_j`.
    pub observed: [u64; 3],
    /// `(p+3)/2`, `(p+5)/4`, `(3p+3)/4`.
    pub expected: [u64; 3],
    pub indices_match: bool,
    pub j1_below_j3: bool,
    pub j2_below_j3: bool,
    pub pass: bool,
}

/// Least `j >= 1` with a p-divisible factor among `b, b+1, …, b+j-1`.
fn least_p_factor_length(b: &Rational, p: u64, limit: u64) -> Option<u64> {
    (0..limit)
        .find(|&i| vp(&(b + int(i as i64)), p).at_least(1))
        .map(|i| i + 1)
}

pub fn check_least_p_factor_indices(p: u64, r: u32) -> Result<LeastIndexReport> {
    ensure_three_mod_four_odd_r(p, r, 3)?;
    let pr = p.checked_pow(r).ok_or(Error::PrecisionTooLarge { p, precision: r })? as i64;
    let bases = [rat(pr - 2, 4), rat(-1 - pr, 4), rat(1, 4)];
    let limit = 2 * p + 2;
    let mut observed = [0u64; 3];
    for (slot, b) in observed.iter_mut().zip(&bases) {
        *slot = least_p_factor_length(b, p, limit).unwrap_or(0);
    }
    let expected = [(p + 3) / 2, (p + 5) / 4, (3 * p + 3) / 4];
    let indices_match = observed == expected;
    let j1_below_j3 = observed[0] < observed[2];
    let j2_below_j3 = observed[1] < observed[2];
    Ok(LeastIndexReport {
        p,
        r,
        observed,
        expected,
        indices_match,
        j1_below_j3,
        j2_below_j3,
        pass: indices_match && j1_below_j3 && j2_below_j3,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma33Report {
    pub p: u64,
    pub r: u32,
    pub m: u64,
    pub precision: u32,
    /// `F(m,m) = (2p^r - 5) (1/4)_{2m} / (1)_m^2` exactly.
    pub proof_step_exact: bool,
    pub lhs_valuation: Valuation,
    pub modulus_exp: i64,
    pub residual_valuation: Valuation,
    pub residual_exact: bool,
    pub pass: bool,
}

/// `F(m, m) ≡ -16 Γ_p(3/4) / Γ_p(1/4)^3 · p^{r-1} (mod p^r)` for `m = (p^r-3)/4`.
pub fn check_lemma33(p: u64, r: u32, precision: Option<u32>) -> Result<Lemma33Report> {
    ensure_three_mod_four_odd_r(p, r, 3)?;
    let precision = precision.unwrap_or(r + 2);
    if precision < r {
        return Err(Error::InvalidParameters(format!("precision {precision} < r = {r}")));
    }
    let pr = p.checked_pow(r).ok_or(Error::PrecisionTooLarge { p, precision: r })?;
    let m = (pr - 3) / 4;
    let lhs = eval_f(m, m);
    let inv_m = reciprocal_rising_one(m as i64);
    let step = int(2 * pr as i64 - 5) * rising(&rat(1, 4), 2 * m) * &inv_m * &inv_m;

    let ctx = GammaContext::new(p, precision)?;
    let g = ctx.gamma_rational_many(&[rat(3, 4), rat(1, 4)])?;
    let unit = g[0].checked_mul(&g[1].pow(3).inverse()?)?;
    let coeff = int(-16) * pow_p(p, r as i64 - 1);
    let rhs = &coeff * Rational::from_integer(unit.to_bigint());
    let rhs_precision = vp(&coeff, p) + Valuation::Finite(precision as i64);
    let lifted = residual_against_lift(&lhs, Valuation::Infinite, &rhs, rhs_precision, p);
    let modulus_exp = r as i64;
    Ok(Lemma33Report {
        p,
        r,
        m,
        precision,
        proof_step_exact: step == lhs,
        lhs_valuation: vp(&lhs, p),
        modulus_exp,
        residual_valuation: lifted.residual,
        residual_exact: lifted.exact,
        pass: lifted.residual.at_least(modulus_exp),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSumReport {
    pub p: u64,
    pub r: u32,
    pub m: u64,
    pub failing_k: Vec<u64>,
    pub pass: bool,
}

/// `Σ_{n=0}^{m} [F(n,k-1) - F(n,k)] = G(m+1,k) - G(0,k)` for `1 <= k <= m`, `m = (p^r-3)/4`.
pub fn check_column_sums(p: u64, r: u32) -> Result<ColumnSumReport> {
    ensure_three_mod_four_odd_r(p, r, 3)?;
    let pr = p.checked_pow(r).ok_or(Error::PrecisionTooLarge { p, precision: r })?;
    let m = (pr - 3) / 4;
    let failing_k: Vec<u64> = (1..=m)
        .into_par_iter()
        .filter(|&k| {
            let column: Rational = (0..=m).map(|n| eval_f(n, k - 1) - eval_f(n, k)).sum();
            column != eval_g(m + 1, k) - eval_g(0, k)
        })
        .collect();
    Ok(ColumnSumReport { p, r, m, pass: failing_k.is_empty(), failing_k })
}
