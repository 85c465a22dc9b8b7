use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::series::{sum_s, sum_s_general, sum_s_modular};
use crate::error::{Error, Result};
use crate::exact_arith::{
    ensure_odd_prime, int, pow_p, residual_against_lift, vp, Rational, Residue, Valuation,
};
use crate::padic_gamma::GammaContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    F1,
    F3,
    GuoF2,
    GuoF4,
    SwisherF3Case1,
    SwisherF3Case2,
    SwisherF3Case3,
    #[serde(rename = "thm-1-1")]
    Thm11,
    #[serde(rename = "thm-1-2")]
    Thm12,
}

impl ClaimKind {
    pub const ALL: [ClaimKind; 9] = [
        ClaimKind::F1,
        ClaimKind::F3,
        ClaimKind::GuoF2,
        ClaimKind::GuoF4,
        ClaimKind::SwisherF3Case1,
        ClaimKind::SwisherF3Case2,
        ClaimKind::SwisherF3Case3,
        ClaimKind::Thm11,
        ClaimKind::Thm12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClaimKind::F1 => "f1",
            ClaimKind::F3 => "f3",
            ClaimKind::GuoF2 => "guo-f2",
            ClaimKind::GuoF4 => "guo-f4",
            ClaimKind::SwisherF3Case1 => "swisher-f3-case1",
            ClaimKind::SwisherF3Case2 => "swisher-f3-case2",
            ClaimKind::SwisherF3Case3 => "swisher-f3-case3",
            ClaimKind::Thm11 => "thm-1-1",
            ClaimKind::Thm12 => "thm-1-2",
        }
    }

    /// Whether the divisor `d` is a free parameter (otherwise it is fixed at 4).
    pub fn takes_divisor(self) -> bool {
        matches!(self, ClaimKind::GuoF2 | ClaimKind::GuoF4)
    }

    /// Whether `r` is a free parameter (otherwise it is fixed at 1).
    pub fn takes_exponent(self) -> bool {
        !matches!(self, ClaimKind::F1 | ClaimKind::F3)
    }
}

impl fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown claim '{s}'")))
    }
}

/// A claim with its parameters. `r` is 1 for `f1`/`f3`; `d` is 4 except for the Guo claims.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClaimId {
    pub kind: ClaimKind,
    pub p: u64,
    pub r: u32,
    pub d: u64,
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={}, r={}, d={})", self.kind, self.p, self.r, self.d)
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .filter(|v| *v <= i64::MAX as u64 / 8)
        .ok_or(Error::PrecisionTooLarge { p, precision: e })
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameters(msg)
}

impl ClaimId {
    pub fn new(kind: ClaimKind, p: u64, r: u32, d: u64) -> Result<Self> {
        let id = Self { kind, p, r, d };
        id.validate()?;
        Ok(id)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { kind, p, r, d } = *self;
        ensure_odd_prime(p)?;
        if r == 0 {
            return Err(invalid("r must be positive".into()));
        }
        if !kind.takes_divisor() && d != 4 {
            return Err(invalid(format!("{kind} is stated for d = 4 only")));
        }
        if !kind.takes_exponent() && r != 1 {
            return Err(invalid(format!("{kind} is stated for r = 1 only")));
        }
        let pr = checked_pow(p, r)?;
        let p4 = p % 4;
        let ok = match kind {
            ClaimKind::F1 | ClaimKind::SwisherF3Case1 => p4 == 1,
            ClaimKind::F3 => p4 == 3,
            ClaimKind::GuoF2 => d >= 2 && pr % d == 1,
            ClaimKind::GuoF4 => d >= 2 && pr % d == d - 1,
            ClaimKind::SwisherF3Case2 => p4 == 3 && r % 2 == 0,
            ClaimKind::SwisherF3Case3 | ClaimKind::Thm11 => p4 == 3 && r % 2 == 1 && r >= 3,
            ClaimKind::Thm12 => p4 == 3 && r % 2 == 1 && r >= 5,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("parameters outside the hypotheses of {self}")))
        }
    }
}

/// Right-hand side of a claim: either an exact rational, or `coefficient · u`
/// with `u` a Γ_p-valued unit known modulo `p^M`.
enum Rhs {
    Exact(Rational),
    Gamma { coefficient: Rational, unit: Residue },
}

struct ClaimSpec {
    kind: ClaimKind,
    truncation: fn(&ClaimId) -> Result<u64>,
    modulus: fn(&ClaimId) -> i64,
    rhs: fn(&ClaimId, Option<&GammaContext>) -> Result<Rhs>,
    rhs_text: fn(&ClaimId) -> String,
    uses_gamma: bool,
}

fn gamma_values(ctx: Option<&GammaContext>) -> Result<(&GammaContext, Residue, Residue)> {
    let ctx = ctx.ok_or_else(|| invalid("Γ_p context required".into()))?;
    let g = ctx.gamma_rational_many(&[Rational::new(1.into(), 4.into()), Rational::new(3.into(), 4.into())])?;
    Ok((ctx, g[0], g[1]))
}

fn sign(e: u64) -> Rational {
    int(if e % 2 == 0 { 1 } else { -1 })
}

fn pr(id: &ClaimId, e: u32) -> u64 {
    id.p.pow(e)
}

const REGISTRY: &[ClaimSpec] = &[
    ClaimSpec {
        kind: ClaimKind::F1,
        truncation: |id| Ok((id.p - 1) / 4),
        modulus: |_| 3,
        rhs: |id, ctx| {
            let (_, g14, g34) = gamma_values(ctx)?;
            Ok(Rhs::Gamma { coefficient: int(-(id.p as i64)), unit: g14.checked_mul(&g34)?.inverse()? })
        },
        rhs_text: |id| format!("-{p}/(G(1/4)G(3/4)), G = Gamma_{p}", p = id.p),
        uses_gamma: true,
    },
    ClaimSpec {
        kind: ClaimKind::F3,
        truncation: |id| Ok((3 * id.p - 1) / 4),
        modulus: |_| 3,
        rhs: |id, ctx| {
            let (_, g14, g34) = gamma_values(ctx)?;
            Ok(Rhs::Gamma { coefficient: int(-3 * id.p as i64), unit: g14.checked_mul(&g34)?.inverse()? })
        },
        rhs_text: |id| format!("-3*{p}/(G(1/4)G(3/4)), G = Gamma_{p}", p = id.p),
        uses_gamma: true,
    },
    ClaimSpec {
        kind: ClaimKind::GuoF2,
        truncation: |id| Ok((pr(id, id.r) - 1) / id.d),
        modulus: |id| id.r as i64 + 2,
        rhs: |id, _| {
            let m = (pr(id, id.r) - 1) / id.d;
            Ok(Rhs::Exact(sign(m) * int(pr(id, id.r) as i64)))
        },
        rhs_text: |id| format!("(-1)^m * {}^{}", id.p, id.r),
        uses_gamma: false,
    },
    ClaimSpec {
        kind: ClaimKind::GuoF4,
        truncation: |id| Ok(((id.d - 1) * pr(id, id.r) - 1) / id.d),
        modulus: |id| id.r as i64 + 2,
        rhs: |id, _| {
            let m = ((id.d - 1) * pr(id, id.r) - 1) / id.d;
            Ok(Rhs::Exact(sign(m) * int(((id.d - 1) * pr(id, id.r)) as i64)))
        },
        rhs_text: |id| format!("(-1)^m * {} * {}^{}", id.d - 1, id.p, id.r),
        uses_gamma: false,
    },
    ClaimSpec {
        kind: ClaimKind::SwisherF3Case1,
        truncation: |id| Ok((pr(id, id.r) - 1) / 4),
        modulus: |id| 3 * id.r as i64,
        rhs: |id, _| {
            let s = sign((id.p * id.p - 1) / 8);
            Ok(Rhs::Exact(s * int(id.p as i64) * sum_s((pr(id, id.r - 1) - 1) / 4)))
        },
        rhs_text: |id| {
            let s = if ((id.p * id.p - 1) / 8) % 2 == 0 { "" } else { "-" };
            format!("{s}{} * S({})", id.p, (pr(id, id.r - 1) - 1) / 4)
        },
        uses_gamma: false,
    },
    ClaimSpec {
        kind: ClaimKind::SwisherF3Case2,
        truncation: |id| Ok((pr(id, id.r) - 1) / 4),
        modulus: |id| 3 * id.r as i64 - 2,
        rhs: |id, _| Ok(Rhs::Exact(int((id.p * id.p) as i64) * sum_s((pr(id, id.r - 2) - 1) / 4))),
        rhs_text: |id| format!("{}^2 * S({})", id.p, (pr(id, id.r - 2) - 1) / 4),
        uses_gamma: false,
    },
    ClaimSpec {
        kind: ClaimKind::SwisherF3Case3,
        truncation: |id| Ok((pr(id, id.r) - 3) / 4),
        modulus: |id| id.r as i64,
        rhs: |id, _| Ok(Rhs::Exact(int((id.p * id.p) as i64) * sum_s((pr(id, id.r - 2) - 3) / 4))),
        rhs_text: |id| format!("{}^2 * S({})", id.p, (pr(id, id.r - 2) - 3) / 4),
        uses_gamma: false,
    },
    ClaimSpec {
        kind: ClaimKind::Thm11,
        truncation: |id| Ok((pr(id, id.r) - 3) / 4),
        modulus: |id| id.r as i64,
        rhs: |id, ctx| {
            let (_, g14, g34) = gamma_values(ctx)?;
            Ok(Rhs::Gamma {
                coefficient: int(-16) * pow_p(id.p, id.r as i64 - 1),
                unit: g34.checked_mul(&g14.pow(3).inverse()?)?,
            })
        },
        rhs_text: |id| format!("-16*G(3/4)/G(1/4)^3 * {p}^{}, G = Gamma_{p}", id.r - 1, p = id.p),
        uses_gamma: true,
    },
    ClaimSpec {
        kind: ClaimKind::Thm12,
        truncation: |id| Ok((pr(id, id.r) - 3) / 4),
        modulus: |id| id.r as i64,
        rhs: |id, _| Ok(Rhs::Exact(int((id.p * id.p) as i64) * sum_s((pr(id, id.r - 2) - 3) / 4))),
        rhs_text: |id| format!("{}^2 * S({})", id.p, (pr(id, id.r - 2) - 3) / 4),
        uses_gamma: false,
    },
];

fn spec_for(kind: ClaimKind) -> &'static ClaimSpec {
    REGISTRY.iter().find(|s| s.kind == kind).expect("every claim kind is registered")
}

/// Truncation index `m` of the claim's left-hand side `S_d(m)`.
pub fn truncation_index(id: &ClaimId) -> Result<u64> {
    id.validate()?;
    (spec_for(id.kind).truncation)(id)
}

/// Exponent `e` of the claimed modulus `p^e`.
pub fn modulus_exponent(id: &ClaimId) -> Result<i64> {
    id.validate()?;
    Ok((spec_for(id.kind).modulus)(id))
}

/// Largest truncation index evaluated exactly under [`SumPath::Auto`].
pub const EXACT_LIMIT: u64 = 5000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumPath {
    /// Exact up to [`EXACT_LIMIT`], modular above.
    #[default]
    Auto,
    Exact,
    Modular,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Precision `M` for Γ_p values and the modular sum; defaults to modulus exponent + 2.
    pub precision: Option<u32>,
    pub path: SumPath,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub m: u64,
    pub lhs: String,
    pub rhs: String,
    pub lhs_valuation: Valuation,
    pub modulus_exp: i64,
    pub residual_valuation: Valuation,
    /// False when the residual reached the precision of a lifted side and is only a lower bound.
    pub residual_exact: bool,
    pub pass: bool,
    /// `M` used for Γ_p values or the modular sum; `None` when both sides are exact.
    pub precision: Option<u32>,
    pub seconds: f64,
    pub diagnostic: Option<String>,
}

/// Decides a registered claim by the valuation of `lhs - rhs`. A false
/// congruence is a report with `pass = false`, never an error; errors are
/// reserved for invalid parameters and unreachable precision.
pub fn verify_claim(id: &ClaimId, options: VerifyOptions) -> Result<ClaimReport> {
    let start = Instant::now();
    id.validate()?;
    let spec = spec_for(id.kind);
    let m = (spec.truncation)(id)?;
    let modulus_exp = (spec.modulus)(id);
    let precision = options.precision.unwrap_or(modulus_exp as u32 + 2);
    if precision == 0 {
        return Err(invalid("precision must be positive".into()));
    }
    let modular = match options.path {
        SumPath::Auto => m > EXACT_LIMIT,
        SumPath::Exact => false,
        SumPath::Modular => true,
    };

    let (lhs, lhs_precision, lhs_valuation) = if modular {
        let v = sum_s_modular(id.d, m, id.p, precision)?;
        (v.lift(), v.absolute_precision(), v.valuation())
    } else {
        let s = sum_s_general(id.d, m)?;
        let v = vp(&s, id.p);
        (s, Valuation::Infinite, v)
    };

    let ctx = if spec.uses_gamma { Some(GammaContext::new(id.p, precision)?) } else { None };
    let (rhs, rhs_precision) = match (spec.rhs)(id, ctx.as_ref())? {
        Rhs::Exact(q) => (q, Valuation::Infinite),
        Rhs::Gamma { coefficient, unit } => {
            let prec = vp(&coefficient, id.p) + Valuation::Finite(unit.precision() as i64);
            (coefficient * Rational::from_integer(unit.to_bigint()), prec)
        }
    };
    let lifted = residual_against_lift(&lhs, lhs_precision, &rhs, rhs_precision, id.p);
    let pass = lifted.residual.at_least(modulus_exp);

    let mut notes = Vec::new();
    if !lhs_valuation.at_least(0) {
        notes.push(format!("lhs is not {}-integral", id.p));
    }
    if !lifted.exact {
        notes.push(format!("residual is a lower bound at precision {precision}"));
    }
    if !pass {
        notes.push(format!(
            "residual valuation {} below modulus exponent {modulus_exp}",
            lifted.residual
        ));
    }
    let lhs_text = if id.d == 4 { format!("S({m})") } else { format!("S_{}({m})", id.d) };
    Ok(ClaimReport {
        claim: *id,
        m,
        lhs: lhs_text,
        rhs: (spec.rhs_text)(id),
        lhs_valuation,
        modulus_exp,
        residual_valuation: lifted.residual,
        residual_exact: lifted.exact,
        pass,
        precision: (spec.uses_gamma || modular).then_some(precision),
        seconds: start.elapsed().as_secs_f64(),
        diagnostic: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: ClaimKind, p: u64, r: u32, d: u64) -> ClaimReport {
        verify_claim(&ClaimId::new(kind, p, r, d).unwrap(), VerifyOptions::default()).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ClaimKind::ALL {
            assert_eq!(k.name().parse::<ClaimKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("f5".parse::<ClaimKind>().is_err());
    }

    #[test]
    fn parameter_constraints() {
        assert!(ClaimId::new(ClaimKind::Thm11, 5, 3, 4).is_err());
        assert!(ClaimId::new(ClaimKind::Thm11, 3, 2, 4).is_err());
        assert!(ClaimId::new(ClaimKind::Thm11, 3, 1, 4).is_err());
        assert!(ClaimId::new(ClaimKind::Thm12, 3, 3, 4).is_err());
        assert!(ClaimId::new(ClaimKind::F1, 7, 1, 4).is_err());
        assert!(ClaimId::new(ClaimKind::F1, 5, 2, 4).is_err());
        assert!(ClaimId::new(ClaimKind::GuoF2, 5, 1, 3).is_err());
        assert!(ClaimId::new(ClaimKind::GuoF4, 5, 1, 3).is_ok());
        assert!(ClaimId::new(ClaimKind::SwisherF3Case2, 3, 3, 4).is_err());
        assert!(ClaimId::new(ClaimKind::F3, 9, 1, 4).is_err());
    }

    #[test]
    fn gamma_claim_at_3_3() {
        let rep = run(ClaimKind::Thm11, 3, 3, 4);
        assert_eq!(rep.m, 6);
        assert!(rep.pass);
        assert_eq!(rep.precision, Some(5));
    }

    #[test]
    fn case2_at_3_2() {
        let rep = run(ClaimKind::SwisherF3Case2, 3, 2, 4);
        assert_eq!((rep.m, rep.modulus_exp), (2, 4));
        assert!(rep.pass);
        assert_eq!(rep.precision, None);
    }

    #[test]
    fn f3_at_7() {
        let rep = run(ClaimKind::F3, 7, 1, 4);
        assert_eq!(rep.m, 5);
        assert!(rep.pass);
    }

    #[test]
    fn modular_path_agrees() {
        let id = ClaimId::new(ClaimKind::SwisherF3Case3, 3, 5, 4).unwrap();
        let exact = verify_claim(&id, VerifyOptions::default()).unwrap();
        let modular =
            verify_claim(&id, VerifyOptions { precision: Some(8), path: SumPath::Modular }).unwrap();
        assert!(exact.pass && modular.pass);
        assert_eq!(exact.lhs_valuation, modular.lhs_valuation);
    }
}
