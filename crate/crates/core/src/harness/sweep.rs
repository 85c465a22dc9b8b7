use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::ResultRecord;
use crate::error::{Error, Result};
use crate::exact_arith::{is_odd_prime, Valuation};
use crate::supercongruence::{verify_claim, ClaimId, ClaimKind, SumPath, VerifyOptions};

/// A parameter sweep over one claim family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub claim: ClaimKind,
    pub p_min: u64,
    pub p_max: u64,
    /// Keep only primes with `p ≡ residue.0 (mod residue.1)`.
    pub residue: Option<(u64, u64)>,
    /// Ignored for claims with a fixed exponent.
    pub exponents: Vec<u32>,
    /// Ignored for claims with a fixed divisor.
    pub divisors: Vec<u64>,
    pub precision: Option<u32>,
    pub path: SumPath,
    pub jobs: usize,
    /// Zero the wall-clock fields of every record.
    pub reproducible: bool,
}

impl SweepSpec {
    pub fn new(claim: ClaimKind, p_min: u64, p_max: u64) -> Self {
        Self {
            claim,
            p_min,
            p_max,
            residue: None,
            exponents: vec![1],
            divisors: vec![4],
            precision: None,
            path: SumPath::Auto,
            jobs: 1,
            reproducible: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::InvalidParameters("parallelism width must be >= 1".into()));
        }
        if self.p_min > self.p_max {
            return Err(Error::InvalidParameters(format!("empty prime range [{}, {}]", self.p_min, self.p_max)));
        }
        if let Some((a, b)) = self.residue {
            if b == 0 || a >= b {
                return Err(Error::InvalidParameters(format!("bad residue filter {a} mod {b}")));
            }
        }
        if self.claim.takes_exponent() && (self.exponents.is_empty() || self.exponents.contains(&0)) {
            return Err(Error::InvalidParameters("exponent list must be non-empty and positive".into()));
        }
        if self.claim.takes_divisor() && (self.divisors.is_empty() || self.divisors.iter().any(|&d| d < 2)) {
            return Err(Error::InvalidParameters("divisor list must be non-empty and >= 2".into()));
        }
        Ok(())
    }

    /// Every admissible `(p, r, d)` in ascending order.
    pub fn admissible(&self) -> Result<Vec<ClaimId>> {
        self.validate()?;
        let exps: Vec<u32> = if self.claim.takes_exponent() { self.exponents.clone() } else { vec![1] };
        let divs: Vec<u64> = if self.claim.takes_divisor() { self.divisors.clone() } else { vec![4] };
        let mut ids = Vec::new();
        for p in (self.p_min..=self.p_max).filter(|&p| is_odd_prime(p)) {
            if let Some((a, b)) = self.residue {
                if p % b != a {
                    continue;
                }
            }
            for &r in &exps {
                for &d in &divs {
                    if let Ok(id) = ClaimId::new(self.claim, p, r, d) {
                        ids.push(id);
                    }
                }
            }
        }
        ids.sort_by_key(|id| (id.p, id.r, id.d));
        ids.dedup();
        Ok(ids)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub min_residual: Option<Valuation>,
}

impl SweepSummary {
    pub fn of(records: &[ResultRecord]) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            records: records.len(),
            passed,
            failed: records.len() - passed,
            min_residual: records.iter().filter_map(|r| r.residual_valuation).min(),
        }
    }
}

/// Runs every admissible claim on a pool of `jobs` threads. Records come back
/// in `(p, r, d)` order whatever the completion order; a claim that errors
/// becomes a failed record and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRecord>> {
    let ids = spec.admissible()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    let options = VerifyOptions { precision: spec.precision, path: spec.path };
    let records: Vec<ResultRecord> = pool.install(|| {
        ids.par_iter()
            .map(|id| match verify_claim(id, options) {
                Ok(report) => ResultRecord::from_report(&report),
                Err(e) => ResultRecord::from_error(id, spec.precision, &e),
            })
            .collect()
    });
    Ok(if spec.reproducible { records.into_iter().map(ResultRecord::without_clock).collect() } else { records })
}
