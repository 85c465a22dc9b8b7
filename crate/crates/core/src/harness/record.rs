use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::Valuation;
use crate::supercongruence::{modulus_exponent, truncation_index, ClaimId, ClaimKind, ClaimReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One flattened claim verdict as persisted by `verify` and `sweep`.
/// Field order is the column order of both output formats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub claim: ClaimKind,
    pub p: u64,
    pub r: u32,
    pub d: u64,
    pub m: u64,
    pub modulus_exp: i64,
    /// `None` only when the claim could not be evaluated (see `diagnostic`).
    pub residual_valuation: Option<Valuation>,
    pub pass: bool,
    pub precision: Option<u32>,
    pub seconds: f64,
    pub residual_exact: bool,
    pub lhs: String,
    pub rhs: String,
    pub diagnostic: Option<String>,
    pub tool_version: String,
    /// Unix seconds.
    pub timestamp: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl ResultRecord {
    pub fn from_report(report: &ClaimReport) -> Self {
        let c = report.claim;
        Self {
            claim: c.kind,
            p: c.p,
            r: c.r,
            d: c.d,
            m: report.m,
            modulus_exp: report.modulus_exp,
            residual_valuation: Some(report.residual_valuation),
            pass: report.pass,
            precision: report.precision,
            seconds: report.seconds,
            residual_exact: report.residual_exact,
            lhs: report.lhs.clone(),
            rhs: report.rhs.clone(),
            diagnostic: report.diagnostic.clone(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: now(),
        }
    }

    /// A failed record for a claim whose evaluation raised an error.
    pub fn from_error(id: &ClaimId, precision: Option<u32>, err: &Error) -> Self {
        Self {
            claim: id.kind,
            p: id.p,
            r: id.r,
            d: id.d,
            m: truncation_index(id).unwrap_or(0),
            modulus_exp: modulus_exponent(id).unwrap_or(0),
            residual_valuation: None,
            pass: false,
            precision,
            seconds: 0.0,
            residual_exact: false,
            lhs: String::new(),
            rhs: String::new(),
            diagnostic: Some(err.to_string()),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: now(),
        }
    }

    /// Zeroes the wall-clock fields so identical runs serialize identically.
    pub fn without_clock(mut self) -> Self {
        self.seconds = 0.0;
        self.timestamp = 0;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    #[default]
    Jsonl,
    Csv,
}

impl RecordFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RecordFormat::Jsonl => "jsonl",
            RecordFormat::Csv => "csv",
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("record: {e}"))
}

pub fn write_records<W: Write>(out: W, records: &[ResultRecord], format: RecordFormat) -> std::io::Result<()> {
    match format {
        RecordFormat::Jsonl => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()
        }
    }
}

pub fn write_records_to_path(path: &Path, records: &[ResultRecord], format: RecordFormat) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = std::fs::File::create(path)?;
    write_records(std::io::BufWriter::new(file), records, format)
}

pub fn read_jsonl(text: &str) -> Result<Vec<ResultRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(parse_err))
        .collect()
}

pub fn record_to_json(record: &ResultRecord) -> String {
    serde_json::to_string(record).expect("records always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supercongruence::{verify_claim, VerifyOptions};

    fn sample() -> ResultRecord {
        let id = ClaimId::new(ClaimKind::Thm11, 3, 3, 4).unwrap();
        ResultRecord::from_report(&verify_claim(&id, VerifyOptions::default()).unwrap())
    }

    #[test]
    fn json_keys_in_order() {
        let json = record_to_json(&sample());
        let keys = ["claim", "p", "r", "d", "m", "modulus_exp", "residual_valuation", "pass", "precision", "seconds"];
        let mut last = 0;
        for k in keys {
            let at = json.find(&format!("\"{k}\":")).unwrap();
            assert!(at >= last, "{k} out of order in {json}");
            last = at;
        }
        assert!(json.starts_with("{\"claim\":\"thm-1-1\""));
    }

    #[test]
    fn jsonl_round_trip() {
        let mut a = sample();
        a.diagnostic = Some("x, \"quoted\"".into());
        let id = ClaimId::new(ClaimKind::F1, 5, 1, 4).unwrap();
        let b = ResultRecord::from_error(&id, Some(5), &Error::PrecisionLoss { lost: 3, available: 2 });
        let mut buf = Vec::new();
        write_records(&mut buf, &[a.clone(), b.clone()], RecordFormat::Jsonl).unwrap();
        let back = read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[sample().without_clock()], RecordFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("claim,p,r,d,m,modulus_exp,residual_valuation,pass,precision,seconds"));
        assert!(lines.next().unwrap().starts_with("thm-1-1,3,3,4,6,3,"));
    }
}
