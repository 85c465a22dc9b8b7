use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::record::{record_to_json, write_records, write_records_to_path, RecordFormat, ResultRecord};
use super::sweep::{run_sweep, SweepSpec, SweepSummary};
use crate::error::Error;
use crate::exact_arith::{format_rational, parse_rational, vp, ValuedNumber};
use crate::padic_gamma::GammaContext;
use crate::pochhammer::{check_lemma23, Lemma23Identity};
use crate::supercongruence::{
    archimedean_sanity, sum_s_general, sum_s_modular, verify_claim, ClaimId, ClaimKind, SumPath,
    VerifyOptions,
};
use crate::wz;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const OUTPUT_DIR_ENV: &str = "SUPERCONG_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "supercong", version, about = "Exact verification of Ramanujan-type supercongruences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the p-adic gamma function at a p-integral rational
    Gamma(GammaArgs),
    /// Evaluate the truncated sum S_d(m)
    Sum(SumArgs),
    /// Verify one registered congruence
    Verify(VerifyArgs),
    /// Verify a claim family over a parameter range
    Sweep(SweepArgs),
    /// Run a WZ-pair, valuation or rising-factorial check
    Wz(WzArgs),
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[arg(long)]
    pub p: u64,
    /// Rational literal `a` or `a/b`
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 1)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct SumArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long, default_value_t = 4)]
    pub d: u64,
    /// Also report the p-adic valuation and unit part
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 4)]
    pub precision: u32,
    /// Use the modular path (requires --p)
    #[arg(long)]
    pub modular: bool,
    /// Compare the floating-point value with 2√2/π (d = 4 only)
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    Exact,
    Modular,
}

impl From<PathArg> for SumPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Auto => SumPath::Auto,
            PathArg::Exact => SumPath::Exact,
            PathArg::Modular => SumPath::Modular,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_claim)]
    pub claim: ClaimKind,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, default_value_t = 4)]
    pub d: u64,
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
    #[arg(long, value_enum, default_value_t = VerifyFormat::Json)]
    pub format: VerifyFormat,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_claim)]
    pub claim: ClaimKind,
    #[arg(long, default_value_t = 3)]
    pub p_min: u64,
    #[arg(long)]
    pub p_max: u64,
    /// Keep primes p ≡ RESIDUE (mod --residue-modulus)
    #[arg(long)]
    pub residue: Option<u64>,
    #[arg(long, default_value_t = 4)]
    pub residue_modulus: u64,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub r: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub d: Vec<u64>,
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
    #[arg(long, default_value_t = default_jobs())]
    pub jobs: usize,
    /// Output file; defaults to `sweep-<claim>.<ext>` in the output directory
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = RecordFormat::Jsonl)]
    pub format: RecordFormat,
    /// Zero timing and timestamp fields so repeated runs are byte-identical
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WzCheck {
    Grid,
    Certificate,
    Lemma32,
    Lemma33,
    Lemma23,
    Indices,
    ColumnSums,
}

#[derive(Args, Debug)]
pub struct WzArgs {
    #[arg(long, value_enum)]
    pub check: WzCheck,
    #[arg(long, default_value_t = 25)]
    pub nmax: u64,
    #[arg(long, default_value_t = 25)]
    pub kmax: u64,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Identity for the ratio check: a, b, c, c-proof-derived or all
    #[arg(long, default_value = "all")]
    pub which: String,
    #[arg(long)]
    pub precision: Option<u32>,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn parse_claim(s: &str) -> Result<ClaimKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Invalid(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionLoss { .. } | Error::MismatchedModulus(..) => Failure::Internal(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn verdict(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Invalid(format!("--{flag} is required for this check")))
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_gamma(a: &GammaArgs, out: &mut dyn Write) -> Outcome {
    let x = parse_rational(&a.x)?;
    let ctx = GammaContext::new(a.p, a.precision)?;
    let g = ctx.gamma_rational(&x)?;
    let digits: Vec<String> = g.digits().iter().map(u64::to_string).collect();
    writeln!(out, "Gamma_{}({}) mod {}^{} = {}", a.p, format_rational(&x), a.p, a.precision, g.value())?;
    writeln!(out, "digits: {}", digits.join(","))?;
    Ok(EXIT_PASS)
}

fn cmd_sum(a: &SumArgs, out: &mut dyn Write) -> Outcome {
    if a.modular {
        let p = need(a.p, "p")?;
        let v = sum_s_modular(a.d, a.m, p, a.precision)?;
        writeln!(out, "S_{}({}) = {} (mod p^{} on the unit)", a.d, a.m, v, a.precision)?;
    } else {
        let s = sum_s_general(a.d, a.m)?;
        writeln!(out, "S_{}({}) = {}", a.d, a.m, format_rational(&s))?;
        if let Some(p) = a.p {
            let v = ValuedNumber::from_rational(&s, p, a.precision)?;
            writeln!(out, "vp = {}", vp(&s, p))?;
            writeln!(out, "valued = {v}")?;
        }
    }
    if let Some(tol) = a.tolerance {
        if a.d != 4 {
            return Err(Failure::Invalid("--tolerance applies to d = 4 only".into()));
        }
        let rep = archimedean_sanity(a.m, tol);
        writeln!(out, "float = {:.12}, 2*sqrt(2)/pi = {:.12}, error = {:.3e}, pass = {}", rep.value, rep.target, rep.error, rep.pass)?;
        return Ok(verdict(rep.pass));
    }
    Ok(EXIT_PASS)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let id = ClaimId::new(a.claim, a.p, a.r, a.d)?;
    let report = verify_claim(&id, VerifyOptions { precision: a.precision, path: a.path.into() })?;
    let record = ResultRecord::from_report(&report);
    match a.format {
        VerifyFormat::Json => writeln!(out, "{}", record_to_json(&record))?,
        VerifyFormat::Csv => write_records(&mut *out, &[record], RecordFormat::Csv)?,
        VerifyFormat::Text => {
            writeln!(out, "{id}: {} ≡ {} (mod {}^{})", report.lhs, report.rhs, id.p, report.modulus_exp)?;
            writeln!(
                out,
                "m = {}, residual valuation = {}{}, {}",
                report.m,
                report.residual_valuation,
                if report.residual_exact { "" } else { " (lower bound)" },
                if report.pass { "PASS" } else { "FAIL" }
            )?;
        }
    }
    Ok(verdict(report.pass))
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let spec = SweepSpec {
        claim: a.claim,
        p_min: a.p_min,
        p_max: a.p_max,
        residue: a.residue.map(|res| (res, a.residue_modulus)),
        exponents: a.r.clone(),
        divisors: a.d.clone(),
        precision: a.precision,
        path: a.path.into(),
        jobs: a.jobs,
        reproducible: a.reproducible,
    };
    let records = run_sweep(&spec)?;
    let path = a
        .output
        .clone()
        .unwrap_or_else(|| a.output_dir.join(format!("sweep-{}.{}", a.claim, a.format.extension())));
    write_records_to_path(&path, &records, a.format)?;
    let summary = SweepSummary::of(&records);
    if records.is_empty() {
        writeln!(err, "warning: no admissible parameters for {}; wrote empty {}", a.claim, path.display())?;
    }
    let min = summary.min_residual.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    writeln!(
        out,
        "{}: {} records, {} pass, {} fail, min residual {}, output {}",
        a.claim,
        summary.records,
        summary.passed,
        summary.failed,
        min,
        path.display()
    )?;
    Ok(verdict(summary.failed == 0))
}

fn cmd_wz(a: &WzArgs, out: &mut dyn Write) -> Outcome {
    match a.check {
        WzCheck::Grid => {
            let rep = wz::check_telescoping_grid(a.nmax, a.kmax)?;
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::Certificate => {
            let rep = wz::check_ratio_certificate();
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::Lemma32 => {
            let rep = wz::check_lemma32(need(a.p, "p")?, need(a.r, "r")?)?;
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::Lemma33 => {
            let rep = wz::check_lemma33(need(a.p, "p")?, need(a.r, "r")?, a.precision)?;
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::Indices => {
            let rep = wz::check_least_p_factor_indices(need(a.p, "p")?, a.r.unwrap_or(3))?;
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::ColumnSums => {
            let rep = wz::check_column_sums(need(a.p, "p")?, need(a.r, "r")?)?;
            print_json(out, &rep)?;
            Ok(verdict(rep.pass))
        }
        WzCheck::Lemma23 => {
            let (p, r) = (need(a.p, "p")?, need(a.r, "r")?);
            let which: Vec<Lemma23Identity> = if a.which == "all" {
                Lemma23Identity::ALL.to_vec()
            } else {
                vec![Lemma23Identity::parse(&a.which)?]
            };
            let reports = which
                .into_iter()
                .map(|w| check_lemma23(p, r, w, a.precision))
                .collect::<Result<Vec<_>, _>>()?;
            print_json(out, &reports)?;
            Ok(verdict(reports.iter().all(|r| r.pass)))
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code: 0 pass, 1 congruence failure, 2 invalid input, 3 internal error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    let outcome = match &cli.command {
        Command::Gamma(a) => cmd_gamma(a, out),
        Command::Sum(a) => cmd_sum(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Wz(a) => cmd_wz(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
