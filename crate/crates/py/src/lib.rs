//! Python bindings. Rationals cross the boundary as strings (`"-3/4"`, `"5"`),
//! so `fractions.Fraction` and `int` both work via `str()`. Reports come back as dicts.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use supercong_core::exact_arith::{self, format_rational, parse_rational, Rational, Valuation};
use supercong_core::padic_gamma;
use supercong_core::pochhammer::{self, Lemma23Identity};
use supercong_core::supercongruence::{self, ClaimId, ClaimKind, SumPath, VerifyOptions};
use supercong_core::{wz, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::PrecisionLoss { .. } | Error::MismatchedModulus(..) | Error::DegenerateDenominator(..) => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&x.str()?.to_cow()?).map_err(to_py)
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    PyModule::import(py, "fractions")?.getattr("Fraction")?.call1((format_rational(q),))
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.getattr("loads")?.call1((text,))
}

/// Γ_p values modulo p^precision, memoized per context.
#[pyclass(frozen)]
struct GammaContext(padic_gamma::GammaContext);

#[pymethods]
impl GammaContext {
    #[new]
    fn new(p: u64, precision: u32) -> PyResult<Self> {
        padic_gamma::GammaContext::new(p, precision).map(Self).map_err(to_py)
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.0.modulus()
    }

    fn gamma_int(&self, n: u64) -> PyResult<u64> {
        self.0.gamma_int(n).map(|r| r.value()).map_err(to_py)
    }

    fn gamma(&self, x: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.0.gamma_rational(&rational(x)?).map(|r| r.value()).map_err(to_py)
    }

    fn digits(&self, x: &Bound<'_, PyAny>) -> PyResult<Vec<u64>> {
        self.0.gamma_rational(&rational(x)?).map(|r| r.digits()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GammaContext(p={}, precision={})", self.0.p(), self.0.precision())
    }
}

/// Γ_p(x) mod p^precision as an integer in [0, p^precision).
#[pyfunction]
#[pyo3(signature = (p, x, precision = 1))]
fn gamma(p: u64, x: &Bound<'_, PyAny>, precision: u32) -> PyResult<u64> {
    let ctx = padic_gamma::GammaContext::new(p, precision).map_err(to_py)?;
    ctx.gamma_rational(&rational(x)?).map(|r| r.value()).map_err(to_py)
}

#[pyfunction]
fn a0(x: &Bound<'_, PyAny>, p: u64) -> PyResult<u64> {
    padic_gamma::a0(&rational(x)?, p).map(|w| w.a0).map_err(to_py)
}

/// p-adic valuation; `None` for zero.
#[pyfunction]
fn vp(x: &Bound<'_, PyAny>, p: u64) -> PyResult<Option<i64>> {
    exact_arith::ensure_odd_prime(p).map_err(to_py)?;
    Ok(match exact_arith::vp(&rational(x)?, p) {
        Valuation::Finite(v) => Some(v),
        Valuation::Infinite => None,
    })
}

#[pyfunction]
fn rising<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, n: u64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &pochhammer::rising(&rational(a)?, n))
}

#[pyfunction]
#[pyo3(signature = (m, d = 4))]
fn sum_s<'py>(py: Python<'py>, m: u64, d: u64) -> PyResult<Bound<'py, PyAny>> {
    let s = py.detach(|| supercongruence::sum_s_general(d, m)).map_err(to_py)?;
    fraction(py, &s)
}

/// Whether `a ≡ b (mod p^r)`, with the valuation of `a - b` (`None` if equal).
#[pyfunction]
fn congruent(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, p: u64, r: i64) -> PyResult<(bool, Option<i64>)> {
    exact_arith::ensure_odd_prime(p).map_err(to_py)?;
    let c = exact_arith::congruent(&rational(a)?, &rational(b)?, p, r);
    Ok((c.holds, c.residual.finite()))
}

#[pyfunction]
#[pyo3(signature = (claim, p, r = 1, d = 4, precision = None, path = "auto"))]
fn verify_claim<'py>(
    py: Python<'py>,
    claim: &str,
    p: u64,
    r: u32,
    d: u64,
    precision: Option<u32>,
    path: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: ClaimKind = claim.parse().map_err(to_py)?;
    let path = match path {
        "auto" => SumPath::Auto,
        "exact" => SumPath::Exact,
        "modular" => SumPath::Modular,
        other => return Err(PyValueError::new_err(format!("unknown path {other:?}"))),
    };
    let id = ClaimId::new(kind, p, r, d).map_err(to_py)?;
    let report = py
        .detach(|| supercongruence::verify_claim(&id, VerifyOptions { precision, path }))
        .map_err(to_py)?;
    to_dict(py, &report)
}

#[pyfunction]
fn claim_names() -> Vec<&'static str> {
    ClaimKind::ALL.iter().map(|k| k.name()).collect()
}

#[pyfunction]
#[pyo3(signature = (n_max = 25, k_max = 25))]
fn check_telescoping_grid<'py>(py: Python<'py>, n_max: u64, k_max: u64) -> PyResult<Bound<'py, PyAny>> {
    let rep = py.detach(|| wz::check_telescoping_grid(n_max, k_max)).map_err(to_py)?;
    to_dict(py, &rep)
}

#[pyfunction]
fn check_ratio_certificate(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let rep = py.detach(wz::check_ratio_certificate);
    to_dict(py, &rep)
}

#[pyfunction]
fn check_lemma32(py: Python<'_>, p: u64, r: u32) -> PyResult<Bound<'_, PyAny>> {
    let rep = py.detach(|| wz::check_lemma32(p, r)).map_err(to_py)?;
    to_dict(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (p, r, precision = None))]
fn check_lemma33(py: Python<'_>, p: u64, r: u32, precision: Option<u32>) -> PyResult<Bound<'_, PyAny>> {
    let rep = py.detach(|| wz::check_lemma33(p, r, precision)).map_err(to_py)?;
    to_dict(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (p, r, which, precision = None))]
fn check_lemma23<'py>(py: Python<'py>, p: u64, r: u32, which: &str, precision: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let which = Lemma23Identity::parse(which).map_err(to_py)?;
    let rep = py.detach(|| pochhammer::check_lemma23(p, r, which, precision)).map_err(to_py)?;
    to_dict(py, &rep)
}

#[pymodule]
fn supercong(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GammaContext>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(a0, m)?)?;
    m.add_function(wrap_pyfunction!(vp, m)?)?;
    m.add_function(wrap_pyfunction!(rising, m)?)?;
    m.add_function(wrap_pyfunction!(sum_s, m)?)?;
    m.add_function(wrap_pyfunction!(congruent, m)?)?;
    m.add_function(wrap_pyfunction!(verify_claim, m)?)?;
    m.add_function(wrap_pyfunction!(claim_names, m)?)?;
    m.add_function(wrap_pyfunction!(check_telescoping_grid, m)?)?;
    m.add_function(wrap_pyfunction!(check_ratio_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma32, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma33, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma23, m)?)?;
    Ok(())
}
