//! Python bindings. Real results are returned as decimal strings with the
//! requested number of significant digits, integers as Python ints.

use std::collections::BTreeMap;
use std::str::FromStr;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyInt;

use rpe_core::algebra::{
    branch_search as core_branch_search, lll_reduce as core_lll, radical_eval as core_radical_eval,
    real_roots as core_real_roots, recognize_min_poly, BranchAssignment, IntLattice, IntPolynomial,
    RadicalExpr,
};
use rpe_core::elliptic::SingularValueIndex;
use rpe_core::elliptic::{
    elliptic_alpha, lambda_star as core_lambda_star, pi_reference, LambdaMethod,
};
use rpe_core::numtheory::{
    class_number_forms, class_number_sum, kronecker as core_kronecker, Discriminant,
};
use rpe_core::params::{params_negative, params_positive};
use rpe_core::precision::{stabilize, DEFAULT_GUARD};
use rpe_core::series::{eval_chudnovsky_binsplit, pi_from_series};
use rpe_core::verify::{bg163_closed_form_params, r243_printed_params, verify_all, Suite};
use rpe_core::{BigInt, BigRational, Error, PrecReal};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::Domain(_)
        | Error::RootIndex { .. } => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn context(digits: u32) -> PyResult<rpe_core::PrecisionContext> {
    rpe_core::PrecisionContext::try_new(digits, DEFAULT_GUARD).map_err(to_py)
}

fn big_from_py(obj: &Bound<'_, PyAny>) -> PyResult<BigInt> {
    let text = obj.str()?;
    BigInt::from_str(text.to_str()?)
        .map_err(|e| PyValueError::new_err(format!("expected an integer, got {text}: {e}")))
}

fn big_to_py<'py>(py: Python<'py>, v: &BigInt) -> PyResult<Bound<'py, PyAny>> {
    py.get_type::<PyInt>().call1((v.to_string(),))
}

fn index_from_py(obj: &Bound<'_, PyAny>) -> PyResult<SingularValueIndex> {
    SingularValueIndex::from_str(obj.str()?.to_str()?).map_err(to_py)
}

fn poly_from_py(coeffs: &[Bound<'_, PyAny>]) -> PyResult<IntPolynomial> {
    Ok(IntPolynomial::new(
        coeffs.iter().map(big_from_py).collect::<PyResult<_>>()?,
    ))
}

fn decimal(v: &PrecReal, digits: u32) -> String {
    v.to_decimal_string(digits as usize)
}

/// Working precision for `digits` significant decimal digits.
#[pyclass(frozen, name = "PrecisionContext")]
struct PyPrecisionContext {
    inner: rpe_core::PrecisionContext,
}

#[pymethods]
impl PyPrecisionContext {
    #[new]
    #[pyo3(signature = (digits, guard = DEFAULT_GUARD))]
    fn new(digits: u32, guard: u32) -> PyResult<Self> {
        let inner = rpe_core::PrecisionContext::try_new(digits, guard).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn digits(&self) -> u32 {
        self.inner.digits()
    }

    #[getter]
    fn guard(&self) -> u32 {
        self.inner.guard()
    }

    #[getter]
    fn bits(&self) -> u32 {
        self.inner.bits()
    }

    /// Decimal exponent `e` of the comparison tolerance `10^-e`.
    #[getter]
    fn tolerance_exponent(&self) -> i64 {
        self.inner.tolerance_exponent()
    }

    fn __repr__(&self) -> String {
        format!(
            "PrecisionContext(digits={}, guard={}, bits={})",
            self.inner.digits(),
            self.inner.guard(),
            self.inner.bits()
        )
    }
}

/// Parameters `(z, a, b)` of a level-1 series at index `r`.
#[pyclass(frozen, get_all, name = "SeriesParams")]
struct PySeriesParams {
    r: String,
    family: String,
    z: String,
    a: String,
    b: String,
}

#[pymethods]
impl PySeriesParams {
    fn __repr__(&self) -> String {
        format!(
            "SeriesParams(r={}, family={}, z={}, a={}, b={})",
            self.r, self.family, self.z, self.a, self.b
        )
    }
}

#[pyclass(frozen, get_all, name = "CheckResult")]
struct PyCheckResult {
    name: String,
    residual: String,
    tolerance: String,
    passed: bool,
    precision_used: u32,
}

#[pymethods]
impl PyCheckResult {
    fn __repr__(&self) -> String {
        let verdict = if self.passed { "pass" } else { "fail" };
        format!(
            "CheckResult({}, residual={}, {verdict})",
            self.name, self.residual
        )
    }
}

#[pyclass(frozen, name = "VerificationReport")]
struct PyVerificationReport {
    inner: rpe_core::verify::VerificationReport,
}

#[pymethods]
impl PyVerificationReport {
    #[getter]
    fn suite(&self) -> &str {
        &self.inner.suite
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.precision
    }

    #[getter]
    fn overall(&self) -> bool {
        self.inner.overall
    }

    #[getter]
    fn notes(&self) -> BTreeMap<String, String> {
        self.inner.notes.clone()
    }

    #[getter]
    fn checks(&self) -> Vec<PyCheckResult> {
        self.inner
            .checks
            .iter()
            .map(|c| PyCheckResult {
                name: c.name.clone(),
                residual: c.residual.to_sci_string(6),
                tolerance: c.tolerance.to_sci_string(6),
                passed: c.pass,
                precision_used: c.precision_used,
            })
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __bool__(&self) -> bool {
        self.inner.overall
    }
}

/// π to `digits` significant digits.
#[pyfunction]
#[pyo3(signature = (digits, method = "chudnovsky", workers = 1))]
fn pi(py: Python<'_>, digits: u32, method: &str, workers: usize) -> PyResult<String> {
    let ctx = context(digits)?;
    let method = method.to_owned();
    py.detach(move || match method.as_str() {
        "chudnovsky" => Ok(eval_chudnovsky_binsplit(digits, workers.max(1))),
        "agm" => Ok(decimal(&pi_reference(&ctx), digits)),
        "bg163" => bg163_closed_form_params(&ctx)
            .and_then(|p| pi_from_series(&p, &ctx))
            .map(|v| decimal(&v, digits))
            .map_err(to_py),
        "r243" => r243_printed_params(&ctx)
            .and_then(|p| pi_from_series(&p, &ctx))
            .map(|v| decimal(&v, digits))
            .map_err(to_py),
        other => Err(PyValueError::new_err(format!(
            "unknown method {other:?} (chudnovsky, bg163, r243, agm)"
        ))),
    })
}

/// Singular modulus λ*(r) for rational `r >= 1`.
#[pyfunction]
#[pyo3(signature = (r, digits, method = "theta"))]
fn lambda_star(r: &Bound<'_, PyAny>, digits: u32, method: &str) -> PyResult<String> {
    let r = index_from_py(r)?;
    let m = match method {
        "theta" => LambdaMethod::Theta,
        "bisect" => LambdaMethod::AgmBisect,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let ctx = context(digits)?;
    let k = stabilize(&ctx, |c| Ok(core_lambda_star(&r, m, c)?.into_inner())).map_err(to_py)?;
    Ok(decimal(&k, digits))
}

/// Elliptic alpha function α(r).
#[pyfunction]
fn alpha(r: &Bound<'_, PyAny>, digits: u32) -> PyResult<String> {
    let r = index_from_py(r)?;
    let ctx = context(digits)?;
    let a = stabilize(&ctx, |c| elliptic_alpha(&r, c)).map_err(to_py)?;
    Ok(decimal(&a, digits))
}

/// Series parameters for `family` in {"pos", "neg"}.
#[pyfunction]
fn series_params(r: &Bound<'_, PyAny>, family: &str, digits: u32) -> PyResult<PySeriesParams> {
    let r = index_from_py(r)?;
    let ctx = context(digits)?;
    let p = match family {
        "pos" => params_positive(&r, &ctx),
        "neg" => params_negative(&r, &ctx),
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    }
    .map_err(to_py)?;
    Ok(PySeriesParams {
        r: p.r.to_string(),
        family: family.to_owned(),
        z: decimal(&p.z, digits),
        a: decimal(&p.a, digits),
        b: decimal(&p.b, digits),
    })
}

/// Runs a named verification suite, or all of them with `"all"`.
#[pyfunction]
fn verify(py: Python<'_>, suite: &str, digits: u32) -> PyResult<PyVerificationReport> {
    let ctx = context(digits)?;
    let report = if suite == "all" {
        py.detach(|| verify_all(&ctx))
    } else {
        let s = Suite::from_str(suite).map_err(to_py)?;
        py.detach(|| s.run(&ctx))
    }
    .map_err(to_py)?;
    Ok(PyVerificationReport { inner: report })
}

/// Coefficients (constant term first) of an integer polynomial of degree
/// at most `degree` vanishing at the decimal `value`, or None.
#[pyfunction]
fn recognize<'py>(
    py: Python<'py>,
    value: &str,
    degree: usize,
    digits: u32,
) -> PyResult<Option<Vec<Bound<'py, PyAny>>>> {
    let ctx = context(digits)?;
    let v = PrecReal::parse(value, &ctx).map_err(to_py)?;
    match recognize_min_poly(&v, degree, &ctx) {
        Some(q) => Ok(Some(
            q.coeffs()
                .iter()
                .map(|c| big_to_py(py, c))
                .collect::<PyResult<_>>()?,
        )),
        None => Ok(None),
    }
}

/// Real roots of an integer polynomial (constant term first), ascending.
#[pyfunction]
fn real_roots(coeffs: Vec<Bound<'_, PyAny>>, digits: u32) -> PyResult<Vec<String>> {
    let p = poly_from_py(&coeffs)?;
    let ctx = context(digits)?;
    let roots = core_real_roots(&p, &ctx).map_err(to_py)?;
    Ok(roots.iter().map(|r| decimal(&r.value, digits)).collect())
}

/// LLL-reduces integer row vectors with Lovász parameter `delta` (a
/// rational string such as "3/4").
#[pyfunction]
#[pyo3(signature = (rows, delta = "99/100"))]
fn lll_reduce<'py>(
    py: Python<'py>,
    rows: Vec<Vec<Bound<'py, PyAny>>>,
    delta: &str,
) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(big_from_py).collect::<PyResult<Vec<_>>>())
        .collect::<PyResult<Vec<_>>>()?;
    let delta = BigRational::from_str(delta)
        .map_err(|e| PyValueError::new_err(format!("delta {delta:?}: {e}")))?;
    let lattice = IntLattice::new(rows).map_err(to_py)?;
    let reduced = core_lll(&lattice, &delta).map_err(to_py)?;
    reduced
        .rows
        .iter()
        .map(|r| r.iter().map(|v| big_to_py(py, v)).collect())
        .collect()
}

/// Evaluates a radical expression; returns `(re, im)` decimal strings.
#[pyfunction]
#[pyo3(signature = (expr, digits, branches = None))]
fn radical_eval(expr: &str, digits: u32, branches: Option<Vec<u32>>) -> PyResult<(String, String)> {
    let e = RadicalExpr::parse(expr).map_err(to_py)?;
    let br = branches.map_or_else(|| BranchAssignment::default_for(&e), BranchAssignment);
    let ctx = context(digits)?;
    let v = core_radical_eval(&e, &br, &ctx).map_err(to_py)?;
    Ok((decimal(&v.re, digits), decimal(&v.im, digits)))
}

/// First branch assignment (lexicographic) under which `expr` equals the
/// decimal `target`, or None.
#[pyfunction]
fn branch_search(
    py: Python<'_>,
    expr: &str,
    target: &str,
    digits: u32,
) -> PyResult<Option<Vec<u32>>> {
    let e = RadicalExpr::parse(expr).map_err(to_py)?;
    let ctx = context(digits)?;
    let t = PrecReal::parse(target, &ctx).map_err(to_py)?;
    Ok(py.detach(|| core_branch_search(&e, &t, &ctx)).map(|b| b.0))
}

/// Kronecker symbol (a/n).
#[pyfunction]
fn kronecker(a: &Bound<'_, PyAny>, n: &Bound<'_, PyAny>) -> PyResult<i32> {
    Ok(core_kronecker(&big_from_py(a)?, &big_from_py(n)?))
}

/// Class number h(-d) from the character sum; with `oracle=True` it is
/// cross-checked against a reduced-form count.
#[pyfunction]
#[pyo3(signature = (d, oracle = false))]
fn class_number(d: u64, oracle: bool) -> PyResult<u64> {
    let d = Discriminant::new(d).map_err(to_py)?;
    let h = class_number_sum(d).map_err(to_py)?;
    if oracle {
        let forms = class_number_forms(d);
        if forms != h {
            return Err(PyArithmeticError::new_err(format!(
                "class number of {d}: sum gives {h}, forms give {forms}"
            )));
        }
    }
    Ok(h)
}

#[pymodule]
fn rpe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPrecisionContext>()?;
    m.add_class::<PySeriesParams>()?;
    m.add_class::<PyCheckResult>()?;
    m.add_class::<PyVerificationReport>()?;
    m.add_function(wrap_pyfunction!(pi, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(series_params, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(recognize, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(lll_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(radical_eval, m)?)?;
    m.add_function(wrap_pyfunction!(branch_search, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    Ok(())
}
