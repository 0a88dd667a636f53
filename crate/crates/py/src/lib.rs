//! Python bindings. Rationals cross the boundary as `"p/q"` strings so nothing
//! is silently rounded; floats are used only where the core uses them.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use polya::bessel::{self, Side, ZeroKind};
use polya::enclosures::Precision;
use polya::gapcert;
use polya::lattice;
use polya::rational::{format_rational, parse_rational, Rational};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(v: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn parse(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(value_err)
}

fn side(s: &str) -> PyResult<Side> {
    s.parse().map_err(|_| PyValueError::new_err(format!("side must be dirichlet or neumann, got {s}")))
}

/// Magnetic flux `alpha` in `[0, 1/2]`.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Flux(lattice::Flux);

#[pymethods]
impl Flux {
    #[new]
    fn new(alpha: &str) -> PyResult<Self> {
        lattice::Flux::new(parse(alpha)?).map(Flux).map_err(value_err)
    }

    #[getter]
    fn value(&self) -> String {
        format_rational(self.0.value())
    }

    fn complement(&self) -> String {
        format_rational(&self.0.complement())
    }

    fn __float__(&self) -> f64 {
        self.0.as_f64()
    }

    fn __repr__(&self) -> String {
        format!("Flux('{}')", self.0)
    }
}

/// A certified gap chain.
#[pyclass(frozen, skip_from_py_object)]
struct GapChain(gapcert::GapChain);

#[pymethods]
impl GapChain {
    /// `(lambda, q_low, e_low, d_low)` per step.
    #[getter]
    fn steps(&self) -> Vec<(String, i64, String, String)> {
        self.0
            .steps
            .iter()
            .map(|s| (format_rational(&s.lambda), s.q_low, format_rational(&s.e_low), format_rational(&s.d_low)))
            .collect()
    }

    #[getter]
    fn end(&self) -> String {
        format_rational(&self.0.end)
    }

    fn __len__(&self) -> usize {
        self.0.steps.len()
    }

    /// Re-derives every row at a finer precision; raises on any failure.
    fn recheck(&self) -> PyResult<()> {
        gapcert::recheck_chain(&self.0).map_err(PyRuntimeError::new_err)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.0)
    }
}

#[pyfunction]
fn g_eval(lambda: f64, z: f64) -> f64 {
    polya::gfun::g_eval_float(lambda, z)
}

/// Enclosure `(lo, hi)` of `G_lambda(z)` of width at most `2^-bits`.
#[pyfunction]
#[pyo3(signature = (lambda, z, bits = 40))]
fn g_eval_certified(lambda: &str, z: &str, bits: u32) -> PyResult<(String, String)> {
    let iv = polya::gfun::g_eval_certified(&parse(lambda)?, &parse(z)?, &Precision::from_bits(bits))
        .map_err(value_err)?;
    Ok((format_rational(iv.lo()), format_rational(iv.hi())))
}

/// `(Q(lambda), exact)`; `exact` is false when some floor stayed unresolved
/// and the returned value is only a lower bound.
#[pyfunction]
#[pyo3(signature = (lambda, bits = 40))]
fn q_count(lambda: &str, bits: u32) -> PyResult<(i64, bool)> {
    let q = lattice::q_count_with(&parse(lambda)?, &Precision::from_bits(bits)).map_err(value_err)?;
    Ok((q.value, q.exact))
}

#[pyfunction]
fn p_dirichlet(lambda: f64, alpha: &Flux) -> i64 {
    lattice::p_dirichlet(lambda, &alpha.0)
}

#[pyfunction]
fn p_neumann(lambda: f64, alpha: &Flux) -> i64 {
    lattice::p_neumann(lambda, &alpha.0)
}

/// k-th positive zero of `J_nu`, or of `J'_nu` when `derivative` is set.
#[pyfunction]
#[pyo3(signature = (nu, k, derivative = false))]
fn bessel_zero(nu: f64, k: usize, derivative: bool) -> PyResult<f64> {
    let kind = if derivative { ZeroKind::Derivative } else { ZeroKind::Function };
    bessel::bessel_zero(nu, k, kind).map_err(value_err)
}

/// Eigenvalue square roots `(i, k, value)` below `lambda_max`, sorted.
#[pyfunction]
fn ab_spectrum(side_name: &str, alpha: &Flux, lambda_max: f64) -> PyResult<Vec<(i64, usize, f64)>> {
    let s = side(side_name)?;
    Ok(bessel::ab_spectrum(s, &alpha.0, lambda_max)
        .into_iter()
        .map(|e| (e.i, e.k, e.value))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (start, target, bits = 40))]
fn run_chain(start: &str, target: &str, bits: u32) -> PyResult<GapChain> {
    gapcert::run_chain(&parse(start)?, &parse(target)?, &Precision::from_bits(bits))
        .map(GapChain)
        .map_err(value_err)
}

/// Validates the built-in table, or the CSV text given. Returns the report
/// as JSON; `passed` tells whether every row held.
#[pyfunction]
#[pyo3(signature = (csv_text = None, bits = 40))]
fn validate_table(csv_text: Option<&str>, bits: u32) -> PyResult<(bool, String)> {
    let rows = match csv_text {
        Some(t) => gapcert::parse_table(t).map_err(value_err)?,
        None => gapcert::table1(),
    };
    let report = gapcert::validate_table(&rows, &Precision::from_bits(bits));
    Ok((report.passed(), to_json(&report)?))
}

#[pyfunction]
#[pyo3(signature = (bits = 40))]
fn certify_small_lambda(bits: u32) -> PyResult<String> {
    to_json(&gapcert::certify_small_lambda(&Precision::from_bits(bits)).map_err(value_err)?)
}

#[pyfunction]
#[pyo3(signature = (bits = 40))]
fn certify_large_lambda(bits: u32) -> PyResult<String> {
    to_json(&gapcert::certify_large_lambda(&Precision::from_bits(bits)).map_err(value_err)?)
}

/// Polya sweep up to `n_max`; returns the report as JSON.
#[pyfunction]
fn verify_polya(side_name: &str, alpha: &Flux, n_max: usize) -> PyResult<String> {
    if n_max == 0 {
        return Err(PyValueError::new_err("n_max must be at least 1"));
    }
    let report = match side(side_name)? {
        Side::Dirichlet => polya::verify::verify_polya_dirichlet(&alpha.0, n_max),
        Side::Neumann => polya::verify::verify_polya_neumann(&alpha.0, n_max),
    };
    to_json(&report)
}

#[pymodule]
fn ab_polya(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Flux>()?;
    m.add_class::<GapChain>()?;
    m.add_function(wrap_pyfunction!(g_eval, m)?)?;
    m.add_function(wrap_pyfunction!(g_eval_certified, m)?)?;
    m.add_function(wrap_pyfunction!(q_count, m)?)?;
    m.add_function(wrap_pyfunction!(p_dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(p_neumann, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    m.add_function(wrap_pyfunction!(ab_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(validate_table, m)?)?;
    m.add_function(wrap_pyfunction!(certify_small_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(certify_large_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(verify_polya, m)?)?;
    Ok(())
}
