//! Python bindings: curves, the exact constructions, the numerical H
//! function and the verification suites.

use std::sync::Arc;

use hyperbaker::baker::{self, DivisorSpec};
use hyperbaker::curve::{parse_curve_json, CurveInput, CurveV};
use hyperbaker::error::HarnessError;
use hyperbaker::harness::report::{canonical_string, fingerprint};
use hyperbaker::harness::{self, parse_precision, run_suite, RunConfig, Suite};
use hyperbaker::hfunc::{HEvaluator, Route};
use hyperbaker::numerics::periods::ExactStage;
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn harness_err(e: HarnessError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> PyErr {
    PyArithmeticError::new_err(e.to_string())
}

/// Hand a JSON value to Python through the json module.
fn to_python(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (canonical_string(v),))?.unbind())
}

/// A curve y^2 = N(x) of genus g with a chosen branch point a.
#[pyclass(name = "Curve", module = "hyperbaker_py", frozen)]
struct PyCurve {
    input: Arc<CurveInput>,
}

#[pymethods]
impl PyCurve {
    /// `nu` lists nu_0 .. nu_{4g+4} (ints or "p/q" strings), `a` a rational root of N.
    #[new]
    fn new(genus: usize, nu: Vec<String>, a: String) -> PyResult<Self> {
        let text = serde_json::json!({"genus": genus, "nu": nu, "branch_point": a}).to_string();
        Self::from_json(&text)
    }

    /// Parse the curve file format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCurve { input: Arc::new(parse_curve_json(text).map_err(harness_err)?) })
    }

    /// Random curve with rational coefficients and a rational branch point.
    #[staticmethod]
    fn random(genus: usize, seed: u64) -> PyResult<Self> {
        if !(1..=3).contains(&genus) {
            return Err(PyValueError::new_err("genus must be 1, 2 or 3"));
        }
        Ok(PyCurve { input: Arc::new(CurveInput { curve: CurveV::random_rational(genus, seed), scaling: None }) })
    }

    #[getter]
    fn genus(&self) -> usize {
        self.input.curve.genus()
    }

    #[getter]
    fn fingerprint(&self) -> String {
        fingerprint(&self.input.curve.canonical_json())
    }

    fn to_json(&self) -> String {
        self.input.curve.canonical_json()
    }

    /// Roots of N, sorted by real then imaginary part.
    fn roots(&self) -> PyResult<Vec<Complex64>> {
        self.input.curve.roots().map_err(numeric_err)
    }

    fn __repr__(&self) -> String {
        format!("Curve({})", self.input.curve.canonical_json())
    }
}

fn source(curve: Option<&PyCurve>) -> Option<&CurveInput> {
    curve.map(|c| c.input.as_ref())
}

/// The Baker matrix P as strings; generic when no curve is given, at
/// rational x-coordinates when `xs` is given.
#[pyfunction]
#[pyo3(signature = (curve=None, genus=1, xs=None))]
fn baker_matrix(curve: Option<&PyCurve>, genus: usize, xs: Option<Vec<String>>) -> PyResult<Vec<Vec<String>>> {
    let sym = harness::symbols_for(source(curve), genus).map_err(harness_err)?;
    let spec = match xs {
        None => DivisorSpec::Symbolic,
        Some(v) => DivisorSpec::Concrete(
            v.iter()
                .map(|s| s.parse().map_err(|_| PyValueError::new_err(format!("cannot parse {s:?}"))))
                .collect::<PyResult<_>>()?,
        ),
    };
    let bm = baker::baker_matrix(&sym, &spec).map_err(numeric_err)?;
    Ok(bm.entries.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect())
}

/// Omega, chi, D, lambda~ and the kappa numerators as a dict of strings.
#[pyfunction]
#[pyo3(signature = (curve=None, genus=1))]
fn omega(py: Python<'_>, curve: Option<&PyCurve>, genus: usize) -> PyResult<Py<PyAny>> {
    to_python(py, &harness::omega_json(source(curve), genus).map_err(harness_err)?)
}

/// Coefficients of the genus-1 expansion of H in v_2, lowest first.
#[pyfunction]
#[pyo3(signature = (curve=None, order=12))]
fn h_series(curve: Option<&PyCurve>, order: usize) -> PyResult<Vec<String>> {
    let v = harness::expand_json(source(curve), order).map_err(harness_err)?;
    Ok(v["coefficients"].as_array().into_iter().flatten().filter_map(|c| c.as_str().map(String::from)).collect())
}

/// Period matrices as a dict; complex entries are [re, im] pairs.
#[pyfunction]
#[pyo3(signature = (curve, precision="double"))]
fn periods(py: Python<'_>, curve: &PyCurve, precision: &str) -> PyResult<Py<PyAny>> {
    let p = parse_precision(precision).map_err(harness_err)?;
    to_python(py, &harness::periods_json(&curve.input, p).map_err(harness_err)?)
}

/// Run a verification suite and return the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite="all", curve=None, genus=1, seed=0, symbolic=false, precision="double"))]
fn verify(
    py: Python<'_>,
    suite: &str,
    curve: Option<&PyCurve>,
    genus: usize,
    seed: u64,
    symbolic: bool,
    precision: &str,
) -> PyResult<Py<PyAny>> {
    let mut cfg = RunConfig::new(suite.parse::<Suite>().map_err(harness_err)?, genus, seed);
    cfg.symbolic = symbolic;
    cfg.precision = parse_precision(precision).map_err(harness_err)?;
    if let Some(c) = curve {
        cfg = cfg.with_input(CurveInput { curve: c.input.curve.clone(), scaling: c.input.scaling.clone() });
    }
    let r = py.detach(|| run_suite(&cfg)).map_err(harness_err)?;
    to_python(py, &r.to_json())
}

/// H(v) and its derivatives for one curve.
#[pyclass(name = "HFunction", module = "hyperbaker_py", frozen)]
struct PyHFunction {
    h: HEvaluator,
}

fn route(name: &str) -> PyResult<Route> {
    match name {
        "theta" => Ok(Route::Theta),
        "definition" => Ok(Route::Definition),
        _ => Err(PyValueError::new_err("route must be 'theta' or 'definition'")),
    }
}

impl PyHFunction {
    fn check_len(&self, v: &[Complex64]) -> PyResult<()> {
        if v.len() != self.h.genus() {
            return Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.h.genus(), v.len())));
        }
        Ok(())
    }
}

#[pymethods]
impl PyHFunction {
    #[new]
    #[pyo3(signature = (curve, precision="double", seed=0))]
    fn new(py: Python<'_>, curve: &PyCurve, precision: &str, seed: u64) -> PyResult<Self> {
        let p = parse_precision(precision).map_err(harness_err)?;
        let input = curve.input.clone();
        let h = py
            .detach(move || {
                let st = Arc::new(ExactStage::new(&input.curve)?);
                match &input.scaling {
                    Some((s, t)) => {
                        let num = hyperbaker::curve::NumericScalars::with_scaling(
                            &input.curve,
                            Complex64::new(s.to_f64(), 0.0),
                            Complex64::new(t.to_f64(), 0.0),
                        );
                        HEvaluator::new(st, &num, p, seed)
                    }
                    None => HEvaluator::for_curve(st, p, seed),
                }
            })
            .map_err(numeric_err)?;
        Ok(PyHFunction { h })
    }

    #[getter]
    fn genus(&self) -> usize {
        self.h.genus()
    }

    /// H(v), v = (v_{2g}, ..., v_2).
    #[pyo3(signature = (v, route="theta"))]
    fn __call__(&self, v: Vec<Complex64>, route: &str) -> PyResult<Complex64> {
        self.check_len(&v)?;
        self.h.h_eval(&v, self::route(route)?).map_err(numeric_err)
    }

    /// log H(v) on some branch.
    #[pyo3(signature = (v, route="theta"))]
    fn log_h(&self, v: Vec<Complex64>, route: &str) -> PyResult<Complex64> {
        self.check_len(&v)?;
        self.h.log_h(&v, self::route(route)?).map_err(numeric_err)
    }

    /// -d_i d_j log H(v): the Baker matrix P at the divisor with Abel image v.
    fn baker_from_h(&self, v: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.check_len(&v)?;
        self.h.baker_from_h(&v).map_err(numeric_err)
    }

    /// wp_{2k-1,2l-1}(u) of the transformed curve.
    fn wp(&self, u: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.check_len(&u)?;
        self.h.wp_from_sigma(&u).map_err(numeric_err)
    }

    /// sigma(u) of the transformed curve.
    fn sigma(&self, u: Vec<Complex64>) -> PyResult<Complex64> {
        self.check_len(&u)?;
        self.h.sigma.value(&u).map_err(numeric_err)
    }

    /// u = D v.
    fn d_times(&self, v: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.check_len(&v)?;
        Ok(self.h.d_times(&v))
    }

    /// Abel image of points (x, y), based at (a, 0).
    fn abel_jacobi(&self, points: Vec<(Complex64, Complex64)>) -> PyResult<Vec<Complex64>> {
        self.h.abel_jacobi(&points).map_err(numeric_err)
    }

    /// P evaluated algebraically at g points (x, y).
    fn baker_at(&self, points: Vec<(Complex64, Complex64)>) -> PyResult<Vec<Vec<Complex64>>> {
        let bm = self.h.baker_matrix().map_err(numeric_err)?;
        let num = &self.h.pd.scalars;
        let bind = |n: &str| num.lookup(n);
        bm.evaluate(&points, Some(&bind)).map_err(numeric_err)
    }

    /// Random g points of the curve, deterministic in the seed.
    fn random_divisor(&self, seed: u64) -> Vec<(Complex64, Complex64)> {
        self.h.random_divisor(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Random v in the period cell, off the theta divisor.
    fn random_v(&self, seed: u64) -> PyResult<Vec<Complex64>> {
        self.h.random_v(&mut ChaCha8Rng::seed_from_u64(seed)).map_err(numeric_err)
    }

    /// Riemann constant as (delta', delta'').
    fn characteristic(&self) -> (Vec<f64>, Vec<f64>) {
        let ch = &self.h.riemann.ch;
        (ch.d1.clone(), ch.d2.clone())
    }

    fn tau(&self) -> Vec<Vec<Complex64>> {
        self.h.pd.tau.clone()
    }
}

#[pymodule]
fn hyperbaker_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyHFunction>()?;
    m.add_function(wrap_pyfunction!(baker_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(h_series, m)?)?;
    m.add_function(wrap_pyfunction!(periods, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", harness::VERSION)?;
    Ok(())
}
