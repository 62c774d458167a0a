//! Python module `relkac`. Structured arguments (fields, probes, Monte Carlo
//! parameters) are plain dicts with the same keys as the JSON run configuration.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use relkac_core::estimator::{self, McParams, ProbeFunction};
use relkac_core::fields::FieldSpec;
use relkac_core::lattice::{Lattice, Variant};
use relkac_core::{specfun, Complex64, MassDim};
use serde::de::DeserializeOwned;
use serde::Serialize;

const DEFAULT_SEED: u64 = 20_240_601;

fn err(e: relkac_core::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn md(mass: f64, dim: usize) -> PyResult<MassDim> {
    MassDim::new(mass, dim).map_err(err)
}

fn to_json(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse<T: DeserializeOwned>(v: serde_json::Value, what: &str) -> PyResult<T> {
    serde_json::from_value(v).map_err(|e| PyValueError::new_err(format!("bad {what}: {e}")))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn variant(name: &str) -> PyResult<Variant> {
    Variant::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown variant '{name}' (h0, h1, h2, h3, nr)")))
}

/// Field spec from a dict; `dim` defaults to the dimension of the evaluation point.
fn field(obj: Option<&Bound<'_, PyAny>>, dim: usize) -> PyResult<FieldSpec> {
    let Some(obj) = obj else {
        return FieldSpec::zero(dim).map_err(err);
    };
    let mut v = to_json(obj)?;
    if let Some(map) = v.as_object_mut() {
        map.entry("dim").or_insert(dim.into());
    }
    let fs: FieldSpec = parse(v, "field")?;
    fs.validate().map_err(err)?;
    if fs.dim != dim {
        return Err(PyValueError::new_err(format!("field has dim {} but x has {dim} components", fs.dim)));
    }
    Ok(fs)
}

fn probe(obj: Option<&Bound<'_, PyAny>>, dim: usize) -> PyResult<ProbeFunction> {
    let g = match obj {
        Some(o) => parse(to_json(o)?, "probe")?,
        None => ProbeFunction::gaussian(vec![0.0; dim], 1.0),
    };
    g.validate(dim).map_err(err)?;
    Ok(g)
}

#[pyfunction]
fn bessel_k(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_k(nu, x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, mass = 1.0, dim = 1))]
fn levy_density(r: f64, mass: f64, dim: usize) -> PyResult<f64> {
    specfun::levy_density(r, md(mass, dim)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, t, mass = 1.0, dim = 1))]
fn free_kernel(r: f64, t: f64, mass: f64, dim: usize) -> PyResult<f64> {
    specfun::free_kernel(r, t, md(mass, dim)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (xi, mass = 1.0))]
fn relativistic_symbol(xi: f64, mass: f64) -> f64 {
    specfun::relativistic_symbol(xi, mass)
}

#[pyfunction]
#[pyo3(signature = (sigma, t, mass = 1.0))]
fn subordinator_laplace(sigma: f64, t: f64, mass: f64) -> PyResult<f64> {
    specfun::subordinator_laplace(sigma, t, mass).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (s, t, mass = 1.0))]
fn subordinator_density(s: f64, t: f64, mass: f64) -> PyResult<f64> {
    specfun::subordinator_density(s, t, mass).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, mass = 1.0))]
fn char_exponent(rho: f64, mass: f64) -> PyResult<Complex64> {
    specfun::char_exponent(rho, mass).map_err(err)
}

/// Monte Carlo estimate of `(e^{-tH} g)(x)`; returns the full report as a dict.
#[pyfunction]
#[pyo3(signature = (variant_name, x, t, mass = 1.0, field_spec = None, probe_fn = None, params = None, seed = DEFAULT_SEED))]
#[allow(clippy::too_many_arguments)]
fn estimate<'py>(
    py: Python<'py>,
    variant_name: &str,
    x: Vec<f64>,
    t: f64,
    mass: f64,
    field_spec: Option<&Bound<'py, PyAny>>,
    probe_fn: Option<&Bound<'py, PyAny>>,
    params: Option<&Bound<'py, PyAny>>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let d = x.len();
    let v = variant(variant_name)?;
    let fs = field(field_spec, d)?;
    let g = probe(probe_fn, d)?;
    let p: McParams = match params {
        Some(o) => parse(to_json(o)?, "params")?,
        None => McParams::default(),
    };
    let m = md(mass, d)?;
    let report = py.detach(|| estimator::estimate(v, &fs, &g, &x, t, m, &p, seed)).map_err(err)?;
    to_py(py, &report)
}

/// Lattice spectral value of `(e^{-tH} g)(x)` on an `n^d` periodic grid of side `length`.
#[pyfunction]
#[pyo3(signature = (variant_name, x, t, n, length, mass = 1.0, field_spec = None, probe_fn = None))]
#[allow(clippy::too_many_arguments)]
fn lattice_oracle(
    py: Python<'_>,
    variant_name: &str,
    x: Vec<f64>,
    t: f64,
    n: usize,
    length: f64,
    mass: f64,
    field_spec: Option<&Bound<'_, PyAny>>,
    probe_fn: Option<&Bound<'_, PyAny>>,
) -> PyResult<Complex64> {
    let d = x.len();
    let v = variant(variant_name)?;
    let fs = field(field_spec, d)?;
    let g = probe(probe_fn, d)?;
    let m = md(mass, d)?;
    let lat = Lattice::new(d, n, length).map_err(err)?;
    py.detach(|| estimator::lattice_oracle(v, &fs, &g, &x, t, m, &lat)).map_err(err)
}

#[pymodule]
fn relkac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_function(wrap_pyfunction!(levy_density, m)?)?;
    m.add_function(wrap_pyfunction!(free_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(relativistic_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(subordinator_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(subordinator_density, m)?)?;
    m.add_function(wrap_pyfunction!(char_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_oracle, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
