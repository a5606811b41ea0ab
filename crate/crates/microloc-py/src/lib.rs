//! Python bindings for the core toolkit: metric specs come in as the body
//! of a `[metric]` config section, results go out as plain lists and dicts.

use microloc::config::{metric_from_section, RawConfig};
use microloc::flow::{self, integrate_bicharacteristic, TransportMode};
use microloc::geometry::{metric_at, null_covector_from_direction, MetricSpec};
use microloc::hadamard;
use microloc::verify;
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn parse_metric(metric: &str) -> PyResult<MetricSpec> {
    let src = format!("[metric]\n{}\n", metric);
    let cfg = RawConfig::parse(&src).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let sec = cfg
        .section("metric")
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    metric_from_section(sec).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn vec4(v: Vec<f64>, what: &str) -> PyResult<[f64; 4]> {
    v.try_into()
        .map_err(|_| PyValueError::new_err(format!("{} needs 4 components", what)))
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Integrate a null bicharacteristic; returns rows [tau, x0..x3, xi0..xi3, q].
#[pyfunction]
#[pyo3(signature = (metric, x, xi, tau_end, samples = 65))]
fn propagate(
    metric: &str,
    x: Vec<f64>,
    xi: Vec<f64>,
    tau_end: f64,
    samples: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let spec = parse_metric(metric)?;
    let x = vec4(x, "x")?;
    let xi = vec4(xi, "xi")?;
    let strip = integrate_bicharacteristic(&spec, &x, &xi, tau_end, samples).map_err(runtime_err)?;
    Ok((0..strip.taus.len())
        .map(|k| {
            let mut row = vec![strip.taus[k]];
            row.extend_from_slice(&strip.states[k]);
            row.push(strip.q_values[k]);
            row
        })
        .collect())
}

/// Future null covector at `x` with the given unit spatial frame direction.
#[pyfunction]
fn null_covector(metric: &str, x: Vec<f64>, direction: Vec<f64>) -> PyResult<Vec<f64>> {
    let spec = parse_metric(metric)?;
    let x = vec4(x, "x")?;
    if direction.len() != 3 {
        return Err(PyValueError::new_err("direction needs 3 components"));
    }
    let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(PyValueError::new_err("direction must be nonzero"));
    }
    let cache = metric_at(&spec, &x).map_err(runtime_err)?;
    let xi = null_covector_from_direction(
        &cache,
        &[direction[0] / n, direction[1] / n, direction[2] / n],
    );
    Ok(xi.to_vec())
}

/// Transport a 4x4 bispinor fibre along a null bicharacteristic; returns the
/// endpoint fibre as a row-major list of (re, im) pairs.
#[pyfunction]
#[pyo3(signature = (metric, x, xi, tau_end, fibre_re, fibre_im, mode = "bispinor", samples = 65))]
#[allow(clippy::too_many_arguments)]
fn transport_fibre(
    metric: &str,
    x: Vec<f64>,
    xi: Vec<f64>,
    tau_end: f64,
    fibre_re: Vec<f64>,
    fibre_im: Vec<f64>,
    mode: &str,
    samples: usize,
) -> PyResult<Vec<(f64, f64)>> {
    let spec = parse_metric(metric)?;
    let x = vec4(x, "x")?;
    let xi = vec4(xi, "xi")?;
    if fibre_re.len() != 16 || fibre_im.len() != 16 {
        return Err(PyValueError::new_err("fibre needs 16 re and 16 im entries"));
    }
    let mode = match mode {
        "bispinor" => TransportMode::BispinorBoth,
        "bispinor-right" => TransportMode::BispinorRightOnly,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown matrix transport mode '{}'",
                other
            )))
        }
    };
    let w0 = DMatrix::from_fn(4, 4, |i, j| {
        Complex64::new(fibre_re[4 * i + j], fibre_im[4 * i + j])
    });
    let strip = integrate_bicharacteristic(&spec, &x, &xi, tau_end, samples).map_err(runtime_err)?;
    let pol = flow::transport(&strip, &w0, mode).map_err(runtime_err)?;
    let end = pol.fibre.last().expect("transport produced samples");
    let mut out = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            out.push((end[(i, j)].re, end[(i, j)].im));
        }
    }
    Ok(out)
}

fn wf_element_dict<'py>(
    py: Python<'py>,
    e: &hadamard::WFElement,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("x", e.x.to_vec())?;
    d.set_item("y", e.y.to_vec())?;
    d.set_item("xi", e.xi.to_vec())?;
    d.set_item("eta", e.eta.to_vec())?;
    d.set_item("frequency_flag", e.frequency_flag)?;
    d.set_item("diagonal", e.diagonal)?;
    Ok(d)
}

/// Wave front prediction for the Hadamard scalar two-point function.
#[pyfunction]
fn predict_wf_hadamard<'py>(
    py: Python<'py>,
    metric: &str,
    x: Vec<f64>,
    y: Vec<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = parse_metric(metric)?;
    let x = vec4(x, "x")?;
    let y = vec4(y, "y")?;
    let els = hadamard::predict_wf_hadamard_scalar(&spec, &x, &y).map_err(runtime_err)?;
    els.iter().map(|e| wf_element_dict(py, e)).collect()
}

/// Flat vacuum two-point function of the Klein-Gordon field.
#[pyfunction]
fn eval_minkowski_scalar(
    mass: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    eps: f64,
) -> PyResult<(f64, f64)> {
    let x = vec4(x, "x")?;
    let y = vec4(y, "y")?;
    if eps <= 0.0 {
        return Err(PyValueError::new_err("eps must be positive"));
    }
    let v = hadamard::eval_minkowski_scalar(mass, &x, &y, eps);
    Ok((v.re, v.im))
}

/// Run named invariant checks; empty list runs all of them.
#[pyfunction]
#[pyo3(signature = (metric, checks = vec![], seed = 7))]
fn run_checks<'py>(
    py: Python<'py>,
    metric: &str,
    checks: Vec<String>,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = parse_metric(metric)?;
    let results = verify::run_checks(&spec, &checks, seed, 1.0).map_err(|e| match e {
        verify::VerifyError::UnknownCheck(_) => PyValueError::new_err(e.to_string()),
        other => runtime_err(other),
    })?;
    results
        .iter()
        .map(|r| {
            let d = PyDict::new_bound(py);
            d.set_item("name", &r.name)?;
            d.set_item("max_residual", r.max_residual)?;
            d.set_item("tolerance", r.tolerance)?;
            d.set_item("pass", r.pass)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn microloc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(null_covector, m)?)?;
    m.add_function(wrap_pyfunction!(transport_fibre, m)?)?;
    m.add_function(wrap_pyfunction!(predict_wf_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(eval_minkowski_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
