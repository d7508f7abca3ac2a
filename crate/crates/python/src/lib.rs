//! Python bindings for the `salp` crate.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use salp::algorithms::{c1_coefficient as c1, LeaderRule};
use salp::benchmarks::{lookup, resolve, Shift};
use salp::harness::{bounce_probe as bounce, dynamics_probe as dynamics, shift_invariance_probe};
use salp::stats::{self, PMethod};
use salp::algorithms::Algorithm;
use salp::{Bounds, Objective, RunTrace};

fn to_py(e: salp::Error) -> PyErr {
    match e {
        salp::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Result of a single optimization run.
#[pyclass(name = "RunTrace", module = "pysalp")]
pub struct PyRunTrace {
    inner: RunTrace,
}

#[pymethods]
impl PyRunTrace {
    #[getter]
    fn algorithm(&self) -> &str {
        &self.inner.algorithm_id
    }

    #[getter]
    fn objective(&self) -> &str {
        &self.inner.objective_id
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Best-so-far fitness after each iteration.
    #[getter]
    fn best_per_iteration(&self) -> Vec<f64> {
        self.inner.best_per_iteration.clone()
    }

    #[getter]
    fn final_fitness(&self) -> f64 {
        self.inner.final_fitness()
    }

    #[getter]
    fn final_position(&self) -> Vec<f64> {
        self.inner.final_best.position.clone()
    }

    /// Member positions per iteration, if the run was recorded.
    #[getter]
    fn snapshots(&self) -> Option<Vec<Vec<Vec<f64>>>> {
        self.inner.snapshots.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.iterations()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunTrace(algorithm={:?}, objective={:?}, seed={}, final={:e})",
            self.inner.algorithm_id,
            self.inner.objective_id,
            self.inner.seed,
            self.inner.final_fitness()
        )
    }
}

/// Clamp `x` coordinate-wise into `[lower, upper]`.
#[pyfunction]
fn clip(x: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Vec<f64>> {
    let b = Bounds::new(lower, upper).map_err(to_py)?;
    salp::clip(&x, &b).map_err(to_py)
}

/// Evaluate a registered benchmark, optionally translated by `shift`.
#[pyfunction]
#[pyo3(signature = (name, x, shift = 0.0))]
fn evaluate(name: &str, x: Vec<f64>, shift: f64) -> PyResult<f64> {
    let mut obj = resolve(name, x.len(), &Shift::Scalar(shift)).map_err(to_py)?;
    Ok(obj.evaluate(&x))
}

/// Default search box of a benchmark as `(lower, upper)`.
#[pyfunction]
fn default_bounds(name: &str, dim: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let obj = lookup(name, dim).map_err(to_py)?;
    let b = obj.bounds();
    Ok((b.lower().to_vec(), b.upper().to_vec()))
}

#[pyfunction]
fn c1_coefficient(iteration: usize, total: usize) -> PyResult<f64> {
    c1(iteration, total).map_err(to_py)
}

/// Run one algorithm on a benchmark and return its trace.
#[pyfunction]
#[pyo3(signature = (algorithm, objective, dim = 2, shift = 0.0, seed = 0, population = 50, iterations = 100, record = false))]
#[allow(clippy::too_many_arguments)]
fn run(
    algorithm: &str,
    objective: &str,
    dim: usize,
    shift: f64,
    seed: u64,
    population: usize,
    iterations: usize,
    record: bool,
) -> PyResult<PyRunTrace> {
    let alg = Algorithm::from_id(algorithm, population, iterations).map_err(to_py)?;
    let mut obj = resolve(objective, dim, &Shift::Scalar(shift)).map_err(to_py)?;
    let inner = salp::run(&alg, &mut obj, seed, record).map_err(to_py)?;
    Ok(PyRunTrace { inner })
}

/// Two-sided Mann-Whitney U test. Returns `(u, p, method)`.
#[pyfunction]
fn mann_whitney_u(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, &'static str)> {
    let sa = stats::SampleSet::new("a", a).map_err(to_py)?;
    let sb = stats::SampleSet::new("b", b).map_err(to_py)?;
    let r = stats::mann_whitney_u(&sa, &sb);
    let method = match r.method {
        PMethod::Exact => "exact",
        PMethod::Normal => "normal",
        PMethod::Degenerate => "degenerate",
    };
    Ok((r.u, r.p, method))
}

#[pyfunction]
fn bonferroni(p: f64, m: usize) -> f64 {
    stats::bonferroni(p, m)
}

/// Star class (`"****"` ... `"ns"`) of an adjusted p-value.
#[pyfunction]
fn significance_class(p_adjusted: f64) -> String {
    stats::significance_class(p_adjusted).to_string()
}

#[pyfunction]
#[pyo3(signature = (algorithm, objective, shift, dim = 2, seed = 0, population = 50, iterations = 100))]
#[allow(clippy::too_many_arguments)]
fn shift_probe<'py>(
    py: Python<'py>,
    algorithm: &str,
    objective: &str,
    shift: f64,
    dim: usize,
    seed: u64,
    population: usize,
    iterations: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let s = vec![shift; dim];
    let r = shift_invariance_probe(algorithm, objective, dim, &s, seed, population, iterations).map_err(to_py)?;
    json_to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (preset, bound = 100.0, dim = 2, iterations = 10, population = 50, seed = 0))]
fn dynamics_probe<'py>(
    py: Python<'py>,
    preset: &str,
    bound: f64,
    dim: usize,
    iterations: usize,
    population: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let b = Bounds::uniform(dim, -bound, bound).map_err(to_py)?;
    let r = dynamics(preset, &b, iterations, population, seed).map_err(to_py)?;
    let out = json_to_py(py, &r)?;
    let d = out.cast::<PyDict>()?;
    d.set_item("final_centroid_norm", r.final_centroid_norm())?;
    d.set_item("final_leader_max_abs", r.final_leader_max_abs())?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (exponent, iterations = 100, population = 50, seed = 0, rule = "published"))]
fn bounce_probe<'py>(
    py: Python<'py>,
    exponent: f64,
    iterations: usize,
    population: usize,
    seed: u64,
    rule: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let rule = match rule {
        "published" => LeaderRule::Published,
        "amended" => LeaderRule::Amended,
        other => return Err(PyValueError::new_err(format!("unknown leader rule \"{other}\""))),
    };
    let r = bounce(exponent, iterations, population, seed, rule).map_err(to_py)?;
    json_to_py(py, &r)
}

#[pymodule]
fn pysalp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRunTrace>()?;
    m.add_function(wrap_pyfunction!(clip, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(default_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(c1_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney_u, m)?)?;
    m.add_function(wrap_pyfunction!(bonferroni, m)?)?;
    m.add_function(wrap_pyfunction!(significance_class, m)?)?;
    m.add_function(wrap_pyfunction!(shift_probe, m)?)?;
    m.add_function(wrap_pyfunction!(dynamics_probe, m)?)?;
    m.add_function(wrap_pyfunction!(bounce_probe, m)?)?;
    m.add("ALGORITHMS", salp::AlgorithmId::ALL.iter().map(|a| a.as_str()).collect::<Vec<_>>())?;
    Ok(())
}
