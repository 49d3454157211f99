//! Python bindings: `import pyregsimplex`.

use pyo3::exceptions::{PyIOError, PyLookupError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use regsimplex::bounds;
use regsimplex::hadamard::{self as registry, HadamardMatrix};
use regsimplex::ohat::{self, OhatMatrix, PhaseChoice, PivotMode};
use regsimplex::planner::{self, ConstructionPlan, PlanConfig, Strategy, DEFAULT_PHASE_GRID};
use regsimplex::simplex::{self, SimplexEmbedding, Tolerances};
use regsimplex::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::UnsupportedOrder { .. } => PyLookupError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::Numerical(_) | Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn parse_pivot(pivot: &str) -> PyResult<PivotMode> {
    pivot.parse().map_err(py_err)
}

/// A verified Hadamard matrix.
#[pyclass(name = "Hadamard", module = "pyregsimplex", frozen)]
pub struct PyHadamard {
    inner: std::sync::Arc<HadamardMatrix>,
}

#[pymethods]
impl PyHadamard {
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn rows(&self) -> Vec<Vec<i8>> {
        self.inner.to_rows()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn verify(&self) -> bool {
        self.inner.verify()
    }

    fn __repr__(&self) -> String {
        format!("Hadamard(order={})", self.inner.order())
    }
}

/// Orthogonal matrix with constant first column.
#[pyclass(name = "Ohat", module = "pyregsimplex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyOhat {
    inner: OhatMatrix,
}

#[pymethods]
impl PyOhat {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let body = regsimplex::Matrix::from_rows(&rows).map_err(py_err)?;
        Ok(PyOhat {
            inner: OhatMatrix::new(body).map_err(py_err)?,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn norm(&self) -> f64 {
        self.inner.norm().value()
    }

    #[getter]
    fn edge_length(&self) -> f64 {
        self.inner.edge_length()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.body().to_rows()
    }

    fn residual(&self) -> PyResult<f64> {
        self.inner.body().orthogonality_residual().map_err(py_err)
    }

    fn check(&self) -> PyResult<()> {
        self.inner.check().map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Ohat(size={}, norm={})",
            self.inner.size(),
            self.inner.norm().value()
        )
    }
}

/// Simplex vertices in cube coordinates.
#[pyclass(name = "Simplex", module = "pyregsimplex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySimplex {
    inner: SimplexEmbedding,
}

#[pymethods]
impl PySimplex {
    #[new]
    fn new(vertices: Vec<Vec<f64>>, edge_length: f64) -> PyResult<Self> {
        Ok(PySimplex {
            inner: SimplexEmbedding::new(vertices, edge_length).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySimplex {
            inner: SimplexEmbedding::from_json(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn edge_length(&self) -> f64 {
        self.inner.edge_length()
    }

    #[getter]
    fn edge_ratio(&self) -> f64 {
        self.inner.edge_ratio()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().to_vec()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(py_err)?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    /// Regularity, centring, containment and circumradius metrics.
    #[pyo3(signature = (regularity=1e-8, barycenter=1e-10, containment=1e-12, circumradius=1e-8))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        regularity: f64,
        barycenter: f64,
        containment: f64,
        circumradius: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tol = Tolerances {
            regularity,
            barycenter,
            containment,
            circumradius,
        };
        let report = simplex::verify(&self.inner, &tol).map_err(py_err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!(
            "Simplex(dim={}, edge_length={})",
            self.inner.dim(),
            self.inner.edge_length()
        )
    }
}

/// A replayable construction chain.
#[pyclass(name = "Plan", module = "pyregsimplex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPlan {
    inner: ConstructionPlan,
}

#[pymethods]
impl PyPlan {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPlan {
            inner: ConstructionPlan::from_json(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn target_dim(&self) -> usize {
        self.inner.target_dim
    }

    #[getter]
    fn strategy(&self) -> String {
        self.inner.strategy.to_string()
    }

    #[getter]
    fn achieved_norm(&self) -> f64 {
        self.inner.achieved_norm
    }

    #[getter]
    fn achieved_edge(&self) -> f64 {
        self.inner.achieved_edge
    }

    #[getter]
    fn bound_predicted(&self) -> f64 {
        self.inner.bound_predicted
    }

    fn steps<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.steps)
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn replay(&self) -> PyResult<PyOhat> {
        Ok(PyOhat {
            inner: planner::replay(&self.inner).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Plan(n={}, strategy={}, steps='{}')",
            self.inner.target_dim,
            self.inner.strategy,
            self.inner.summary()
        )
    }
}

#[pyfunction]
fn hadamard(order: usize) -> PyResult<PyHadamard> {
    Ok(PyHadamard {
        inner: registry::generate(order).map_err(py_err)?,
    })
}

/// Registry recipe for an order, or `None` when unavailable.
#[pyfunction]
fn hadamard_recipe(order: usize) -> Option<String> {
    registry::best_recipe(order).map(|r| r.to_string())
}

#[pyfunction]
fn covered_orders(limit: usize) -> Vec<usize> {
    registry::covered_orders(limit)
}

#[pyfunction]
fn from_hadamard(h: &PyHadamard) -> PyOhat {
    PyOhat {
        inner: ohat::from_hadamard(&h.inner),
    }
}

/// Cosine/sine construction; optimal uniform phases when `phases` is omitted.
#[pyfunction]
#[pyo3(signature = (n, phases=None))]
fn fourier(n: usize, phases: Option<Vec<f64>>) -> PyResult<PyOhat> {
    let phases = match phases {
        Some(p) => PhaseChoice::new(p).map_err(py_err)?,
        None => ohat::optimal_phases(n),
    };
    Ok(PyOhat {
        inner: ohat::fourier(n, &phases).map_err(py_err)?,
    })
}

#[pyfunction]
fn optimal_phases(n: usize) -> Vec<f64> {
    ohat::optimal_phases(n).angles().to_vec()
}

#[pyfunction]
fn double(a: &PyOhat) -> PyOhat {
    PyOhat {
        inner: ohat::double(&a.inner),
    }
}

#[pyfunction]
fn reduce(a: &PyOhat, row: usize, col: usize) -> PyResult<PyOhat> {
    Ok(PyOhat {
        inner: ohat::reduce(&a.inner, row, col).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (a, pivot="heuristic"))]
fn reduce_best(a: &PyOhat, pivot: &str) -> PyResult<PyOhat> {
    Ok(PyOhat {
        inner: ohat::reduce_best(&a.inner, parse_pivot(pivot)?).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (n, seed=0))]
fn random_member(n: usize, seed: u64) -> PyResult<PyOhat> {
    Ok(PyOhat {
        inner: ohat::random_member(n, seed).map_err(py_err)?,
    })
}

#[pyfunction]
fn extract(a: &PyOhat) -> PyResult<PySimplex> {
    Ok(PySimplex {
        inner: simplex::extract(&a.inner).map_err(py_err)?,
    })
}

fn config(pivot: &str, strategy: &str, phase_grid: bool, seed: u64) -> PyResult<PlanConfig> {
    let strategy = match strategy {
        "auto" => None,
        s => Some(s.parse::<Strategy>().map_err(py_err)?),
    };
    Ok(PlanConfig {
        pivot: parse_pivot(pivot)?,
        phase_grid: phase_grid.then_some(DEFAULT_PHASE_GRID),
        strategy,
        seed,
        ..PlanConfig::default()
    })
}

/// Best construction plan for dimension `n`.
#[pyfunction]
#[pyo3(signature = (n, pivot="heuristic", strategy="auto", phase_grid=false, seed=0))]
fn plan(
    py: Python<'_>,
    n: usize,
    pivot: &str,
    strategy: &str,
    phase_grid: bool,
    seed: u64,
) -> PyResult<PyPlan> {
    let cfg = config(pivot, strategy, phase_grid, seed)?;
    let inner = py.detach(|| planner::plan(n, &cfg)).map_err(py_err)?;
    Ok(PyPlan { inner })
}

/// Plans, extracts and returns the simplex for dimension `n`.
#[pyfunction]
#[pyo3(signature = (n, pivot="heuristic", strategy="auto"))]
fn construct(
    py: Python<'_>,
    n: usize,
    pivot: &str,
    strategy: &str,
) -> PyResult<(PySimplex, PyPlan)> {
    let cfg = config(pivot, strategy, false, 0)?;
    let (plan, matrix) = py
        .detach(|| planner::Planner::new(cfg).plan_with_matrix(n))
        .map_err(py_err)?;
    let s = simplex::extract(&matrix).map_err(py_err)?;
    Ok((PySimplex { inner: s }, PyPlan { inner: plan }))
}

/// Records `{n, edge_length, edge_ratio, best_lower, upper, strategy}`.
#[pyfunction]
#[pyo3(signature = (n_from, n_to, pivot="heuristic"))]
fn sweep<'py>(
    py: Python<'py>,
    n_from: usize,
    n_to: usize,
    pivot: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(pivot, "auto", false, 0)?;
    let records = py
        .detach(|| planner::sweep(n_from, n_to, &cfg))
        .map_err(py_err)?;
    to_py(py, &records)
}

#[pyfunction]
fn bound_report<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::bound_report(n).map_err(py_err)?)
}

#[pyfunction]
fn upper_bound(n: usize) -> f64 {
    bounds::upper_bound(n)
}

#[pyfunction]
fn hadamard_gap_bound(n: usize, k: usize) -> PyResult<f64> {
    Ok(bounds::hadamard_gap_bound(n, k).map_err(py_err)?.value)
}

#[pyfunction]
fn chain_bound<'py>(py: Python<'py>, n: usize, base: usize, c: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::chain_bound(n, base, c).map_err(py_err)?)
}

/// `(constant, satisfied_by)`.
#[pyfunction]
fn theorem1_check(n: usize) -> (f64, f64) {
    let t = bounds::theorem1_check(n);
    (t.constant, t.satisfied_by)
}

#[pymodule]
pub fn pyregsimplex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHadamard>()?;
    m.add_class::<PyOhat>()?;
    m.add_class::<PySimplex>()?;
    m.add_class::<PyPlan>()?;
    m.add_function(wrap_pyfunction!(hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_recipe, m)?)?;
    m.add_function(wrap_pyfunction!(covered_orders, m)?)?;
    m.add_function(wrap_pyfunction!(from_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(fourier, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_phases, m)?)?;
    m.add_function(wrap_pyfunction!(double, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_best, m)?)?;
    m.add_function(wrap_pyfunction!(random_member, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_gap_bound, m)?)?;
    m.add_function(wrap_pyfunction!(chain_bound, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_check, m)?)?;
    m.add("UNIVERSAL_RATIO", bounds::theorem1_constant())?;
    Ok(())
}
