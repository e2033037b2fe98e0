//! Python module `monogamy`: states, POVMs, the exact entropic quantities,
//! the variational bounds and the verification suites.
//!
//! Matrices cross the boundary as nested lists of Python `complex`. Results of
//! searches come back as dicts with `value`, `direction` (`"upper_bound"`,
//! `"lower_bound"` or `"exact"`), `converged`, `evaluations` and
//! `gap_estimate`; the optimal argument is included in the JSON file format.

use monogamy_core::linalg::{CMatrix, C64};
use monogamy_core::monogamy::{run_suite, SuiteOptions};
use monogamy_core::variational::{Budget, OptimizationResult};
use monogamy_core::{entropy, io, keyrates, povm, qstate, squashed, variational, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::Value;

create_exception!(monogamy, MonogamyError, PyException);

fn err(e: Error) -> PyErr {
    MonogamyError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(MonogamyError::new_err("ragged matrix rows"));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn budget(evaluations: usize, restarts: usize, seed: u64) -> Budget {
    Budget::new(evaluations).with_restarts(restarts).with_seed(seed)
}

fn result_dict<T>(py: Python<'_>, r: &OptimizationResult<T>, argument: Value) -> PyResult<Py<PyAny>> {
    let v = serde_json::json!({
        "value": r.value,
        "direction": r.direction,
        "converged": r.converged,
        "evaluations": r.evaluations,
        "restarts_used": r.restarts_used,
        "gap_estimate": r.gap_estimate,
        "argument": argument,
    });
    to_py(py, &v)
}

/// A density operator on labelled subsystems.
#[pyclass(name = "QState", module = "monogamy", from_py_object)]
#[derive(Clone)]
struct PyQState {
    inner: qstate::QState,
}

#[pymethods]
impl PyQState {
    #[new]
    #[pyo3(signature = (dims, matrix, labels=None))]
    fn new(dims: Vec<usize>, matrix: Vec<Vec<C64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let labels = labels.unwrap_or_else(|| qstate::default_labels(dims.len()));
        let inner = qstate::QState::new(dims, labels, to_matrix(matrix)?).map_err(err)?;
        Ok(PyQState { inner })
    }

    /// A named fixture; see `CATALOG_NAMES`.
    #[staticmethod]
    #[pyo3(signature = (name, p=None, dims=None, rank=None, seed=0))]
    fn catalog(name: &str, p: Option<f64>, dims: Option<Vec<usize>>, rank: Option<usize>, seed: u64) -> PyResult<Self> {
        let s = qstate::catalog_by_name(name, p, dims, rank, seed).map_err(err)?;
        Ok(PyQState { inner: s.to_density() })
    }

    #[staticmethod]
    fn random(dims: Vec<usize>, rank: usize, seed: u64) -> PyResult<Self> {
        let inner = qstate::random_state(&dims, rank, seed).map_err(err)?;
        Ok(PyQState { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let s = io::state_from_str(text).map_err(err)?;
        Ok(PyQState { inner: s.to_density() })
    }

    fn to_json(&self) -> String {
        io::state_to_json(&qstate::State::Mixed(self.inner.clone())).to_string()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        from_matrix(self.inner.matrix())
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    fn partial_trace(&self, keep: Vec<String>) -> PyResult<Self> {
        let inner = self.inner.partial_trace(&refs(&keep)).map_err(err)?;
        Ok(PyQState { inner })
    }

    fn reorder(&self, order: Vec<String>) -> PyResult<Self> {
        let inner = self.inner.reorder(&refs(&order)).map_err(err)?;
        Ok(PyQState { inner })
    }

    fn tensor(&self, other: &PyQState) -> PyResult<Self> {
        let inner = self.inner.tensor(&other.inner).map_err(err)?;
        Ok(PyQState { inner })
    }

    fn relabel(&self, old: &str, new: &str) -> PyResult<Self> {
        let inner = self.inner.relabel(old, new).map_err(err)?;
        Ok(PyQState { inner })
    }

    /// Density operator of the canonical purification, ancilla last.
    fn purify(&self, ancilla: &str) -> PyResult<Self> {
        let p = self.inner.purify(ancilla).map_err(err)?;
        Ok(PyQState { inner: p.to_density() })
    }

    /// Entropy of the marginal on `part`, or of the whole state.
    #[pyo3(signature = (part=None))]
    fn entropy(&self, part: Option<Vec<String>>) -> PyResult<f64> {
        match part {
            Some(p) => entropy::marginal_entropy(&self.inner, &refs(&p)).map_err(err),
            None => Ok(entropy::von_neumann(&self.inner)),
        }
    }

    fn __repr__(&self) -> String {
        format!("QState(dims={:?}, labels={:?})", self.inner.dims(), self.inner.labels())
    }
}

/// A POVM acting on one labelled subsystem.
#[pyclass(name = "Povm", module = "monogamy", from_py_object)]
#[derive(Clone)]
struct PyPovm {
    inner: povm::Povm,
}

#[pymethods]
impl PyPovm {
    #[new]
    fn new(target: String, elements: Vec<Vec<Vec<C64>>>) -> PyResult<Self> {
        let elements = elements.into_iter().map(to_matrix).collect::<PyResult<Vec<_>>>()?;
        let inner = povm::Povm::new(target, elements).map_err(err)?;
        Ok(PyPovm { inner })
    }

    #[staticmethod]
    fn computational_basis(target: String, dim: usize) -> Self {
        PyPovm {
            inner: povm::Povm::computational_basis(target, dim),
        }
    }

    #[staticmethod]
    fn random(target: &str, dim: usize, outcomes: usize, seed: u64) -> PyResult<Self> {
        let inner = povm::random_povm(target, dim, outcomes, seed).map_err(err)?;
        Ok(PyPovm { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = io::povm_from_str(text).map_err(err)?;
        Ok(PyPovm { inner })
    }

    fn to_json(&self) -> String {
        io::povm_to_json(&self.inner).to_string()
    }

    #[getter]
    fn target(&self) -> String {
        self.inner.target().to_string()
    }

    fn elements(&self) -> Vec<Vec<Vec<C64>>> {
        self.inner.elements().iter().map(from_matrix).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Povm(target={:?}, outcomes={})", self.inner.target(), self.inner.len())
    }
}

#[pyfunction]
fn mutual_information(state: &PyQState, a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
    entropy::mutual_information(&state.inner, &refs(&a), &refs(&b)).map_err(err)
}

#[pyfunction]
fn conditional_mutual_information(state: &PyQState, a: Vec<String>, b: Vec<String>, e: Vec<String>) -> PyResult<f64> {
    entropy::conditional_mutual_information(&state.inner, &refs(&a), &refs(&b), &refs(&e)).map_err(err)
}

/// `S(A) - S(AB)`.
#[pyfunction]
fn coherent_information(state: &PyQState, a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
    entropy::coherent_information(&state.inner, &refs(&a), &refs(&b)).map_err(err)
}

#[pyfunction]
fn concurrence(state: &PyQState) -> PyResult<f64> {
    variational::concurrence(&state.inner).map_err(err)
}

#[pyfunction]
fn wootters_eof(state: &PyQState) -> PyResult<f64> {
    variational::wootters_eof(&state.inner).map_err(err)
}

#[pyfunction]
fn holevo_quantity(state: &PyQState, p: &PyPovm) -> PyResult<f64> {
    povm::holevo_quantity(&state.inner, &p.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, evaluations=20_000, restarts=32, seed=0))]
fn optimize_eof(py: Python<'_>, state: &PyQState, evaluations: usize, restarts: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let r = py.detach(|| variational::optimize_eof(&state.inner, &b)).map_err(err)?;
    result_dict(py, &r, io::ensemble_to_json(&r.argument))
}

/// Measurement on the second subsystem unless `target` is given.
#[pyfunction]
#[pyo3(signature = (state, target=None, evaluations=20_000, restarts=32, seed=0))]
fn optimize_holevo(
    py: Python<'_>,
    state: &PyQState,
    target: Option<String>,
    evaluations: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let r = py
        .detach(|| match &target {
            Some(t) => variational::optimize_holevo_on(&state.inner, t, &b, &[]),
            None => variational::optimize_holevo(&state.inner, &b),
        })
        .map_err(err)?;
    result_dict(py, &r, io::povm_to_json(&r.argument))
}

#[pyfunction]
#[pyo3(signature = (state, evaluations=20_000, restarts=32, seed=0, gap_tol=1e-3))]
fn duality_drive(
    py: Python<'_>,
    state: &PyQState,
    evaluations: usize,
    restarts: usize,
    seed: u64,
    gap_tol: f64,
) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let d = py.detach(|| variational::duality_drive(&state.inner, &b, gap_tol)).map_err(err)?;
    let v = serde_json::json!({
        "f_best": d.f_best,
        "g_best": d.g_best,
        "s_a": d.s_a,
        "duality_gap": d.duality_gap,
        "independent_gap": d.independent_gap,
        "converged": d.converged,
        "rounds": d.rounds,
        "evaluations": d.evaluations,
        "ensemble": io::ensemble_to_json(&d.ensemble),
        "povm": io::povm_to_json(&d.povm),
    });
    to_py(py, &v)
}

/// `I(X;A) - I(X;E)` for the outcome of `p`.
#[pyfunction]
fn csecret1_value(state: &PyQState, p: &PyPovm, a: Vec<String>, e: Vec<String>) -> PyResult<f64> {
    keyrates::csecret1_value(&state.inner, &p.inner, &refs(&a), &refs(&e)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, target, a, e, evaluations=20_000, restarts=32, seed=0))]
#[allow(clippy::too_many_arguments)]
fn optimize_csecret1(
    py: Python<'_>,
    state: &PyQState,
    target: &str,
    a: Vec<String>,
    e: Vec<String>,
    evaluations: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let r = py
        .detach(|| keyrates::optimize_csecret1(&state.inner, target, &refs(&a), &refs(&e), &b))
        .map_err(err)?;
    result_dict(py, &r, io::povm_to_json(&r.argument))
}

#[pyfunction]
#[pyo3(signature = (state, target, evaluations=20_000, restarts=32, seed=0))]
fn optimize_ed1(
    py: Python<'_>,
    state: &PyQState,
    target: &str,
    evaluations: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let r = py.detach(|| keyrates::optimize_ed1(&state.inner, target, &b)).map_err(err)?;
    result_dict(py, &r, io::instrument_to_json(&r.argument))
}

#[pyfunction]
#[pyo3(signature = (state, ext_dim_cap=None, evaluations=20_000, restarts=32, seed=0))]
fn optimize_squashed_ub(
    py: Python<'_>,
    state: &PyQState,
    ext_dim_cap: Option<usize>,
    evaluations: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let b = budget(evaluations, restarts, seed);
    let r = py
        .detach(|| squashed::optimize_squashed_ub(&state.inner, ext_dim_cap, &b, &[]))
        .map_err(err)?;
    result_dict(py, &r, io::extension_to_json(&r.argument))
}

/// Runs the named suites and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suites, seeds=vec![0], evaluations=20_000, restarts=32, gap_tol=1e-3))]
fn verify(
    py: Python<'_>,
    suites: Vec<String>,
    seeds: Vec<u64>,
    evaluations: usize,
    restarts: usize,
    gap_tol: f64,
) -> PyResult<Py<PyAny>> {
    let opts = SuiteOptions {
        budget: Budget::new(evaluations).with_restarts(restarts),
        gap_tol,
    };
    let report = py.detach(|| run_suite(&refs(&suites), &seeds, &opts)).map_err(err)?;
    to_py(py, &report.to_json())
}

#[pymodule]
fn monogamy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MonogamyError", m.py().get_type::<MonogamyError>())?;
    m.add("CATALOG_NAMES", qstate::CatalogEntry::NAMES.to_vec())?;
    m.add("SUITES", monogamy_core::monogamy::SUITES.to_vec())?;
    m.add_class::<PyQState>()?;
    m.add_class::<PyPovm>()?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_information, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(wootters_eof, m)?)?;
    m.add_function(wrap_pyfunction!(holevo_quantity, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_eof, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_holevo, m)?)?;
    m.add_function(wrap_pyfunction!(duality_drive, m)?)?;
    m.add_function(wrap_pyfunction!(csecret1_value, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_csecret1, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_ed1, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_squashed_ub, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
