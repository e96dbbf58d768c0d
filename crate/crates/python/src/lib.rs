//! Python bindings: the `State` type, estimates, and the main quantities.

use ci_toolkit::ci;
use ci_toolkit::info::{self, Partition};
use ci_toolkit::measures::{self, MeasureEstimate};
use ci_toolkit::optim::{rank1_povm, OptimizerConfig};
use ci_toolkit::qmat::{CMatrix, C64};
use ci_toolkit::states::file::parse_state;
use ci_toolkit::states::random::{random_mstate, random_pure};
use ci_toolkit::states::{preset, Mstate, SystemLayout};
use ci_toolkit::Error;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::DimensionTooLarge { .. } | Error::AncillaTooLarge(_) => PyMemoryError::new_err(e.to_string()),
        Error::ObjectiveError { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn config(restarts: usize, seed: u64, outcomes: Option<usize>) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts,
        seed,
        outcomes,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(py_err)?;
    Ok(cfg)
}

/// Density matrix on labelled parties.
#[pyclass(name = "State", module = "citoolkit", skip_from_py_object)]
#[derive(Clone)]
pub struct PyState {
    inner: Mstate,
}

#[pymethods]
impl PyState {
    /// Builds a state from `[(label, dim), ...]` and a square complex matrix.
    #[new]
    fn new(parties: Vec<(String, usize)>, matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        let layout = SystemLayout::new(parties).map_err(py_err)?;
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = CMatrix::from_vec(n, n, matrix.into_iter().flatten().collect()).map_err(py_err)?;
        Ok(PyState {
            inner: Mstate::new(layout, m).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn preset(name: &str, params: Option<Vec<f64>>) -> PyResult<Self> {
        let s = preset(name, &params.unwrap_or_default()).map_err(py_err)?;
        Ok(PyState { inner: s.to_mstate() })
    }

    /// Parses a JSON state document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyState {
            inner: parse_state(text).map_err(py_err)?.to_mstate(),
        })
    }

    /// Random state on qubits; `rank=None` gives a Haar-random pure state.
    #[staticmethod]
    #[pyo3(signature = (labels, seed, rank=None))]
    fn random(labels: Vec<String>, seed: u64, rank: Option<usize>) -> PyResult<Self> {
        let layout = SystemLayout::qubits(&strs(&labels)).map_err(py_err)?;
        let inner = match rank {
            None => random_pure(&layout, seed).to_mstate(),
            Some(r) if r >= 1 && r <= layout.total_dim() => random_mstate(&layout, r, seed),
            Some(r) => return Err(PyValueError::new_err(format!("rank {r} out of range"))),
        };
        Ok(PyState { inner })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.layout().labels().iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.layout().dims()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|r| (0..m.cols()).map(|c| m[(r, c)]).collect()).collect()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    /// Von Neumann entropy in bits, of the whole state or of `parties`.
    #[pyo3(signature = (parties=None))]
    fn entropy(&self, parties: Option<Vec<String>>) -> PyResult<f64> {
        match parties {
            None => Ok(self.inner.entropy()),
            Some(p) => self.inner.entropy_of(&strs(&p)).map_err(py_err),
        }
    }

    fn reduce(&self, keep: Vec<String>) -> PyResult<Self> {
        Ok(PyState {
            inner: self.inner.reduce(&strs(&keep)).map_err(py_err)?,
        })
    }

    fn partial_trace(&self, discard: Vec<String>) -> PyResult<Self> {
        Ok(PyState {
            inner: self.inner.partial_trace(&strs(&discard)).map_err(py_err)?,
        })
    }

    fn tensor(&self, other: &PyState) -> PyResult<Self> {
        Ok(PyState {
            inner: self.inner.tensor(&other.inner).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("State({})", self.inner.layout())
    }
}

/// Optimized or exact value with its direction tag.
#[pyclass(name = "Estimate", module = "citoolkit", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyEstimate {
    value: f64,
    /// "exact", "lower-est" or "upper-est"
    direction: String,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate({:.6} bits, {})", self.value, self.direction)
    }

    fn __float__(&self) -> f64 {
        self.value
    }
}

impl From<MeasureEstimate> for PyEstimate {
    fn from(e: MeasureEstimate) -> Self {
        PyEstimate {
            value: e.value,
            direction: e.direction.tag().to_string(),
        }
    }
}

#[pyfunction]
fn mutual_info(state: &PyState, left: Vec<String>, right: Vec<String>) -> PyResult<f64> {
    info::mi(&state.inner, &strs(&left), &strs(&right)).map_err(py_err)
}

#[pyfunction]
fn conditional_entropy(state: &PyState, target: Vec<String>, given: Vec<String>) -> PyResult<f64> {
    info::conditional_entropy(&state.inner, &strs(&target), &strs(&given)).map_err(py_err)
}

#[pyfunction]
fn conditional_mutual_info(
    state: &PyState,
    x: Vec<String>,
    y: Vec<String>,
    z: Vec<String>,
) -> PyResult<f64> {
    info::conditional_mutual_info(&state.inner, &strs(&x), &strs(&y), &strs(&z)).map_err(py_err)
}

#[pyfunction]
fn fidelity(rho: &PyState, sigma: &PyState) -> PyResult<f64> {
    info::uhlmann_fidelity(&rho.inner, &sigma.inner).map_err(py_err)
}

#[pyfunction]
fn trace_distance(rho: &PyState, sigma: &PyState) -> PyResult<f64> {
    info::trace_distance(&rho.inner, &sigma.inner).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (state, unmeasured, measured, restarts=32, seed=7, outcomes=None))]
fn discord(
    state: &PyState,
    unmeasured: Vec<String>,
    measured: &str,
    restarts: usize,
    seed: u64,
    outcomes: Option<usize>,
) -> PyResult<PyEstimate> {
    let cfg = config(restarts, seed, outcomes)?;
    Ok(measures::discord(&state.inner, &strs(&unmeasured), measured, &cfg)
        .map_err(py_err)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (state, alice, restarts=32, seed=7, outcomes=None))]
fn eoa(state: &PyState, alice: Vec<String>, restarts: usize, seed: u64, outcomes: Option<usize>) -> PyResult<PyEstimate> {
    let cfg = config(restarts, seed, outcomes)?;
    Ok(measures::eoa(&state.inner, &strs(&alice), &cfg).map_err(py_err)?.into())
}

#[pyfunction]
#[pyo3(signature = (state, x, restarts=32, seed=7, outcomes=None))]
fn eof(state: &PyState, x: Vec<String>, restarts: usize, seed: u64, outcomes: Option<usize>) -> PyResult<PyEstimate> {
    let cfg = config(restarts, seed, outcomes)?;
    Ok(measures::eof(&state.inner, &strs(&x), &cfg).map_err(py_err)?.into())
}

#[pyfunction]
fn log_negativity(state: &PyState, left: Vec<String>, right: Vec<String>) -> PyResult<f64> {
    measures::log_negativity(&state.inner, &Partition::new(&strs(&left), &strs(&right))).map_err(py_err)
}

/// `(lower, upper, exact)` bracket on the distillable entanglement.
#[pyfunction]
fn ed_interval(state: &PyState, left: Vec<String>, right: Vec<String>) -> PyResult<(f64, f64, bool)> {
    let e = measures::ed_interval(&state.inner, &Partition::new(&strs(&left), &strs(&right)))
        .map_err(py_err)?;
    Ok((e.lower, e.upper, e.exact))
}

#[pyfunction]
#[pyo3(signature = (state, alice, bob, charlie, restarts=32, seed=7, outcomes=None))]
fn one_way_ci(
    state: &PyState,
    alice: Vec<String>,
    bob: &str,
    charlie: Vec<String>,
    restarts: usize,
    seed: u64,
    outcomes: Option<usize>,
) -> PyResult<PyEstimate> {
    let cfg = config(restarts, seed, outcomes)?;
    Ok(measures::one_way_ci(&state.inner, &strs(&alice), bob, &strs(&charlie), &cfg)
        .map_err(py_err)?
        .into())
}

#[pyfunction]
fn ci_upper(state: &PyState, alice: Vec<String>, bob: Vec<String>, charlie: Vec<String>) -> PyResult<f64> {
    ci::ci_upper(&state.inner, &strs(&alice), &strs(&bob), &strs(&charlie)).map_err(py_err)
}

/// Lower and upper ends of the concentrated information with their sources.
#[pyfunction]
#[pyo3(signature = (state, alice, bob, charlie, restarts=32, seed=7))]
fn ci_bounds<'py>(
    py: Python<'py>,
    state: &PyState,
    alice: Vec<String>,
    bob: &str,
    charlie: Vec<String>,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(restarts, seed, None)?;
    let r = ci::ci_lower(&state.inner, &strs(&alice), bob, &strs(&charlie), &cfg).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("lower", r.lower)?;
    d.set_item("lower_source", r.lower_source.tag())?;
    d.set_item("upper", r.upper)?;
    d.set_item("upper_source", r.upper_source.tag())?;
    d.set_item("one_way", PyEstimate::from(r.one_way))?;
    Ok(d)
}

#[pyfunction]
fn ci_pure_regularized(
    state: &PyState,
    alice: Vec<String>,
    bob: Vec<String>,
    charlie: Vec<String>,
) -> PyResult<f64> {
    ci::ci_pure_regularized(&state.inner, &strs(&alice), &strs(&bob), &strs(&charlie)).map_err(py_err)
}

#[pyfunction]
fn lqsm_fidelity_bound(total_mi: f64, ci_value: f64) -> PyResult<f64> {
    ci::lqsm_fidelity_bound(total_mi, ci_value).map_err(py_err)
}

/// Information `I(A:CR)` reached by the two-round protocol on the separating family.
#[pyfunction]
fn family15_two_round_merge(c: f64) -> PyResult<f64> {
    Ok(ci::family15_two_round_merge(c).map_err(py_err)?.achieved_mi)
}

#[pyfunction]
#[pyo3(signature = (c, restarts=32, seed=7))]
fn family15_separation<'py>(py: Python<'py>, c: f64, restarts: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(restarts, seed, None)?;
    let r = ci::family15_separation_report(c, &cfg, None).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("total_mi", r.total_mi)?;
    d.set_item("discord", PyEstimate::from(r.discord))?;
    d.set_item("oneway_upper", r.oneway_upper)?;
    d.set_item("two_round", r.two_round)?;
    d.set_item("gap", r.gap)?;
    d.set_item("verdict", r.verdict)?;
    Ok(d)
}

/// State after dilating the rank-1 measurement whose vectors are the
/// conjugated rows of `unitary` (first `dim(bob)` columns).
#[pyfunction]
fn dilated_protocol_state(state: &PyState, unitary: Vec<Vec<C64>>, bob: &str) -> PyResult<PyState> {
    let rows = unitary.len();
    let cols = unitary.first().map_or(0, Vec::len);
    let u = CMatrix::from_vec(rows, cols, unitary.into_iter().flatten().collect()).map_err(py_err)?;
    let d = state.inner.layout().dim_of(bob).map_err(py_err)?;
    let povm = rank1_povm(&u, d).map_err(py_err)?;
    Ok(PyState {
        inner: ci::dilated_protocol_state(&state.inner, &povm, bob).map_err(py_err)?,
    })
}

#[pymodule]
fn citoolkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(mutual_info, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_mutual_info, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(trace_distance, m)?)?;
    m.add_function(wrap_pyfunction!(discord, m)?)?;
    m.add_function(wrap_pyfunction!(eoa, m)?)?;
    m.add_function(wrap_pyfunction!(eof, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(ed_interval, m)?)?;
    m.add_function(wrap_pyfunction!(one_way_ci, m)?)?;
    m.add_function(wrap_pyfunction!(ci_upper, m)?)?;
    m.add_function(wrap_pyfunction!(ci_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(ci_pure_regularized, m)?)?;
    m.add_function(wrap_pyfunction!(lqsm_fidelity_bound, m)?)?;
    m.add_function(wrap_pyfunction!(family15_two_round_merge, m)?)?;
    m.add_function(wrap_pyfunction!(family15_separation, m)?)?;
    m.add_function(wrap_pyfunction!(dilated_protocol_state, m)?)?;
    Ok(())
}
