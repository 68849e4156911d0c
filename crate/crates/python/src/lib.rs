use std::sync::OnceLock;

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use ::seqshare::certifier::VertexSet;
use ::seqshare::experiment::{run_experiment, ConfigLayer, ExperimentConfig};
use ::seqshare::measurements::{gamma_sequence_with_variant, validity_region_with_variant};
use ::seqshare::{
    build_gghz, hybrid_vertices, io, lp_feasible, ns2_value, run_sequence, BehaviorTable, Error,
    GghzParams, RecursionVariant, SequentialScenario,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn variant(name: &str) -> PyResult<RecursionVariant> {
    name.parse().map_err(to_py)
}

fn vertices() -> &'static VertexSet {
    static VERTICES: OnceLock<VertexSet> = OnceLock::new();
    VERTICES.get_or_init(hybrid_vertices)
}

#[pyclass(name = "BehaviorTable", frozen)]
struct PyBehaviorTable {
    inner: BehaviorTable,
}

#[pymethods]
impl PyBehaviorTable {
    #[staticmethod]
    fn uniform() -> Self {
        Self {
            inner: BehaviorTable::uniform(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::behavior_from_str(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        io::behavior_to_string(&self.inner)
    }

    #[getter]
    fn round(&self) -> usize {
        self.inner.round
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs.to_vec()
    }

    /// P(abc|xyz)
    fn prob(&self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> PyResult<f64> {
        if [x, y, z, a, b, c].iter().any(|&v| v > 1) {
            return Err(PyValueError::new_err("inputs and outcomes are bits"));
        }
        Ok(self.inner.p(x, y, z, a, b, c))
    }

    fn ns2_value(&self) -> PyResult<f64> {
        ns2_value(&self.inner).map_err(to_py)
    }

    fn no_signaling_residual(&self) -> f64 {
        self.inner.no_signaling_report().residual
    }

    fn __repr__(&self) -> String {
        format!("BehaviorTable(round={})", self.inner.round)
    }
}

#[pyclass(name = "GammaSchedule", frozen, get_all)]
struct PyGammaSchedule {
    delta: f64,
    epsilon: f64,
    recursion: String,
    gammas: Vec<f64>,
    valid_upto: usize,
}

#[pyclass(name = "Decomposition", frozen, get_all)]
struct PyDecomposition {
    feasible: bool,
    residual: f64,
    l1_residual: f64,
    group_weights: (f64, f64, f64),
    weights: Vec<f64>,
    certificate: String,
}

/// Density matrix of cos(alpha)|000> + sin(alpha)|111> as nested lists.
#[pyfunction]
fn gghz_density(alpha: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let s = build_gghz(GghzParams::new(alpha).map_err(to_py)?);
    Ok((0..8)
        .map(|i| (0..8).map(|j| s.rho().get(i, j)).collect())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (delta, epsilon, n, recursion = "printed"))]
fn gamma_sequence(
    delta: f64,
    epsilon: f64,
    n: usize,
    recursion: &str,
) -> PyResult<PyGammaSchedule> {
    let s = gamma_sequence_with_variant(delta, epsilon, n, variant(recursion)?).map_err(to_py)?;
    Ok(PyGammaSchedule {
        delta: s.delta,
        epsilon: s.epsilon,
        recursion: s.variant.to_string(),
        gammas: s.gammas,
        valid_upto: s.valid_upto,
    })
}

#[pyfunction]
#[pyo3(signature = (n, epsilon, recursion = "printed"))]
fn validity_region(n: usize, epsilon: f64, recursion: &str) -> PyResult<Option<f64>> {
    validity_region_with_variant(n, epsilon, variant(recursion)?).map_err(to_py)
}

/// One behavior table per Charlie for the GGHZ(alpha) protocol.
#[pyfunction]
#[pyo3(signature = (alpha, theta, delta, epsilon, rounds, recursion = "printed"))]
fn run_protocol(
    alpha: f64,
    theta: f64,
    delta: f64,
    epsilon: f64,
    rounds: usize,
    recursion: &str,
) -> PyResult<Vec<PyBehaviorTable>> {
    let schedule =
        gamma_sequence_with_variant(delta, epsilon, rounds, variant(recursion)?).map_err(to_py)?;
    let initial = build_gghz(GghzParams::new(alpha).map_err(to_py)?);
    let scenario = SequentialScenario::new(initial, theta, schedule, rounds).map_err(to_py)?;
    Ok(run_sequence(&scenario)
        .map_err(to_py)?
        .into_iter()
        .map(|inner| PyBehaviorTable { inner })
        .collect())
}

#[pyfunction]
fn closed_form_ns2(k: usize, alpha: f64, theta: f64, gammas: Vec<f64>) -> PyResult<f64> {
    ::seqshare::closed_form_ns2(k, alpha, theta, &gammas).map_err(to_py)
}

/// LP membership of a table in the nonsignal-local polytope.
#[pyfunction]
fn certify(table: &PyBehaviorTable) -> PyResult<PyDecomposition> {
    let r = lp_feasible(&table.inner, vertices()).map_err(to_py)?;
    Ok(PyDecomposition {
        feasible: r.feasible,
        residual: r.residual,
        l1_residual: r.l1_residual,
        group_weights: (r.group_weights[0], r.group_weights[1], r.group_weights[2]),
        weights: r.weights,
        certificate: r.certificate,
    })
}

/// Runs an experiment from a flat JSON config and returns the JSON summary.
#[pyfunction]
fn run_experiment_json(config: &str) -> PyResult<String> {
    let layer = ConfigLayer::from_json_str(config).map_err(to_py)?;
    let cfg = ExperimentConfig::from_layer(layer).map_err(to_py)?;
    Ok(run_experiment(&cfg).map_err(to_py)?.json)
}

#[pymodule]
fn seqshare(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBehaviorTable>()?;
    m.add_class::<PyGammaSchedule>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(gghz_density, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(validity_region, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_ns2, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment_json, m)?)?;
    Ok(())
}
