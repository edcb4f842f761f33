//! Python bindings for `bootcorr`.
//!
//! Matrices cross the boundary as lists of row lists, so the module has no
//! numpy dependency; `numpy.asarray` on the results is enough on the Python
//! side.

use bootcorr::{CorrelationMatrix, DataMatrix, MomentSource, SimulationConfig};
use nalgebra::DMatrix;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: bootcorr::Error) -> PyErr {
    match e {
        bootcorr::Error::TooManyDegenerateRedraws { .. } => PyArithmeticError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Row lists to a dense matrix; every row must have the same length.
pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let n = rows.len();
    let t = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != t) {
        return Err(format!("row {i} has {} entries, expected {t}", rows[i].len()));
    }
    Ok(DMatrix::from_row_iterator(n, t, rows.iter().flatten().copied()))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn data_from(rows: Vec<Vec<f64>>) -> PyResult<DataMatrix> {
    let m = rows_to_matrix(&rows).map_err(PyValueError::new_err)?;
    DataMatrix::new(m).map_err(to_py)
}

fn correlation_from(rows: Vec<Vec<f64>>) -> PyResult<CorrelationMatrix> {
    let m = rows_to_matrix(&rows).map_err(PyValueError::new_err)?;
    CorrelationMatrix::from_values(m).map_err(to_py)
}

fn moment_source(approx: bool) -> MomentSource {
    if approx {
        MomentSource::Approximate
    } else {
        MomentSource::Exact
    }
}

/// Probabilities of 1..=t distinct columns in one bootstrap draw.
#[pyfunction]
fn occupancy_pmf(t: usize) -> PyResult<Vec<f64>> {
    Ok(bootcorr::occupancy_pmf(t).map_err(to_py)?.pmf().to_vec())
}

/// `(mean, variance)` of the distinct-column count.
#[pyfunction]
fn exact_moments(t: usize) -> PyResult<(f64, f64)> {
    bootcorr::exact_moments(t).map_err(to_py)
}

#[pyfunction]
fn approx_moments(t: usize) -> (f64, f64) {
    bootcorr::approx_moments(t)
}

#[pyfunction]
fn zero_count(n: usize, u: usize) -> usize {
    bootcorr::zero_count(n, u)
}

#[pyfunction]
#[pyo3(signature = (n, t, k, approx_moments=false))]
fn prob_pd(n: usize, t: usize, k: f64, approx_moments: bool) -> PyResult<f64> {
    bootcorr::predictor::prob_pd_with(n, t, k, moment_source(approx_moments)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, t, a, approx_moments=false))]
fn k_plus(n: usize, t: usize, a: f64, approx_moments: bool) -> PyResult<f64> {
    bootcorr::predictor::k_plus_with(n, t, a, moment_source(approx_moments)).map_err(to_py)
}

#[pyfunction]
fn k_star(n: usize, q: f64) -> PyResult<f64> {
    bootcorr::k_star(n, q).map_err(to_py)
}

#[pyfunction]
fn k_limit(q: f64) -> f64 {
    bootcorr::k_limit(q)
}

#[pyfunction]
fn alpha_to_a(alpha: f64) -> PyResult<f64> {
    bootcorr::alpha_to_a(alpha).map_err(to_py)
}

/// Pearson correlation of the rows of `data` (objects by features).
#[pyfunction]
fn pearson(data: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let c = bootcorr::pearson(&data_from(data)?).map_err(to_py)?;
    Ok(matrix_to_rows(c.values()))
}

/// Average of `k` bootstrap correlation matrices. Returns
/// `(matrix, unique_counts, redraws)`.
#[pyfunction]
#[pyo3(signature = (data, k, seed=0))]
fn average_correlation(
    py: Python<'_>,
    data: Vec<Vec<f64>>,
    k: usize,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Vec<usize>, usize)> {
    let data = data_from(data)?;
    let avg = py
        .detach(|| bootcorr::average_correlation(&data, k, seed))
        .map_err(to_py)?;
    Ok((matrix_to_rows(avg.matrix.values()), avg.unique_counts, avg.redraws))
}

/// Ascending eigenvalues of a correlation matrix.
#[pyfunction]
fn eigenvalues(matrix: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let s = bootcorr::eigenvalues(&correlation_from(matrix)?).map_err(to_py)?;
    Ok(s.eigenvalues().to_vec())
}

/// `(verdict, smallest eigenvalue)`.
#[pyfunction]
fn is_positive_definite(matrix: Vec<Vec<f64>>) -> PyResult<(bool, f64)> {
    bootcorr::is_positive_definite(&correlation_from(matrix)?).map_err(to_py)
}

/// Seeded standard-normal data, `n` rows by `t` columns.
#[pyfunction]
#[pyo3(signature = (n, t, seed=0))]
fn generate_data(n: usize, t: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let d = bootcorr::generate_data(n, t, seed).map_err(to_py)?;
    Ok(matrix_to_rows(d.values()))
}

/// Monte Carlo PD sweep. Returns one dict per k with the keys `k`,
/// `empirical_pd_frequency`, `predicted_prob`, `mean_lambda0`, `redraws`.
#[pyfunction]
#[pyo3(signature = (n, t, k_values, trials, seed=0))]
fn run_pd_sweep(
    py: Python<'_>,
    n: usize,
    t: usize,
    k_values: Vec<usize>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
    let config = SimulationConfig::new(n, t, k_values, trials, seed).map_err(to_py)?;
    let report = py.detach(|| bootcorr::run_pd_sweep(&config)).map_err(to_py)?;
    report
        .per_k
        .iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("k", r.k)?;
            d.set_item("empirical_pd_frequency", r.empirical_pd_frequency)?;
            d.set_item("predicted_prob", r.predicted)?;
            d.set_item("mean_lambda0", r.mean_lambda0)?;
            d.set_item("redraws", r.redraws)?;
            Ok(d.unbind())
        })
        .collect()
}

/// Replicate budget for `n` objects and `t` features.
#[pyclass(frozen, get_all, module = "bootcorr_py")]
struct BootstrapBudget {
    n: usize,
    t: usize,
    a: f64,
    k_plus: f64,
    k_star: f64,
    k_limit: f64,
    k_upper: usize,
    recommended: usize,
}

impl From<bootcorr::BootstrapBudget> for BootstrapBudget {
    fn from(b: bootcorr::BootstrapBudget) -> Self {
        Self {
            n: b.n,
            t: b.t,
            a: b.a,
            k_plus: b.k_plus,
            k_star: b.k_star,
            k_limit: b.k_limit,
            k_upper: b.k_upper,
            recommended: b.recommended(),
        }
    }
}

#[pymethods]
impl BootstrapBudget {
    #[new]
    fn new(n: usize, t: usize, a: f64) -> PyResult<Self> {
        Ok(bootcorr::BootstrapBudget::new(n, t, a).map_err(to_py)?.into())
    }

    #[staticmethod]
    fn from_alpha(n: usize, t: usize, alpha: f64) -> PyResult<Self> {
        Ok(bootcorr::BootstrapBudget::from_alpha(n, t, alpha).map_err(to_py)?.into())
    }

    fn __repr__(&self) -> String {
        format!(
            "BootstrapBudget(n={}, t={}, a={}, k_plus={}, recommended={})",
            self.n, self.t, self.a, self.k_plus, self.recommended
        )
    }
}

#[pymodule]
fn bootcorr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(occupancy_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(exact_moments, m)?)?;
    m.add_function(wrap_pyfunction!(approx_moments, m)?)?;
    m.add_function(wrap_pyfunction!(zero_count, m)?)?;
    m.add_function(wrap_pyfunction!(prob_pd, m)?)?;
    m.add_function(wrap_pyfunction!(k_plus, m)?)?;
    m.add_function(wrap_pyfunction!(k_star, m)?)?;
    m.add_function(wrap_pyfunction!(k_limit, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_to_a, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(average_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(is_positive_definite, m)?)?;
    m.add_function(wrap_pyfunction!(generate_data, m)?)?;
    m.add_function(wrap_pyfunction!(run_pd_sweep, m)?)?;
    m.add_class::<BootstrapBudget>()?;
    Ok(())
}
