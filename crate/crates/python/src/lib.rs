//! Python bindings. Matrices cross the boundary as nested lists, complex
//! numbers as Python `complex`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gauss_renyi::fock::{spectral_sandwiched_renyi_sweep, state_to_fock, Recipe};
use gauss_renyi::{self as core, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows have different lengths"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn complex_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<DMatrix<Complex64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows have different lengths"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Gaussian state in (x₁..xₙ, y₁..yₙ) ordering; the vacuum has covariance ½I.
#[pyclass(name = "GaussianState", module = "gauss_renyi", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGaussianState(core::GaussianState);

#[pymethods]
impl PyGaussianState {
    #[new]
    fn new(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> PyResult<Self> {
        core::GaussianState::new(DVector::from_vec(mean), matrix(cov)?)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn vacuum(n: usize) -> Self {
        Self(core::GaussianState::vacuum(n))
    }

    #[staticmethod]
    fn thermal(t: Vec<f64>) -> PyResult<Self> {
        core::GaussianState::thermal(&t).map(Self).map_err(err)
    }

    #[staticmethod]
    fn coherent(gamma: Vec<Complex64>) -> Self {
        Self(core::coherent_state(&gamma))
    }

    #[staticmethod]
    fn squeezed_vacuum(r: f64) -> PyResult<Self> {
        core::squeezed_vacuum(r).map(Self).map_err(err)
    }

    #[getter]
    fn modes(&self) -> usize {
        self.0.modes()
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.0.mean().iter().copied().collect()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        rows(self.0.cov())
    }

    fn is_physical(&self) -> bool {
        self.0.is_physical()
    }

    /// Human-readable reasons the state is not physical; empty if it is.
    fn violations(&self) -> Vec<String> {
        self.0.validate().iter().map(ToString::to_string).collect()
    }

    fn displaced(&self, gamma: Vec<Complex64>) -> PyResult<Self> {
        self.0.displaced(&gamma).map(Self).map_err(err)
    }

    fn squeezed(&self, mode: usize, z: Complex64) -> PyResult<Self> {
        self.0.squeezed(mode, z).map(Self).map_err(err)
    }

    fn beam_split(&self, i: usize, j: usize, theta: f64, phi: f64) -> PyResult<Self> {
        self.0.beam_split(i, j, theta, phi).map(Self).map_err(err)
    }

    fn tensor(&self, other: &Self) -> Self {
        Self(core::tensor(&self.0, &other.0))
    }

    fn symplectic_eigenvalues(&self) -> PyResult<Vec<f64>> {
        core::symplectic_eigenvalues(self.0.cov()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GaussianState(modes={})", self.0.modes())
    }
}

#[pyclass(name = "E2Quadruple", module = "gauss_renyi", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyE2Quadruple(core::E2Quadruple);

#[pymethods]
impl PyE2Quadruple {
    #[new]
    fn new(c: f64, mu: Vec<Complex64>, a: Vec<Vec<Complex64>>, lam: Vec<Vec<Complex64>>) -> PyResult<Self> {
        core::E2Quadruple::new(c, DVector::from_vec(mu), complex_matrix(a)?, complex_matrix(lam)?)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c()
    }

    #[getter]
    fn ln_c(&self) -> f64 {
        self.0.ln_c()
    }

    #[getter]
    fn mu(&self) -> Vec<Complex64> {
        self.0.mu().iter().copied().collect()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.a())
    }

    #[getter]
    fn lam(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.lambda())
    }

    fn trace(&self) -> PyResult<f64> {
        core::trace_positive_e2(&self.0).map_err(err)
    }

    fn generating_function(&self, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<Complex64> {
        core::generating_function(&self.0, &u, &v).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("E2Quadruple(modes={}, c={})", self.0.modes(), self.0.c())
    }
}

#[pyclass(name = "EntropyReport", module = "gauss_renyi", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyEntropyReport {
    alpha: f64,
    divergence: f64,
    t_alpha: f64,
    trace_z: f64,
    s: Vec<f64>,
    t_z: Vec<f64>,
    p_s: f64,
    p_tz: f64,
    p_alpha_tz: f64,
}

impl From<core::EntropyReport> for PyEntropyReport {
    fn from(r: core::EntropyReport) -> Self {
        Self {
            alpha: r.alpha,
            divergence: r.divergence,
            t_alpha: r.t_alpha,
            trace_z: r.trace_z,
            s: r.s,
            t_z: r.t_z,
            p_s: r.p_s,
            p_tz: r.p_tz,
            p_alpha_tz: r.p_alpha_tz,
        }
    }
}

#[pymethods]
impl PyEntropyReport {
    fn __repr__(&self) -> String {
        format!("EntropyReport(alpha={}, divergence={})", self.alpha, self.divergence)
    }
}

#[pyclass(name = "WilliamsonForm", module = "gauss_renyi", frozen, get_all)]
struct PyWilliamsonForm {
    /// Symplectic `L` with `Lᵀ S L = diag(d, d)`.
    l: Vec<Vec<f64>>,
    d: Vec<f64>,
    t: Vec<f64>,
}

#[pyfunction]
fn sandwiched_renyi(rho: &PyGaussianState, sigma: &PyGaussianState, alpha: f64) -> PyResult<PyEntropyReport> {
    core::sandwiched_renyi(&rho.0, &sigma.0, alpha)
        .map(Into::into)
        .map_err(err)
}

/// One report per α; σ is reduced once.
#[pyfunction]
fn sandwiched_renyi_sweep(
    rho: &PyGaussianState,
    sigma: &PyGaussianState,
    alphas: Vec<f64>,
) -> PyResult<Vec<PyEntropyReport>> {
    core::sandwiched_renyi_sweep(&rho.0, &sigma.0, &alphas)
        .map(|v| v.into_iter().map(Into::into).collect())
        .map_err(err)
}

#[pyfunction]
fn williamson(cov: Vec<Vec<f64>>) -> PyResult<PyWilliamsonForm> {
    let w = core::williamson_decompose(&matrix(cov)?).map_err(err)?;
    Ok(PyWilliamsonForm {
        l: rows(w.l.matrix()),
        d: w.d.clone(),
        t: w.t.values().to_vec(),
    })
}

#[pyfunction]
fn state_to_e2(state: &PyGaussianState) -> PyResult<PyE2Quadruple> {
    core::state_to_e2(&state.0).map(PyE2Quadruple).map_err(err)
}

#[pyfunction]
fn e2_to_state(q: &PyE2Quadruple) -> PyResult<PyGaussianState> {
    core::e2_to_state(&q.0).map(PyGaussianState).map_err(err)
}

/// Brute-force value on a truncated Fock space; one-mode states only.
#[pyfunction]
#[pyo3(signature = (rho, sigma, alphas, cutoff = 60))]
fn fock_sandwiched_renyi(
    rho: &PyGaussianState,
    sigma: &PyGaussianState,
    alphas: Vec<f64>,
    cutoff: usize,
) -> PyResult<Vec<f64>> {
    let rho = state_to_fock(&Recipe::from_state(&rho.0).map_err(err)?, cutoff).map_err(err)?;
    let sigma = state_to_fock(&Recipe::from_state(&sigma.0).map_err(err)?, cutoff).map_err(err)?;
    spectral_sandwiched_renyi_sweep(&rho, &sigma, &alphas).map_err(err)
}

#[pymodule]
#[pyo3(name = "gauss_renyi")]
fn gauss_renyi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGaussianState>()?;
    m.add_class::<PyE2Quadruple>()?;
    m.add_class::<PyEntropyReport>()?;
    m.add_class::<PyWilliamsonForm>()?;
    m.add_function(wrap_pyfunction!(sandwiched_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(sandwiched_renyi_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(williamson, m)?)?;
    m.add_function(wrap_pyfunction!(state_to_e2, m)?)?;
    m.add_function(wrap_pyfunction!(e2_to_state, m)?)?;
    m.add_function(wrap_pyfunction!(fock_sandwiched_renyi, m)?)?;
    Ok(())
}
