//! Python bindings. Matrices cross the boundary as lists of row lists.

use std::sync::{Mutex, OnceLock};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use primefeat::baseline::{generate_gaussian, BaselineConfig, DEFAULT_SEED};
use primefeat::basis::{PrimeBasis, StaticBasis};
use primefeat::encoder::{self, Codebook, CodebookMeta, Source};
use primefeat::metrics;
use primefeat::synth::{self, DatasetKind};
use primefeat::{Error, Matrix, PrimeTable};

// One sieve shared by every call in the interpreter.
fn with_primes<T>(f: impl FnOnce(&mut PrimeTable) -> primefeat::Result<T>) -> PyResult<T> {
    static TABLE: OnceLock<Mutex<PrimeTable>> = OnceLock::new();
    let mut table = TABLE
        .get_or_init(|| Mutex::new(PrimeTable::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    f(&mut table).map_err(to_py)
}

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NumericalFailure(_) | Error::ResourceExhausted { .. } | Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(to_py)
}

/// Encoder with basis `W[i][j] = sqrt(p_{i*d + j})`.
#[pyclass(name = "DynamicPrime", frozen)]
struct PyDynamicPrime {
    basis: PrimeBasis,
}

#[pymethods]
impl PyDynamicPrime {
    #[new]
    #[pyo3(signature = (d_in, d_out, sigma))]
    fn new(d_in: usize, d_out: usize, sigma: f64) -> PyResult<Self> {
        let basis = with_primes(|p| PrimeBasis::build(d_in, d_out, sigma, p))?;
        Ok(PyDynamicPrime { basis })
    }

    #[getter]
    fn d_in(&self) -> usize {
        self.basis.d_in()
    }

    #[getter]
    fn d_out(&self) -> usize {
        self.basis.d_out()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.basis.sigma()
    }

    #[getter]
    fn injectivity_radius(&self) -> f64 {
        self.basis.injectivity_radius()
    }

    /// True when `d_out >= 2 * d_in`, so decoding can be exact.
    #[getter]
    fn is_overdetermined(&self) -> bool {
        self.basis.is_overdetermined()
    }

    fn weights(&self) -> Vec<Vec<f64>> {
        self.basis.weights().to_rows()
    }

    fn forward(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        encoder::forward(&self.basis, &x).map(|z| z.0).map_err(to_py)
    }

    fn reverse(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        encoder::reverse(&self.basis, &z).map_err(to_py)
    }

    fn forward_batch(&self, py: Python<'_>, xs: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let xs = to_matrix(xs)?;
        py.detach(|| encoder::forward_batch(&self.basis, &xs))
            .map(|m| m.to_rows())
            .map_err(to_py)
    }

    fn reverse_batch(&self, py: Python<'_>, zs: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let zs = to_matrix(zs)?;
        py.detach(|| encoder::reverse_batch(&self.basis, &zs))
            .map(|m| m.to_rows())
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "DynamicPrime(d_in={}, d_out={}, sigma={})",
            self.basis.d_in(),
            self.basis.d_out(),
            self.basis.sigma()
        )
    }
}

/// The first `count` primes.
#[pyfunction]
fn primes(count: usize) -> PyResult<Vec<u64>> {
    with_primes(|p| {
        p.ensure_count(count)?;
        Ok(p.values()[..count].to_vec())
    })
}

/// `n × dim` static sequence codebook.
#[pyfunction]
fn static_codebook(py: Python<'_>, n: usize, dim: usize) -> PyResult<Vec<Vec<f64>>> {
    let basis = with_primes(|p| StaticBasis::build(dim, p))?;
    Ok(py.detach(|| encoder::generate_static(&basis, n)).rows.to_rows())
}

/// Seeded Gaussian codebook with unit-norm rows.
#[pyfunction]
#[pyo3(signature = (n, dim, seed = DEFAULT_SEED))]
fn gaussian_codebook(n: usize, dim: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    generate_gaussian(&BaselineConfig { seed, n, dim })
        .map(|cb| cb.rows.to_rows())
        .map_err(to_py)
}

/// Coherence report for a codebook. Rows are normalized first.
#[pyfunction]
#[pyo3(signature = (rows, source = "gaussian_baseline"))]
fn gram_report<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, source: &str) -> PyResult<Bound<'py, PyDict>> {
    let source: Source = source.parse().map_err(to_py)?;
    let rows = to_matrix(rows)?;
    let cb = Codebook {
        meta: CodebookMeta {
            source,
            n: rows.nrows(),
            dim: rows.ncols(),
            sigma: None,
            seed: None,
        },
        rows,
    };
    let r = py.detach(|| metrics::report(&cb)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("source", r.source.as_str())?;
    d.set_item("n", r.n)?;
    d.set_item("dim", r.dim)?;
    d.set_item("e_rms", r.e_rms)?;
    d.set_item("mu_max", r.mu_max)?;
    d.set_item("welch", r.welch)?;
    d.set_item("optimality_ratio", r.optimality_ratio)?;
    d.set_item("excess_coherence", r.excess_coherence)?;
    d.set_item("mean_offdiag", r.mean_offdiag)?;
    d.set_item("histogram", r.histogram)?;
    Ok(d)
}

/// `sqrt((n - dim) / (dim (n - 1)))`, or None when `n <= dim`.
#[pyfunction]
fn welch_bound(n: usize, dim: usize) -> Option<f64> {
    metrics::welch_bound(n, dim)
}

#[pyfunction]
fn rms_error(sims: Vec<f64>) -> PyResult<f64> {
    metrics::rms_error(&sims).map_err(to_py)
}

fn dataset(kind: DatasetKind, n: usize, noise: f64, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<u8>)> {
    let ds = synth::make(kind, n, noise, seed).map_err(to_py)?;
    Ok((ds.points.to_rows(), ds.labels))
}

/// Two interleaved spirals as `(points, labels)`.
#[pyfunction]
#[pyo3(signature = (n, noise = 0.0, seed = DEFAULT_SEED))]
fn make_spiral(n: usize, noise: f64, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<u8>)> {
    dataset(DatasetKind::Spiral, n, noise, seed)
}

/// Concentric circles of radius 0.5 and 1.0 as `(points, labels)`.
#[pyfunction]
#[pyo3(signature = (n, noise = 0.0, seed = DEFAULT_SEED))]
fn make_circles(n: usize, noise: f64, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<u8>)> {
    dataset(DatasetKind::Circles, n, noise, seed)
}

#[pymodule]
#[pyo3(name = "primefeat")]
fn primefeat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDynamicPrime>()?;
    m.add_function(wrap_pyfunction!(primes, m)?)?;
    m.add_function(wrap_pyfunction!(static_codebook, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_codebook, m)?)?;
    m.add_function(wrap_pyfunction!(gram_report, m)?)?;
    m.add_function(wrap_pyfunction!(welch_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rms_error, m)?)?;
    m.add_function(wrap_pyfunction!(make_spiral, m)?)?;
    m.add_function(wrap_pyfunction!(make_circles, m)?)?;
    Ok(())
}
