//! Python bindings for `tangle-roof`.
//!
//! States are passed as lists of complex amplitudes and density matrices as
//! nested lists; results come back as plain Python numbers, lists and dicts.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tangle_roof::charcurve::{characteristic_curve, convex_hull_curve, DEFAULT_GRID_N, DEFAULT_PHASE_GRID};
use tangle_roof::states::DEFAULT_RANK_TOLERANCE;
use tangle_roof::zeropoly::{intersect_family, zero_polytope, PolytopeOutcome};
use tangle_roof::{
    eigendecompose, named, roof, DensityMatrix, Error, ProjectivePoint, PureState, RankTwoPencil,
    TangleDescriptor,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn n_qubits_of(len: usize) -> PyResult<usize> {
    if len.is_power_of_two() && len >= 2 {
        Ok(len.trailing_zeros() as usize)
    } else {
        Err(PyValueError::new_err(format!("{len} amplitudes is not a power of two")))
    }
}

/// A normalized pure state of `n` qubits; qubit 0 is the most significant.
#[pyclass(name = "State", module = "tangle_roof_py", from_py_object)]
#[derive(Clone)]
struct PyState(PureState);

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (amplitudes, normalize = false))]
    fn new(amplitudes: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let n = n_qubits_of(amplitudes.len())?;
        let state = if normalize {
            PureState::normalized(n, amplitudes)
        } else {
            PureState::new(n, amplitudes)
        }
        .map_err(err)?;
        Ok(Self(state))
    }

    /// Built-in state: ghz, w, bell, psi-i, psi-ii.
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        named::by_name(name).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("State(n_qubits={})", self.0.n_qubits())
    }
}

/// A density matrix on `n` qubits.
#[pyclass(name = "Density", module = "tangle_roof_py", from_py_object)]
#[derive(Clone)]
struct PyDensity(DensityMatrix);

#[pymethods]
impl PyDensity {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = n_qubits_of(rows.len())?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix is not square"));
        }
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        DensityMatrix::new(n, m).map(Self).map_err(err)
    }

    /// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`.
    #[staticmethod]
    fn mixture(terms: Vec<(f64, PyState)>) -> PyResult<Self> {
        let terms: Vec<(f64, &PureState)> = terms.iter().map(|(p, s)| (*p, &s.0)).collect();
        DensityMatrix::from_mixture(&terms).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
    }
}

fn descriptor(name: Option<&str>, n_qubits: usize) -> PyResult<TangleDescriptor> {
    match name {
        Some(name) => TangleDescriptor::by_name(name),
        None => TangleDescriptor::for_qubits(n_qubits),
    }
    .map_err(err)
}

/// Tangle of a normalized state; the tangle defaults by register size.
#[pyfunction]
#[pyo3(signature = (state, tangle = None))]
fn tangle(state: &PyState, tangle: Option<&str>) -> PyResult<f64> {
    descriptor(tangle, state.0.n_qubits())?.tangle(&state.0).map_err(err)
}

/// Value of the tangle polynomial before taking the modulus.
#[pyfunction]
#[pyo3(signature = (state, tangle = None))]
fn pre_modulus(state: &PyState, tangle: Option<&str>) -> PyResult<Complex64> {
    descriptor(tangle, state.0.n_qubits())?.pre_modulus(&state.0).map_err(err)
}

#[pyfunction]
fn wootters_concurrence(rho: &PyDensity) -> PyResult<f64> {
    roof::wootters_concurrence(&rho.0).map_err(err)
}

/// Characteristic curve of the pencil `psi0 + z psi1` with its convex
/// envelope, as a dict of equal-length lists.
#[pyfunction]
#[pyo3(signature = (psi0, psi1, tangle = None, grid_n = DEFAULT_GRID_N, phase_grid = DEFAULT_PHASE_GRID))]
fn curve<'py>(
    py: Python<'py>,
    psi0: &PyState,
    psi1: &PyState,
    tangle: Option<&str>,
    grid_n: usize,
    phase_grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let pencil = RankTwoPencil::new(psi0.0.clone(), psi1.0.clone(), 0.5).map_err(err)?;
    let desc = descriptor(tangle, pencil.n_qubits())?;
    let curve = py
        .detach(|| characteristic_curve(&pencil, &desc, grid_n, phase_grid))
        .map_err(err)?;
    let hull = convex_hull_curve(&curve);
    let out = PyDict::new(py);
    out.set_item("q", curve.samples.iter().map(|s| s.q).collect::<Vec<_>>())?;
    out.set_item("tau_tilde", curve.samples.iter().map(|s| s.tau_tilde).collect::<Vec<_>>())?;
    out.set_item("phi_star", curve.samples.iter().map(|s| s.phi_star).collect::<Vec<_>>())?;
    out.set_item(
        "tau_star",
        curve.samples.iter().map(|s| hull.evaluate(s.q)).collect::<Vec<_>>(),
    )?;
    out.set_item("vertices", hull.vertices.clone())?;
    Ok(out)
}

/// Zero-polytope corners of the pencil and the `p`-interval of
/// `p·π_psi0 + (1−p)·π_psi1` inside it. `None` if every state of the
/// pencil has zero tangle.
#[pyfunction]
#[pyo3(signature = (psi0, psi1, tangle = None))]
fn zero_polytope_corners<'py>(
    py: Python<'py>,
    psi0: &PyState,
    psi1: &PyState,
    tangle: Option<&str>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let pencil = RankTwoPencil::new(psi0.0.clone(), psi1.0.clone(), 0.5).map_err(err)?;
    let desc = descriptor(tangle, pencil.n_qubits())?;
    let poly = match zero_polytope(&pencil, &desc).map_err(err)? {
        PolytopeOutcome::WholePencilZero => return Ok(None),
        PolytopeOutcome::Polytope(p) => p,
    };
    let corners = poly
        .corners
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            let z = match c.root {
                ProjectivePoint::Finite(z) => Some(z),
                ProjectivePoint::Infinity => None,
            };
            d.set_item("z", z)?;
            d.set_item("multiplicity", c.multiplicity)?;
            d.set_item("q", c.weight)?;
            d.set_item("phi", c.phase)?;
            d.set_item("state", PyState(c.state.clone()))?;
            d.set_item("bloch", (c.bloch.x, c.bloch.y, c.bloch.z))?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("corners", corners)?;
    out.set_item("intervals", intersect_family(&poly).intervals)?;
    Ok(Some(out))
}

fn certificate_dict<'py>(py: Python<'py>, cert: roof::RoofCertificate) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("p", cert.p)?;
    out.set_item("lower", cert.lower)?;
    out.set_item("upper", cert.upper)?;
    out.set_item("gap", cert.gap)?;
    out.set_item("certified", cert.status == roof::CertificateStatus::Certified)?;
    out.set_item("reconstruction_error", cert.reconstruction_error)?;
    out.set_item("weights", cert.decomposition.weights)?;
    out.set_item(
        "states",
        cert.decomposition.states.into_iter().map(PyState).collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Certified 3-tangle roof of `p·GHZ + (1−p)·W`.
#[pyfunction]
#[pyo3(signature = (p, grid_n = DEFAULT_GRID_N, phase_grid = DEFAULT_PHASE_GRID))]
fn ghz_w_roof<'py>(py: Python<'py>, p: f64, grid_n: usize, phase_grid: usize) -> PyResult<Bound<'py, PyDict>> {
    let cert = py
        .detach(|| roof::GhzWRoof::new(grid_n, phase_grid).and_then(|r| r.certificate(p)))
        .map_err(err)?;
    certificate_dict(py, cert)
}

/// Best decomposition found by descent over mixing isometries:
/// `(value, weights, states)`.
#[pyfunction]
#[pyo3(signature = (rho, tangle = None, m = None, restarts = 20, seed = 42))]
fn upper_bound_search(
    py: Python<'_>,
    rho: &PyDensity,
    tangle: Option<&str>,
    m: Option<usize>,
    restarts: usize,
    seed: u64,
) -> PyResult<(f64, Vec<f64>, Vec<PyState>)> {
    let desc = descriptor(tangle, rho.0.n_qubits())?;
    let eig = eigendecompose(&rho.0, DEFAULT_RANK_TOLERANCE);
    let m = m.unwrap_or(desc.degree().max(eig.rank));
    let out = py
        .detach(|| roof::upper_bound_search(&eig, &desc, m, restarts, seed))
        .map_err(err)?;
    Ok((
        out.value,
        out.decomposition.weights,
        out.decomposition.states.into_iter().map(PyState).collect(),
    ))
}

#[pymodule]
pub fn tangle_roof_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(tangle, m)?)?;
    m.add_function(wrap_pyfunction!(pre_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(wootters_concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(zero_polytope_corners, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_w_roof, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_search, m)?)?;
    Ok(())
}
