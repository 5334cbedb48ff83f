//! Python bindings for `lnt_core`.

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lnt_core::hamiltonian::spectrum_at;
use lnt_core::{EntropyBasis, Error, Symmetry, Tracking, TwoModeBasis};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Index { .. } => PyIndexError::new_err(e.to_string()),
        Error::Domain(_) | Error::Config(_) | Error::Contract(_) | Error::Parse { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn basis(n_single: usize, symmetry: &str) -> PyResult<TwoModeBasis> {
    let sym: Symmetry = symmetry.parse().map_err(to_py)?;
    TwoModeBasis::new(n_single, sym).map_err(to_py)
}

fn columns(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Parameters of one molecule: coupling ratios, harmonic frequency (cm⁻¹), Morse depth.
#[pyclass(name = "MoleculeParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams(lnt_core::MoleculeParams);

#[pymethods]
impl PyParams {
    #[new]
    fn new(x_f: f64, x_g: f64, omega: f64, kappa: f64) -> PyResult<Self> {
        lnt_core::MoleculeParams::new(x_f, x_g, omega, kappa).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn water() -> Self {
        Self(lnt_core::MoleculeParams::water())
    }

    #[staticmethod]
    fn carbon_dioxide() -> Self {
        Self(lnt_core::MoleculeParams::carbon_dioxide())
    }

    /// Parameters at `t` on the default water → CO₂ path.
    #[staticmethod]
    fn on_path(t: f64) -> PyResult<Self> {
        lnt_core::PathSpec::default_path().params_at(t).map(Self).map_err(to_py)
    }

    #[getter]
    fn x_f(&self) -> f64 {
        self.0.x_f
    }

    #[getter]
    fn x_g(&self) -> f64 {
        self.0.x_g
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    /// Normal-mode frequencies `(ω_g, ω_u)` of the quadratic model, cm⁻¹.
    fn normal_frequencies(&self) -> (f64, f64) {
        let c = lnt_core::harmonic_couplings(&self.0);
        (c.omega_g, c.omega_u)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!("MoleculeParams(x_f={}, x_g={}, omega={}, kappa={})", p.x_f, p.x_g, p.omega, p.kappa)
    }
}

/// Dimensionless Morse well with its lowest `n_basis` bound states.
#[pyclass(name = "MorseWell", frozen)]
struct PyMorseWell(lnt_core::MorseWell);

#[pymethods]
impl PyMorseWell {
    #[new]
    fn new(kappa: f64, omega: f64, n_basis: usize) -> PyResult<Self> {
        lnt_core::MorseWell::new(kappa, omega, n_basis).map(Self).map_err(to_py)
    }

    /// `E_v / ħω`.
    fn energy(&self, v: usize) -> PyResult<f64> {
        self.0.energy(v).map_err(to_py)
    }

    fn wavefunction(&self, v: usize, grid: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.wavefunction(v, &grid).map_err(to_py)
    }

    /// `⟨v′|1 − e^{−q̄}|v⟩` as a list of rows.
    fn matrix_y(&self) -> PyResult<Vec<Vec<f64>>> {
        self.0.matrix_y().map(|m| rows(&m)).map_err(to_py)
    }

    /// `⟨v′|d/dq̄|v⟩` as a list of rows.
    fn matrix_p(&self) -> PyResult<Vec<Vec<f64>>> {
        self.0.matrix_p().map(|m| rows(&m)).map_err(to_py)
    }
}

/// Eigenvalues (cm⁻¹, ascending) and eigenvectors (one list per state).
#[pyfunction]
#[pyo3(signature = (params, n_single = lnt_core::DEFAULT_N_SINGLE, symmetry = "symmetric"))]
fn spectrum(params: &PyParams, n_single: usize, symmetry: &str) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let sp = spectrum_at(&basis(n_single, symmetry)?, &params.0).map_err(to_py)?;
    Ok((sp.energies.clone(), columns(&sp.eigenvectors)))
}

/// Basis labels `(v1, v2)` in the order used by state vectors.
#[pyfunction]
#[pyo3(signature = (n_single = lnt_core::DEFAULT_N_SINGLE, symmetry = "symmetric"))]
fn basis_labels(n_single: usize, symmetry: &str) -> PyResult<Vec<(usize, usize)>> {
    Ok(basis(n_single, symmetry)?.states().to_vec())
}

/// Energies along a uniform stretch of the default path: `[(t, energies), ...]`.
#[pyfunction]
#[pyo3(signature = (t_start, t_end, t_step = 5e-4, n_single = lnt_core::DEFAULT_N_SINGLE, symmetry = "symmetric", tracking = "energy"))]
fn scan(
    py: Python<'_>,
    t_start: f64,
    t_end: f64,
    t_step: f64,
    n_single: usize,
    symmetry: &str,
    tracking: &str,
) -> PyResult<Vec<(f64, Vec<f64>)>> {
    let b = basis(n_single, symmetry)?;
    let tracking: Tracking = tracking.parse().map_err(to_py)?;
    let path = lnt_core::PathSpec::uniform(
        lnt_core::MoleculeParams::water(),
        lnt_core::MoleculeParams::carbon_dioxide(),
        t_start,
        t_end,
        t_step,
    )
    .map_err(to_py)?;
    let points = py.detach(|| lnt_core::scan(&path, &b, tracking)).map_err(to_py)?;
    Ok(points.into_iter().map(|p| (p.t, p.energies)).collect())
}

/// `|⟨a|b⟩|²` of two normalized real states.
#[pyfunction]
fn fidelity(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    lnt_core::fidelity(&a, &b).map_err(to_py)
}

/// Entanglement entropy (nats) of a state given in the basis of `basis_labels`.
#[pyfunction]
#[pyo3(signature = (psi, n_single = lnt_core::DEFAULT_N_SINGLE, symmetry = "symmetric", convention = "label"))]
fn entropy(psi: Vec<f64>, n_single: usize, symmetry: &str, convention: &str) -> PyResult<f64> {
    let conv: EntropyBasis = convention.parse().map_err(to_py)?;
    lnt_core::entropy(&psi, &basis(n_single, symmetry)?, conv).map_err(to_py)
}

/// Classical two-oscillator Hamiltonian in dimensionless units.
#[pyclass(name = "ClassicalSystem", frozen)]
struct PyClassical(lnt_core::ClassicalSystem);

#[pymethods]
impl PyClassical {
    #[new]
    fn new(kappa: f64, x_f: f64, t: f64) -> PyResult<Self> {
        lnt_core::ClassicalSystem::new(kappa, x_f, t).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_params(params: &PyParams) -> PyResult<Self> {
        lnt_core::ClassicalSystem::from_params(&params.0).map(Self).map_err(to_py)
    }

    fn energy(&self, q1: f64, q2: f64, p1: f64, p2: f64) -> f64 {
        self.0.energy(&lnt_core::PhaseState::new(q1, q2, p1, p2))
    }

    /// Advances `(q1, q2, p1, p2)` by `steps` steps of size `h`.
    #[pyo3(signature = (state, h, steps = 1, integrator = "yoshida4"))]
    fn evolve(&self, state: (f64, f64, f64, f64), h: f64, steps: usize, integrator: &str) -> PyResult<(f64, f64, f64, f64)> {
        let integ: lnt_core::Integrator = integrator.parse().map_err(to_py)?;
        let mut s = lnt_core::PhaseState::new(state.0, state.1, state.2, state.3);
        for _ in 0..steps {
            s = self.0.advance(&s, h, integ).map_err(to_py)?;
        }
        Ok((s.q1, s.q2, s.p1, s.p2))
    }

    /// Section points `[(trajectory_id, q1, p1), ...]` at energy `E/ħω`.
    #[pyo3(signature = (energy, ic_grid = 16, max_crossings = 400, max_time = 2e4, h = 0.005))]
    fn poincare_section(
        &self,
        py: Python<'_>,
        energy: f64,
        ic_grid: usize,
        max_crossings: usize,
        max_time: f64,
        h: f64,
    ) -> PyResult<Vec<(usize, f64, f64)>> {
        let spec = lnt_core::SectionSpec {
            ic_grid: (ic_grid, ic_grid),
            max_crossings,
            max_time,
            h,
            ..lnt_core::SectionSpec::new(energy)
        };
        let res = py.detach(|| lnt_core::poincare_section(&spec, &self.0)).map_err(to_py)?;
        Ok(res.points.iter().map(|p| (p.trajectory, p.q1, p.p1)).collect())
    }

    /// Largest Lyapunov exponent from `(q1, q2, p1, p2)`; `None` if the trajectory escapes.
    #[pyo3(signature = (state, horizon = 2e4, h = 0.01))]
    fn lyapunov(&self, py: Python<'_>, state: (f64, f64, f64, f64), horizon: f64, h: f64) -> PyResult<Option<f64>> {
        let spec = lnt_core::LyapunovSpec {
            horizon,
            h,
            ..Default::default()
        };
        let ic = lnt_core::PhaseState::new(state.0, state.1, state.2, state.3);
        let out = py.detach(|| lnt_core::lyapunov_estimate(&ic, &self.0, &spec)).map_err(to_py)?;
        Ok(out.exponent())
    }
}

#[pymodule]
fn lnt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyMorseWell>()?;
    m.add_class::<PyClassical>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(basis_labels, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    Ok(())
}
