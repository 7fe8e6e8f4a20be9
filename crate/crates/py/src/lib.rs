//! Python module `nhcse`.

use std::path::PathBuf;

use nhcse_cli::config::{Scenario, ScenarioConfig};
use nhcse_cli::{runner, run_to_dir as cli_run_to_dir, CliError};
use nhcse_core::continuum::{self, ChiralModeSolution, DissipationField, WallType};
use nhcse_core::hatano_nelson::{hn_localization_length as hn_xi, ChainEnd, HnLocalization};
use nhcse_core::topology::{self, BlochMap};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn core_err(e: nhcse_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

/// Bloch Hamiltonian of the Haldane model with optional sublattice mass and loss.
#[pyclass(name = "BlochMap", frozen)]
struct PyBlochMap(BlochMap);

#[pymethods]
impl PyBlochMap {
    #[new]
    #[pyo3(signature = (t1=1.0, t2=0.2, phi=std::f64::consts::FRAC_PI_2, mass=0.0))]
    fn new(t1: f64, t2: f64, phi: f64, mass: f64) -> Self {
        Self(BlochMap::haldane(t1, t2, phi).with_mass(mass))
    }

    #[getter]
    fn t1(&self) -> f64 {
        self.0.t1
    }

    #[getter]
    fn t2(&self) -> f64 {
        self.0.t2
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    /// Chern number of band 0 (lower) or 1 (upper).
    #[pyo3(signature = (band=0, grid=24))]
    fn chern_number(&self, band: usize, grid: usize) -> PyResult<i64> {
        topology::chern_number(&self.0, band, grid).map_err(core_err)
    }

    #[pyo3(signature = (grid=24))]
    fn bulk_gap(&self, grid: usize) -> PyResult<f64> {
        topology::bulk_gap(&self.0, grid).map_err(core_err)
    }

    /// 2x2 matrix at momentum `k` as nested lists of complex numbers.
    fn matrix(&self, k: [f64; 2]) -> Vec<Vec<(f64, f64)>> {
        self.0.matrix(k).iter().map(|row| row.iter().map(|z| (z.re, z.im)).collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!("BlochMap(t1={}, t2={}, phi={}, mass={})", self.0.t1, self.0.t2, self.0.phi, self.0.mass)
    }
}

/// Dissipation profile gamma(x) on a loop.
#[pyclass(name = "DissipationField", frozen)]
struct PyField(DissipationField);

#[pymethods]
impl PyField {
    /// Consecutive uniform regions given as `(gamma, length)` pairs.
    #[staticmethod]
    fn from_lengths(parts: Vec<(f64, f64)>) -> PyResult<Self> {
        DissipationField::from_lengths(&parts).map(Self).map_err(core_err)
    }

    /// One uniform region of unit length per value.
    #[staticmethod]
    fn from_cell_values(values: Vec<f64>) -> PyResult<Self> {
        DissipationField::from_cell_values(&values).map(Self).map_err(core_err)
    }

    #[staticmethod]
    fn piecewise_linear(length: f64, knots: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        DissipationField::piecewise_linear(length, knots, values).map(Self).map_err(core_err)
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    fn average(&self) -> f64 {
        self.0.average()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.value_at(x)
    }

    /// Sign changes of gamma(x) - average as `(position, "A" | "B")`.
    fn walls(&self) -> Vec<(f64, &'static str)> {
        continuum::detect_gddws(&self.0)
            .walls
            .iter()
            .map(|w| (w.position, if w.kind == WallType::A { "A" } else { "B" }))
            .collect()
    }

    /// Chiral mode of winding `n` moving with velocity `v`.
    #[pyo3(signature = (n=0, v=1.0))]
    fn chiral_mode(&self, n: i64, v: f64) -> PyResult<PyChiralMode> {
        continuum::chiral_wavefunction(&self.0, n, v).map(PyChiralMode).map_err(core_err)
    }
}

#[pyclass(name = "ChiralMode", frozen)]
struct PyChiralMode(ChiralModeSolution);

#[pymethods]
impl PyChiralMode {
    #[getter]
    fn k(&self) -> f64 {
        self.0.k
    }

    #[getter]
    fn energy(&self) -> (f64, f64) {
        (self.0.energy.re, self.0.energy.im)
    }

    #[getter]
    fn gamma_bar(&self) -> f64 {
        self.0.gamma_bar
    }

    #[getter]
    fn samples(&self) -> Vec<(f64, f64)> {
        self.0.samples.clone()
    }

    /// Decay lengths of |psi| per uniform region; empty for continuous fields.
    fn localization_lengths(&self) -> Vec<f64> {
        self.0.envelope.iter().flatten().map(|s| s.localization_length()).collect()
    }

    fn density(&self, x: f64) -> f64 {
        self.0.density(x)
    }

    fn psi(&self, x: f64) -> (f64, f64) {
        let z = self.0.psi(x);
        (z.re, z.im)
    }
}

/// Edge-state group velocity of the zigzag ribbon at momentum `k`.
#[pyfunction]
#[pyo3(signature = (k, t1=1.0, t2=0.2))]
fn edge_velocity(k: f64, t1: f64, t2: f64) -> f64 {
    topology::edge_velocity(k, t1, t2)
}

/// Closed-form decay lengths for consecutive uniform regions `(gamma, length)`.
#[pyfunction]
fn multi_region_xi(parts: Vec<(f64, f64)>, v: f64) -> PyResult<Vec<f64>> {
    let sol = continuum::multi_gddw_solution(&parts, v).map_err(core_err)?;
    Ok(sol.segments.iter().map(|s| s.localization_length()).collect())
}

/// Skin-mode length of a Hatano-Nelson chain and the end the modes pile up at.
#[pyfunction]
#[pyo3(signature = (t_l, t_r, spacing=1.0))]
fn hn_localization_length(t_l: f64, t_r: f64, spacing: f64) -> PyResult<(f64, Option<&'static str>)> {
    Ok(match hn_xi(t_l, t_r, spacing).map_err(core_err)? {
        HnLocalization::Extended => (f64::INFINITY, None),
        HnLocalization::Localized { xi, end } => (xi, Some(if end == ChainEnd::Left { "left" } else { "right" })),
    })
}

#[pyfunction]
fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    Scenario::ALL.iter().map(|s| (s.name(), s.description())).collect()
}

/// Runs a scenario from a JSON config and returns the summary as JSON text.
#[pyfunction]
fn run_scenario(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let config = ScenarioConfig::from_json(config_json).map_err(cli_err)?;
    let out = py.detach(|| runner::run(&config)).map_err(cli_err)?;
    serde_json::to_string_pretty(&out.summary(&config)).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Like `run_scenario` but also writes every output file into `out_dir`.
#[pyfunction]
fn run_to_dir(py: Python<'_>, config_json: &str, out_dir: PathBuf) -> PyResult<String> {
    let config = ScenarioConfig::from_json(config_json).map_err(cli_err)?;
    let summary = py.detach(|| cli_run_to_dir(&config, &out_dir)).map_err(cli_err)?;
    serde_json::to_string_pretty(&summary).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn nhcse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlochMap>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyChiralMode>()?;
    m.add_function(wrap_pyfunction!(edge_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(multi_region_xi, m)?)?;
    m.add_function(wrap_pyfunction!(hn_localization_length, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_to_dir, m)?)?;
    Ok(())
}
