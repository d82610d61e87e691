//! Python extension module exposing the main types and operations:
//! pair/Bloch couplings, Hamiltonian spectra, mode classification, and the
//! polylogarithm kernel. Build with `cargo build -p radiant-py --release`
//! and import the produced `libradiant.so` as `radiant` (see
//! `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use radiant_core::analysis::{classify_mode, intensity_profile, ClassifyThresholds};
use radiant_core::config::{ChainConfig, CollectiveMode};
use radiant_core::eigen::eigendecompose;
use radiant_core::error::Error;
use radiant_core::greens::{self, SumMethod};
use radiant_core::hamiltonian;
use radiant_core::spectra::GapSet;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Config(_) | Error::ConfigParse { .. } | Error::NonFinite(_) => {
            PyValueError::new_err(err.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Physical parameters of one chain simulation.
#[pyclass(name = "ChainConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChainConfig {
    inner: ChainConfig,
}

#[pymethods]
impl PyChainConfig {
    #[new]
    fn new(n_atoms: usize, spacing: f64, zeeman_amp: f64, flux: f64, phase: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ChainConfig::new(n_atoms, spacing, zeeman_amp, flux, phase)
                .map_err(to_py_err)?,
        })
    }

    #[getter]
    fn n_atoms(&self) -> usize {
        self.inner.n_atoms()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    #[getter]
    fn zeeman_amp(&self) -> f64 {
        self.inner.zeeman_amp()
    }

    #[getter]
    fn flux(&self) -> f64 {
        self.inner.flux()
    }

    #[getter]
    fn phase(&self) -> f64 {
        self.inner.phase()
    }

    fn with_phase(&self, phase: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_phase(phase).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainConfig(n_atoms={}, spacing={}, zeeman_amp={}, flux={}, phase={})",
            self.inner.n_atoms(),
            self.inner.spacing(),
            self.inner.zeeman_amp(),
            self.inner.flux(),
            self.inner.phase()
        )
    }
}

/// One collective eigenmode of a finite chain.
#[pyclass(name = "Mode", frozen)]
struct PyMode {
    mode: CollectiveMode,
}

#[pymethods]
impl PyMode {
    #[getter]
    fn detuning(&self) -> f64 {
        self.mode.eigenvalue.detuning
    }

    #[getter]
    fn decay(&self) -> f64 {
        self.mode.eigenvalue.decay
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.mode.residual
    }

    /// Interleaved amplitudes (C₁₊, C₁₋, C₂₊, C₂₋, …).
    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.mode.amplitudes.clone()
    }

    /// Per-site intensities split by polarization: (plus, minus).
    fn intensity(&self) -> (Vec<f64>, Vec<f64>) {
        let profile = intensity_profile(&self.mode);
        (profile.plus, profile.minus)
    }

    /// (side, polarization, radiance, edge_weight, pol_fraction) with the
    /// default thresholds and a given boundary window.
    #[pyo3(signature = (window = 10))]
    fn classify(&self, window: usize) -> PyResult<(String, String, String, f64, f64)> {
        let thresholds = ClassifyThresholds {
            window,
            ..ClassifyThresholds::default()
        };
        let label =
            classify_mode(&self.mode, &GapSet::default(), &thresholds).map_err(to_py_err)?;
        Ok((
            label.side.as_str().to_string(),
            label.polarization.as_str().to_string(),
            label.radiance.as_str().to_string(),
            label.edge_weight,
            label.pol_fraction,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Mode(detuning={:.6}, decay={:.6})",
            self.mode.eigenvalue.detuning, self.mode.eigenvalue.decay
        )
    }
}

/// Like- and cross-polarization pair couplings J(d) in γ₀ units.
#[pyfunction]
fn pair_coupling(d: f64) -> PyResult<(Complex64, Complex64)> {
    let j = greens::pair_coupling(d).map_err(to_py_err)?;
    Ok((j.j_same, j.j_cross))
}

/// Closed-form Bloch-summed couplings at momentum κa.
#[pyfunction]
#[pyo3(signature = (kappa_a, spacing, eps_light = 1e-6))]
fn bloch_coupling(kappa_a: f64, spacing: f64, eps_light: f64) -> PyResult<(Complex64, Complex64)> {
    let f = greens::bloch_sum(kappa_a, spacing, SumMethod::ClosedForm, eps_light, 1_000_000)
        .map_err(to_py_err)?;
    Ok((f.f_same, f.f_cross))
}

/// Li_s(e^{iθ}) for s ∈ {1, 2, 3}.
#[pyfunction]
fn eval_polylog(s: u32, theta: f64) -> PyResult<Complex64> {
    greens::eval_polylog(s, theta).map_err(to_py_err)
}

/// Zeeman profile μB₀cos(2πbn + φ), n = 1…N.
#[pyfunction]
fn zeeman_profile(config: &PyChainConfig) -> Vec<f64> {
    hamiltonian::zeeman_profile(&config.inner)
}

/// Open-chain eigenvalues as (detuning, decay) pairs, detuning-sorted.
#[pyfunction]
#[pyo3(signature = (config, tol_eig = 1e-9))]
fn spectrum(config: &PyChainConfig, tol_eig: f64) -> PyResult<Vec<(f64, f64)>> {
    let h = hamiltonian::build_finite(&config.inner).map_err(to_py_err)?;
    let result = eigendecompose(h.matrix(), tol_eig).map_err(to_py_err)?;
    Ok(result
        .modes
        .iter()
        .map(|m| (m.eigenvalue.detuning, m.eigenvalue.decay))
        .collect())
}

/// Open-chain eigenmodes with amplitude vectors.
#[pyfunction]
#[pyo3(signature = (config, tol_eig = 1e-9))]
fn modes(config: &PyChainConfig, tol_eig: f64) -> PyResult<Vec<PyMode>> {
    let h = hamiltonian::build_finite(&config.inner).map_err(to_py_err)?;
    let result = eigendecompose(h.matrix(), tol_eig).map_err(to_py_err)?;
    Ok(result.modes.into_iter().map(|mode| PyMode { mode }).collect())
}

/// Magnetic-supercell Bloch eigenvalues at flux p/q, momentum k·a, phase φ.
#[pyfunction]
#[pyo3(signature = (p, q, k_a, phase, spacing, zeeman_amp, eps_light = 1e-6, l_max = 1_000_000))]
#[allow(clippy::too_many_arguments)]
fn bloch_spectrum(
    p: usize,
    q: usize,
    k_a: f64,
    phase: f64,
    spacing: f64,
    zeeman_amp: f64,
    eps_light: f64,
    l_max: usize,
) -> PyResult<Vec<(f64, f64)>> {
    let h = hamiltonian::build_bloch(p, q, k_a, phase, spacing, zeeman_amp, eps_light, l_max)
        .map_err(to_py_err)?;
    let vals = radiant_core::eigen::eigenvalues(h.matrix()).map_err(to_py_err)?;
    Ok(vals.iter().map(|v| (v.detuning, v.decay)).collect())
}

/// Best continued-fraction approximation p/q of a flux with q ≤ q_max.
#[pyfunction]
#[pyo3(signature = (b, q_max = 100))]
fn rational_flux(b: f64, q_max: usize) -> PyResult<(usize, usize)> {
    hamiltonian::rational_flux_approx(b, q_max).map_err(to_py_err)
}

#[pymodule]
fn radiant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChainConfig>()?;
    m.add_class::<PyMode>()?;
    m.add_function(wrap_pyfunction!(pair_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(eval_polylog, m)?)?;
    m.add_function(wrap_pyfunction!(zeeman_profile, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(modes, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(rational_flux, m)?)?;
    Ok(())
}
