//! Python bindings for the rod solver.

use std::path::Path;
use std::sync::Arc;

use fracrod::cli::{run as run_cli, ConfigBuilder};
use fracrod::modes::ModeOptions;
use fracrod::oracle::oracle_step_u;
use fracrod::{
    calibrate_cut_sides, compose_sigma, compose_u, find_frequencies, BromwichConfig,
    ConstitutiveModel, Error, ForcingSignal, KernelKind, KernelSpec, KernelValue, ModeSet,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Config { .. } | Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn triple(v: KernelValue) -> (f64, f64, String) {
    (v.value, v.error, v.flags.to_string())
}

/// Constitutive model parsed from the `name key=value ...` grammar.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: ConstitutiveModel,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyModel { inner: text.parse().map_err(to_py)? })
    }

    /// Quotient `M(s)` on the principal branch.
    fn m(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.m(s).map_err(to_py)
    }

    /// `(c_inf, c_0)`, the large- and small-|s| limits of `M`, or `None`
    /// when the model has no finite limits.
    fn limits(&self) -> Option<(f64, f64)> {
        self.inner.limits().map(|l| (l.c_inf, l.c_0))
    }

    fn __repr__(&self) -> String {
        format!("Model('{}')", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Frequencies, poles and tail law for modes `0..=n_max`.
#[pyclass(name = "ModeSet", frozen)]
struct PyModeSet {
    inner: Arc<ModeSet>,
}

#[pymethods]
impl PyModeSet {
    #[new]
    #[pyo3(signature = (model, kappa, n_max = 64, allow_unsafe_model = false))]
    fn new(model: &PyModel, kappa: f64, n_max: usize, allow_unsafe_model: bool) -> PyResult<Self> {
        let set = ModeSet::build_with(&model.inner, kappa, n_max, ModeOptions { allow_unsafe_model })
            .map_err(to_py)?;
        Ok(PyModeSet { inner: Arc::new(set) })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max
    }

    #[getter]
    fn unresolved(&self) -> Vec<usize> {
        self.inner.unresolved.clone()
    }

    /// Poles `s_n` in the upper half plane.
    fn poles(&self) -> Vec<Complex64> {
        self.inner.modes.iter().map(|m| m.s).collect()
    }

    /// Real frequencies `w_n`.
    fn frequencies(&self) -> Vec<f64> {
        self.inner.modes.iter().map(|m| m.w).collect()
    }

    /// Mode table as CSV text.
    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    /// Residue-tail bound for the displacement (or stress) kernel at time `t`.
    #[pyo3(signature = (t, stress = false))]
    fn tail_bound(&self, t: f64, stress: bool) -> f64 {
        self.inner.tail_bound(stress, t)
    }
}

/// Forcing history `F(t)`.
#[pyclass(name = "Forcing", frozen)]
struct PyForcing {
    inner: ForcingSignal,
}

#[pymethods]
impl PyForcing {
    #[staticmethod]
    fn heaviside() -> Self {
        PyForcing { inner: ForcingSignal::Heaviside }
    }

    #[staticmethod]
    fn impulse() -> Self {
        PyForcing { inner: ForcingSignal::Impulse }
    }

    #[staticmethod]
    fn sinusoid(omega: f64, amplitude: f64) -> PyResult<Self> {
        Ok(PyForcing { inner: ForcingSignal::sinusoid(omega, amplitude).map_err(to_py)? })
    }

    #[staticmethod]
    fn power_step(alpha: f64) -> PyResult<Self> {
        Ok(PyForcing { inner: ForcingSignal::power_step(alpha).map_err(to_py)? })
    }

    #[staticmethod]
    fn tabulated(t: Vec<f64>, f: Vec<f64>) -> PyResult<Self> {
        Ok(PyForcing { inner: ForcingSignal::tabulated(t, f).map_err(to_py)? })
    }

    /// Two-column CSV with an optional header row.
    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        Ok(PyForcing { inner: ForcingSignal::read_csv(Path::new(path)).map_err(to_py)? })
    }

    /// The same signal switched on `delay` later.
    fn delayed(&self, delay: f64) -> PyResult<Self> {
        Ok(PyForcing { inner: self.inner.clone().delayed(delay).map_err(to_py)? })
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }
}

/// Displacement and stress kernels with calibrated branch-cut sides.
#[pyclass(name = "Kernels", frozen)]
struct PyKernels {
    p: KernelSpec,
    sigma: KernelSpec,
}

#[pymethods]
impl PyKernels {
    #[new]
    #[pyo3(signature = (modes, tol = 1e-6))]
    fn new(modes: &PyModeSet, tol: f64) -> PyResult<Self> {
        let cal = calibrate_cut_sides(&modes.inner, tol).map_err(to_py)?;
        let p = KernelSpec::new(KernelKind::DisplacementP, modes.inner.clone(), tol)
            .map_err(to_py)?
            .with_side(cal.p_side);
        let sigma = KernelSpec::new(KernelKind::StressSigmaH, modes.inner.clone(), tol)
            .map_err(to_py)?
            .with_side(cal.sigma_side);
        Ok(PyKernels { p, sigma })
    }

    /// `P(x, t)` as `(value, error_estimate, flags)`.
    fn p(&self, py: Python<'_>, x: f64, t: f64) -> PyResult<(f64, f64, String)> {
        py.detach(|| self.p.eval_p(x, t)).map(triple).map_err(to_py)
    }

    /// `σ_H(x, t)` as `(value, error_estimate, flags)`.
    fn sigma_h(&self, py: Python<'_>, x: f64, t: f64) -> PyResult<(f64, f64, String)> {
        py.detach(|| self.sigma.eval_sigma_h(x, t)).map(triple).map_err(to_py)
    }

    /// Displacement under `forcing`.
    fn displacement(&self, py: Python<'_>, forcing: &PyForcing, x: f64, t: f64) -> PyResult<(f64, f64, String)> {
        py.detach(|| compose_u(&self.p, &forcing.inner, x, t)).map(triple).map_err(to_py)
    }

    /// Stress under `forcing`.
    fn stress(&self, py: Python<'_>, forcing: &PyForcing, x: f64, t: f64) -> PyResult<(f64, f64, String)> {
        py.detach(|| compose_sigma(&self.sigma, &forcing.inner, x, t)).map(triple).map_err(to_py)
    }
}

/// Roots `w_0 < ... < w_{n_max}` of `tan(κw) = κ/w`.
#[pyfunction]
fn frequencies(kappa: f64, n_max: usize) -> PyResult<Vec<f64>> {
    find_frequencies(kappa, n_max).map_err(to_py)
}

fn oracle_cfg(model: &ConstitutiveModel, kappa: f64) -> PyResult<BromwichConfig> {
    let modes = ModeSet::build_with(model, kappa, 16, ModeOptions { allow_unsafe_model: true })
        .map_err(to_py)?;
    Ok(BromwichConfig::for_modes(&modes))
}

/// Numerical Laplace inversion of one kernel transform, as `(value, error_estimate)`.
///
/// `quantity` is `"p"`, `"sigma_h"` or `"step_u"`.
#[pyfunction]
#[pyo3(signature = (model, kappa, x, t, quantity = "p"))]
fn oracle(py: Python<'_>, model: &PyModel, kappa: f64, x: f64, t: f64, quantity: &str) -> PyResult<(f64, f64)> {
    let cfg = oracle_cfg(&model.inner, kappa)?;
    let m = &model.inner;
    let inv = py.detach(|| match quantity {
        "p" => fracrod::oracle_p(m, kappa, x, t, &cfg),
        "sigma_h" => fracrod::oracle_sigma_h(m, kappa, x, t, &cfg),
        "step_u" => oracle_step_u(m, kappa, x, t, &cfg),
        other => Err(Error::InvalidParameter(format!("unknown quantity '{other}'"))),
    });
    let inv = inv.map_err(to_py)?;
    Ok((inv.value, inv.error))
}

/// Runs the command-line pipeline from `key=value` settings and returns
/// `(results_csv, modes_csv, diagnostics, accuracy_ok)`.
#[pyfunction]
#[pyo3(signature = (settings, config_text = None))]
fn run(
    py: Python<'_>,
    settings: Vec<(String, String)>,
    config_text: Option<&str>,
) -> PyResult<(String, String, String, bool)> {
    let mut b = ConfigBuilder::new();
    if let Some(text) = config_text {
        b = b.file_text(text, Path::new("<config>")).map_err(to_py)?;
    }
    for (k, v) in &settings {
        b = b.set(k, v, &format!("--{k}")).map_err(to_py)?;
    }
    let cfg = b.build().map_err(to_py)?;
    let out = py.detach(|| run_cli(&cfg)).map_err(to_py)?;
    Ok((out.results_csv(), out.modes_csv.clone(), out.diagnostics.clone(), out.accuracy_ok()))
}

#[pymodule]
fn fracrod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyModeSet>()?;
    m.add_class::<PyForcing>()?;
    m.add_class::<PyKernels>()?;
    m.add_function(wrap_pyfunction!(frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
