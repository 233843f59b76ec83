//! Python module `khess`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use khess_core::constants::{
    critical_exponent, equilibrium_linearization, moser_trudinger as mt_constants, thresholds as th,
    ProblemSpec as CoreSpec,
};
use khess_core::phase::{self, IntegratorConfig, SolutionCount};
use khess_core::pohozaev::{self, NonlinearitySpec};
use khess_core::profile::{self, RadialProfile};
use khess_core::render;
use khess_core::shooting;

fn err(e: khess_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn core_spec(n: u32, k: u32) -> PyResult<CoreSpec> {
    CoreSpec::new(n, k).map_err(err)
}

#[pyclass(name = "ProblemSpec", frozen)]
struct PySpec {
    inner: CoreSpec,
}

#[pymethods]
impl PySpec {
    #[new]
    fn new(n: u32, k: u32) -> PyResult<Self> {
        Ok(Self { inner: core_spec(n, k)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k()
    }

    /// `gamma(k, n)`, `inf` when `k = n`.
    fn critical_exponent(&self) -> f64 {
        critical_exponent(self.inner).to_f64()
    }

    fn thresholds<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let t = th(self.inner);
        let d = PyDict::new(py);
        d.set_item("gamma", t.gamma.unwrap_or(f64::INFINITY))?;
        d.set_item("a0", t.a0)?;
        d.set_item("alpha1", t.alpha1)?;
        d.set_item("alpha2", t.alpha2)?;
        d.set_item("beta", t.beta)?;
        Ok(d)
    }

    fn linearization<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let l = equilibrium_linearization(self.inner);
        let d = PyDict::new(py);
        d.set_item("eig1", (l.eig1.re, l.eig1.im))?;
        d.set_item("eig2", (l.eig2.re, l.eig2.im))?;
        d.set_item("kind", l.kind.to_string())?;
        d.set_item("b_range", l.b_range)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("ProblemSpec(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

fn config(
    rel_tol: Option<f64>,
    t_max: Option<f64>,
    eq_radius: Option<f64>,
    seed_delta: Option<f64>,
) -> IntegratorConfig {
    let d = IntegratorConfig::default();
    IntegratorConfig {
        rel_tol: rel_tol.unwrap_or(d.rel_tol),
        t_max: t_max.unwrap_or(d.t_max),
        eq_radius: eq_radius.unwrap_or(d.eq_radius),
        seed_delta: seed_delta.unwrap_or(d.seed_delta),
        ..d
    }
}

#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: phase::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn v(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.v).collect()
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.w).collect()
    }

    #[getter]
    fn termination(&self) -> String {
        self.inner.termination.to_string()
    }

    /// Dense-output point `(v, w)` at time `t`, or `None` outside the range.
    fn eval(&self, t: f64) -> Option<(f64, f64)> {
        self.inner.eval(t).map(|p| (p.v, p.w))
    }

    fn max_v(&self) -> f64 {
        self.inner.max_v()
    }

    /// `(count, tail)` of crossings of the line `v = v_star`.
    fn crossings(&self, v_star: f64) -> PyResult<(usize, String)> {
        let c = phase::count_crossings(&self.inner, v_star).map_err(err)?;
        Ok((c.count, c.tail.to_string()))
    }

    fn to_csv(&self) -> String {
        render::trajectory_csv(&self.inner)
    }

    fn to_svg(&self) -> PyResult<String> {
        render::phase_svg(&self.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

#[pyfunction]
#[pyo3(signature = (n, k, *, rel_tol=None, t_max=None, eq_radius=None, seed_delta=None))]
fn integrate(
    n: u32,
    k: u32,
    rel_tol: Option<f64>,
    t_max: Option<f64>,
    eq_radius: Option<f64>,
    seed_delta: Option<f64>,
) -> PyResult<PyTrajectory> {
    let cfg = config(rel_tol, t_max, eq_radius, seed_delta);
    let inner = phase::integrate_trajectory(core_spec(n, k)?, &cfg).map_err(err)?;
    Ok(PyTrajectory { inner })
}

/// Solution counts over `a_grid`; `None` marks infinitely many.
#[pyfunction]
#[pyo3(signature = (n, k, a_grid, *, rel_tol=None, t_max=None, eq_radius=None, seed_delta=None))]
fn bifurcation<'py>(
    py: Python<'py>,
    n: u32,
    k: u32,
    a_grid: Vec<f64>,
    rel_tol: Option<f64>,
    t_max: Option<f64>,
    eq_radius: Option<f64>,
    seed_delta: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(rel_tol, t_max, eq_radius, seed_delta);
    let diag = phase::bifurcation_sweep(core_spec(n, k)?, &a_grid, &cfg).map_err(err)?;
    let counts: Vec<Option<usize>> = diag
        .entries
        .iter()
        .map(|e| match e.count {
            SolutionCount::Finite(c) => Some(c),
            SolutionCount::Infinite => None,
        })
        .collect();
    let d = PyDict::new(py);
    d.set_item("a", a_grid)?;
    d.set_item("counts", counts)?;
    d.set_item("alpha_star_estimate", diag.alpha_star_estimate)?;
    d.set_item("beta_marker", diag.beta_marker)?;
    d.set_item("termination", diag.termination.to_string())?;
    Ok(d)
}

#[pyclass(name = "RadialProfile", frozen)]
struct PyProfile {
    inner: RadialProfile,
}

#[pymethods]
impl PyProfile {
    #[new]
    fn new(s: Vec<f64>, u: Vec<f64>, u_s: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: RadialProfile::new(s, u, u_s, None).map_err(err)? })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Self { inner: RadialProfile::from_csv(text).map_err(err)? })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn s(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.u.clone()
    }

    #[getter]
    fn u_s(&self) -> Vec<f64> {
        self.inner.us.clone()
    }

    /// Parameter `a`, when known.
    #[getter]
    fn a(&self) -> Option<f64> {
        self.inner.meta.map(|m| m.a)
    }

    /// Multiplier `lambda`, when known.
    #[getter]
    fn lam(&self) -> Option<f64> {
        self.inner.meta.map(|m| m.lambda)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Explicit Monge-Ampere solution on the default grid.
#[pyfunction]
fn explicit_ma(n: u32, eps: f64) -> PyResult<PyProfile> {
    let (inner, _) = profile::explicit_ma(n, eps).map_err(err)?;
    Ok(PyProfile { inner })
}

/// Profile of the solution whose boundary sits at phase value `v`.
#[pyfunction]
fn reconstruct(n: u32, k: u32, v: f64) -> PyResult<PyProfile> {
    let s = core_spec(n, k)?;
    let traj = phase::integrate_trajectory(s, &IntegratorConfig::for_reconstruction(s)).map_err(err)?;
    let t_star = profile::time_at_v(&traj, v).map_err(err)?;
    Ok(PyProfile { inner: profile::reconstruct_profile(&traj, t_star).map_err(err)? })
}

/// `max |S_k(u) - f| / (1 + |f|)` for the nonlocal exponential right-hand side.
#[pyfunction]
fn hessian_residual(n: u32, k: u32, profile: &PyProfile, a: f64) -> PyResult<f64> {
    let s = core_spec(n, k)?;
    let rhs = profile::exponential_rhs(s, &profile.inner, a).map_err(err)?;
    profile::hessian_residual(s, &profile.inner, &rhs).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, k, p, *, m=1.0, s_cap=1e6))]
fn shoot<'py>(py: Python<'py>, n: u32, k: u32, p: f64, m: f64, s_cap: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = shooting::shoot_power(core_spec(n, k)?, p, m, s_cap).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", r.status.to_string())?;
    d.set_item("first_zero", r.first_zero)?;
    d.set_item("tail_value", r.tail_value)?;
    d.set_item("eigenvalue_regime", r.eigenvalue_regime)?;
    if r.first_zero.is_some() && !r.eigenvalue_regime {
        let unit = shooting::rescale_to_unit_ball(&r).map_err(err)?;
        d.set_item("unit_profile", PyProfile { inner: unit })?;
    }
    d.set_item("profile", PyProfile { inner: r.profile })?;
    Ok(d)
}

/// Pohozaev audit; pass exactly one of `power` and `exponential`.
#[pyfunction]
#[pyo3(signature = (n, k, profile, *, power=None, exponential=None, tol=1e-6))]
fn pohozaev_identity<'py>(
    py: Python<'py>,
    n: u32,
    k: u32,
    profile: &PyProfile,
    power: Option<f64>,
    exponential: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let nl = match (power, exponential) {
        (Some(p), None) => NonlinearitySpec::power(p),
        (None, Some(a)) => NonlinearitySpec::exponential(a),
        _ => return Err(PyValueError::new_err("pass exactly one of power= and exponential=")),
    }
    .map_err(err)?;
    let r = pohozaev::identity_radial_with(core_spec(n, k)?, &profile.inner, &nl, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("boundary_term", r.boundary_term)?;
    d.set_item("volume_term", r.volume_term)?;
    d.set_item("residual", r.residual)?;
    d.set_item("holder_lhs", r.holder_lhs)?;
    d.set_item("holder_rhs", r.holder_rhs)?;
    d.set_item("verdict", r.verdict.to_string())?;
    Ok(d)
}

#[pyfunction]
fn nonexistence_exponential<'py>(py: Python<'py>, n: u32, k: u32, a: f64) -> PyResult<Bound<'py, PyDict>> {
    let v = pohozaev::nonexistence_exponential(core_spec(n, k)?, a).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("threshold", v.threshold)?;
    d.set_item("margin", v.margin)?;
    d.set_item("triggered", v.triggered)?;
    d.set_item("improved_threshold", v.improved_threshold)?;
    d.set_item("improved_margin", v.improved_margin)?;
    d.set_item("improved_triggered", v.improved_triggered)?;
    Ok(d)
}

#[pyfunction]
fn flux_lower_bound(n: u32, k: u32, a: f64) -> PyResult<f64> {
    pohozaev::flux_lower_bound(core_spec(n, k)?, a).map_err(err)
}

#[pyfunction]
fn mu_max_verify(n: u32, k: u32) -> PyResult<f64> {
    pohozaev::mu_max_verify(core_spec(n, k)?).map_err(err)
}

#[pyfunction]
fn moser_trudinger<'py>(py: Python<'py>, d: u32) -> PyResult<Bound<'py, PyDict>> {
    let m = mt_constants(d).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("D", m.big_d)?;
    out.set_item("p0", m.p0)?;
    out.set_item("E", m.e)?;
    out.set_item("q0", m.q0)?;
    out.set_item("alpha_tilde", m.alpha_tilde)?;
    out.set_item("identity_residual", m.identity_residual)?;
    Ok(out)
}

#[pymodule]
pub fn khess(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(bifurcation, m)?)?;
    m.add_function(wrap_pyfunction!(explicit_ma, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_residual, m)?)?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(pohozaev_identity, m)?)?;
    m.add_function(wrap_pyfunction!(nonexistence_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(flux_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mu_max_verify, m)?)?;
    m.add_function(wrap_pyfunction!(moser_trudinger, m)?)?;
    Ok(())
}
