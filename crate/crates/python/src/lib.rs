use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rcpp::oracle::OracleLimits;
use rcpp::solver::{enumeration_options, Profile};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Rectangle size and ring types `(inner, outer, demand)`, sorted by outer radius.
#[pyclass(name = "Instance", module = "rcpp_py", from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: rcpp::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (width, height, rings, name = String::new()))]
    fn new(width: f64, height: f64, rings: Vec<(f64, f64, u32)>, name: String) -> PyResult<Self> {
        let types = rings
            .into_iter()
            .map(|(r, big_r, d)| rcpp::RingType::new(r, big_r, d))
            .collect();
        let inner = rcpp::Instance::new(width, height, types, &name).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Parses the `.rpa` text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: rcpp::parse_instance(text).map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        rcpp::write_instance(&self.inner)
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> f64 {
        self.inner.height
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn rings(&self) -> Vec<(f64, f64, u32)> {
        self.inner
            .types()
            .iter()
            .map(|t| (t.inner_radius, t.outer_radius, t.demand))
            .collect()
    }

    #[getter]
    fn ring_count(&self) -> u64 {
        self.inner.ring_count()
    }

    fn volume_lower_bound(&self) -> u64 {
        rcpp::validate::volume_lower_bound(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, width={}, height={}, types={})",
            self.inner.name,
            self.inner.width,
            self.inner.height,
            self.inner.num_types()
        )
    }
}

/// Solver limits. Time limits are in seconds.
#[pyclass(name = "SolveConfig", module = "rcpp_py", from_py_object)]
#[derive(Clone)]
struct PySolveConfig {
    inner: rcpp::solver::SolveConfig,
}

#[pymethods]
impl PySolveConfig {
    #[new]
    #[pyo3(signature = (profile = "paper"))]
    fn new(profile: &str) -> PyResult<Self> {
        let p: Profile = profile.parse().map_err(value_err)?;
        Ok(Self {
            inner: rcpp::solver::SolveConfig::from_profile(p),
        })
    }

    /// Sets one field by name, e.g. `set("pricing_limit", "5")`.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set(key, value).map_err(value_err)
    }

    #[getter]
    fn deterministic(&self) -> bool {
        self.inner.deterministic
    }

    #[setter]
    fn set_deterministic(&mut self, value: bool) {
        self.inner.deterministic = value;
    }

    #[getter]
    fn total_time_limit(&self) -> f64 {
        self.inner.total_time_limit.as_secs_f64()
    }

    #[getter]
    fn pricing_limit(&self) -> f64 {
        self.inner.pricing_limit.as_secs_f64()
    }
}

#[pyclass(name = "SolveReport", module = "rcpp_py", skip_from_py_object)]
struct PySolveReport {
    inner: rcpp::solver::SolveReport,
    instance: rcpp::Instance,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn status(&self) -> String {
        match self.inner.status {
            rcpp::solver::SolveStatus::Optimal => "optimal",
            rcpp::solver::SolveStatus::FeasibleNotProven => "feasible_not_proven",
            rcpp::solver::SolveStatus::ResourceLimit => "resource_limit",
        }
        .into()
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.status.exit_code()
    }

    #[getter]
    fn primal_bound(&self) -> u64 {
        self.inner.primal_bound
    }

    #[getter]
    fn dual_bound(&self) -> u64 {
        self.inner.dual_bound
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    #[getter]
    fn dual_valid(&self) -> bool {
        self.inner.dual_valid
    }

    #[getter]
    fn root_lp_value(&self) -> Option<f64> {
        self.inner.root_lp_value
    }

    fn summary_line(&self) -> String {
        self.inner.summary_line()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// The incumbent in the solution file format.
    fn solution_text(&self) -> String {
        rcpp::write_solution(&self.instance, &self.inner.incumbent)
    }

    fn svg(&self) -> String {
        rcpp::render::render_solution(&self.instance, &self.inner.incumbent)
    }
}

#[pyfunction]
#[pyo3(signature = (instance, config = None))]
fn solve(py: Python<'_>, instance: &PyInstance, config: Option<PySolveConfig>) -> PyResult<PySolveReport> {
    let config = config.map_or_else(rcpp::solver::SolveConfig::paper, |c| c.inner);
    config.validate().map_err(value_err)?;
    let inst = instance.inner.clone();
    let report = py
        .detach(|| rcpp::solver::solve(&inst, &config))
        .map_err(runtime_err)?;
    Ok(PySolveReport {
        inner: report,
        instance: inst,
    })
}

/// Counts of feasible, unknown and infeasible circular patterns.
#[pyfunction]
#[pyo3(signature = (instance, config = None))]
fn enumerate_patterns(instance: &PyInstance, config: Option<PySolveConfig>) -> (usize, usize, usize) {
    let config = config.map_or_else(rcpp::solver::SolveConfig::paper, |c| c.inner);
    let sets = rcpp::patterns::enumerate_patterns(&instance.inner, &enumeration_options(&config));
    (sets.feasible.len(), sets.unknown.len(), sets.infeasible.len())
}

/// Checks a solution file text or a report JSON; returns `(valid, violations)`.
#[pyfunction]
#[pyo3(signature = (instance, text, tolerance = rcpp::DEFAULT_TOLERANCE))]
fn validate(instance: &PyInstance, text: &str, tolerance: f64) -> PyResult<(bool, Vec<String>)> {
    let solution = if text.trim_start().starts_with('{') {
        rcpp::solver::SolveReport::from_json(text).map_err(value_err)?.incumbent
    } else {
        rcpp::parse_solution(text).map_err(value_err)?.solution
    };
    let v = rcpp::validate::validate_solution(&instance.inner, &solution, tolerance);
    let msgs = v
        .violations
        .iter()
        .map(|x| format!("{:?} rings={:?} magnitude={:e}", x.kind, x.rings, x.magnitude))
        .collect();
    Ok((v.feasible, msgs))
}

#[pyfunction]
#[pyo3(signature = (types, alpha, beta, gamma, seed = 0))]
fn generate(types: usize, alpha: f64, beta: f64, gamma: f64, seed: u64) -> PyResult<PyInstance> {
    Ok(PyInstance {
        inner: rcpp::generate::generate_instance(types, alpha, beta, gamma, seed).map_err(value_err)?,
    })
}

#[pyfunction]
fn farley_bound(nu: f64, z_pricing: f64) -> PyResult<i64> {
    rcpp::pricing::farley_bound(nu, z_pricing).map_err(value_err)
}

/// Exact optimum of a tiny instance by exhaustive search.
#[pyfunction]
fn brute_force_opt(instance: &PyInstance) -> PyResult<u64> {
    rcpp::oracle::brute_force_opt(&instance.inner, &OracleLimits::default()).map_err(runtime_err)
}

#[pyfunction]
fn solve_dw_lp(instance: &PyInstance) -> PyResult<f64> {
    rcpp::oracle::solve_dw_lp(&instance.inner, &OracleLimits::default()).map_err(runtime_err)
}

#[pymodule]
fn rcpp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveConfig>()?;
    m.add_class::<PySolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_patterns, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(farley_bound, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_opt, m)?)?;
    m.add_function(wrap_pyfunction!(solve_dw_lp, m)?)?;
    Ok(())
}
