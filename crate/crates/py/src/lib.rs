//! Python bindings: fields, pairwise comparison, point classification,
//! population games, flows and the two case studies. Reports come back as
//! plain dicts built from their JSON form.

use polyorder::casestudy::{
    build_catalog, catalog_challengers, mexican_hat_counterexample, verify_catalog,
    MexicanHatOptions,
};
use polyorder::classify::{classify_point, Challengers, ClassifyOptions, FieldRef};
use polyorder::dynamics::{integrate as integrate_flow, IntegratorConfig};
use polyorder::field::Point;
use polyorder::polyorder::{compare_scalar, compare_vector};
use polyorder::popgame::{self, PopulationGame};
use polyorder::registry::{lookup, NamedField, QuadraticSpec};
use polyorder::sampling::{sample_domain, Sampling};
use polyorder::ToleranceConfig;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: polyorder::Error) -> PyErr {
    match e {
        polyorder::Error::InvariantBreach(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn point(v: Vec<f64>) -> PyResult<Point> {
    Point::new(v).map_err(err)
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn config(tau: f64, n_eps: usize) -> PyResult<ToleranceConfig> {
    let cfg = ToleranceConfig::default().with_tau(tau).with_n_eps(n_eps);
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// A registry field (`quadratic`, `cubic`, `linear`, `xsininv`, `mexican_hat`,
/// optionally `neg:`-prefixed) or a quadratic `½xᵀQx + bᵀx`.
#[pyclass(frozen)]
struct Field {
    inner: NamedField,
    xsininv: bool,
}

#[pymethods]
impl Field {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Field {
            inner: lookup(name).map_err(err)?,
            xsininv: name.trim_start_matches("neg:") == "xsininv",
        })
    }

    #[staticmethod]
    #[pyo3(signature = (q, b, lower=None, upper=None))]
    fn quadratic(
        q: Vec<Vec<f64>>,
        b: Vec<f64>,
        lower: Option<Vec<f64>>,
        upper: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let spec = QuadraticSpec { q, b, lower, upper };
        Ok(Field {
            inner: spec.build("quadratic_spec").map_err(err)?,
            xsininv: false,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn negated(&self) -> Field {
        Field {
            inner: self.inner.negated(),
            xsininv: self.xsininv,
        }
    }

    /// Scalar value `f(x)`.
    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.scalar.eval(&point(x)?).map_err(err)
    }

    /// Vector reading `c(x)`.
    fn vector(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.vector.eval(&point(x)?).map_err(err)?.into_vec())
    }

    fn __repr__(&self) -> String {
        format!("Field({:?}, dim={})", self.inner.name, self.inner.dim())
    }
}

/// Compares `x` and `y`; `kind` is `"vector"` or `"scalar"`.
#[pyfunction]
#[pyo3(signature = (field, x, y, kind="vector", tau=1e-9, n_eps=1025))]
fn compare(
    py: Python<'_>,
    field: &Field,
    x: Vec<f64>,
    y: Vec<f64>,
    kind: &str,
    tau: f64,
    n_eps: usize,
) -> PyResult<Py<PyAny>> {
    let cfg = config(tau, n_eps)?;
    let (x, y) = (point(x)?, point(y)?);
    let verdict = match kind {
        "vector" => compare_vector(&field.inner.vector, &x, &y, &cfg),
        "scalar" => compare_scalar(&field.inner.scalar, &x, &y, &cfg),
        other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    }
    .map_err(err)?;
    to_py(py, &verdict)
}

/// Full classification report at `point`.
#[pyfunction]
#[pyo3(signature = (field, point, kind="vector", radius=None, seed=42, tau=1e-9, n_eps=1025))]
#[allow(clippy::too_many_arguments)]
fn classify(
    py: Python<'_>,
    field: &Field,
    point: Vec<f64>,
    kind: &str,
    radius: Option<f64>,
    seed: u64,
    tau: f64,
    n_eps: usize,
) -> PyResult<Py<PyAny>> {
    let cfg = config(tau, n_eps)?;
    let p = self::point(point)?;
    let challengers = if field.xsininv {
        Some(catalog_challengers(&build_catalog(25).map_err(err)?, 4096).map_err(err)?)
    } else {
        None
    };
    let opts = ClassifyOptions {
        radius,
        seed,
        challengers,
        ..ClassifyOptions::default()
    };
    let f = match kind {
        "vector" => FieldRef::Vector(&field.inner.vector),
        "scalar" => FieldRef::Scalar(&field.inner.scalar),
        other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    };
    let report = py
        .detach(|| classify_point(f, &p, &opts, &cfg))
        .map_err(err)?;
    to_py(py, &report)
}

/// A population game with costs (rows index the player's own strategies).
#[pyclass(frozen)]
struct Game {
    inner: PopulationGame,
}

#[pymethods]
impl Game {
    #[staticmethod]
    #[pyo3(signature = (c, mass=1.0))]
    fn symmetric(c: Vec<Vec<f64>>, mass: f64) -> PyResult<Self> {
        Ok(Game {
            inner: PopulationGame::from_symmetric_matrix(c, mass).map_err(err)?,
        })
    }

    #[staticmethod]
    fn bimatrix(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Game {
            inner: PopulationGame::from_bimatrix(a, b).map_err(err)?,
        })
    }

    /// `hawk_dove`, `matching_pennies` or `prisoners_dilemma`.
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        let inner = match name {
            "hawk_dove" => popgame::hawk_dove(),
            "matching_pennies" => popgame::matching_pennies(),
            "prisoners_dilemma" => popgame::prisoners_dilemma(),
            other => return Err(PyValueError::new_err(format!("unknown game {other:?}"))),
        };
        Ok(Game { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn cost(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.cost(&point(x)?).map_err(err)?.into_vec())
    }

    #[pyo3(signature = (x, samples=2000, seed=42, tau=1e-9))]
    fn is_nash(&self, x: Vec<f64>, samples: usize, seed: u64, tau: f64) -> PyResult<bool> {
        let cfg = config(tau, 1025)?;
        let s = sample_domain(self.inner.domain(), Sampling::Random(samples), seed).map_err(err)?;
        Ok(popgame::is_nash(&self.inner, &point(x)?, &s, &cfg).map_err(err)?.holds)
    }

    #[pyo3(signature = (x, samples=2000, seed=42, tau=1e-9, n_eps=1025))]
    fn classify(
        &self,
        py: Python<'_>,
        x: Vec<f64>,
        samples: usize,
        seed: u64,
        tau: f64,
        n_eps: usize,
    ) -> PyResult<Py<PyAny>> {
        let cfg = config(tau, n_eps)?;
        let s = sample_domain(self.inner.domain(), Sampling::Random(samples), seed).map_err(err)?;
        let opts = ClassifyOptions {
            seed,
            challengers: Some(Challengers::new(s)),
            ..ClassifyOptions::default()
        };
        let p = point(x)?;
        let report = py
            .detach(|| classify_point(FieldRef::Vector(self.inner.field()), &p, &opts, &cfg))
            .map_err(err)?;
        to_py(py, &report)
    }
}

/// RK4 flow of `ẋ = c(x)`; returns `(times, states, termination)`.
#[pyfunction]
#[pyo3(signature = (field, x0, dt=1e-3, t_max=200.0))]
fn integrate(
    field: &Field,
    x0: Vec<f64>,
    dt: f64,
    t_max: f64,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, String)> {
    let cfg = IntegratorConfig {
        dt,
        t_max,
        ..IntegratorConfig::default()
    };
    let traj = integrate_flow(&field.inner.vector, &point(x0)?, &cfg).map_err(err)?;
    let (t, x) = traj
        .samples
        .iter()
        .map(|(t, x)| (*t, x.coords().to_vec()))
        .unzip();
    Ok((t, x, format!("{:?}", traj.terminated_reason)))
}

/// Numeric vs analytic classification of the critical points of x·sin(1/x).
#[pyfunction]
#[pyo3(signature = (n_max=25, grid_n=4096, tau=1e-9))]
fn catalog_agreement(py: Python<'_>, n_max: u32, grid_n: usize, tau: f64) -> PyResult<Py<PyAny>> {
    let cfg = config(tau, 1025)?;
    let r = py.detach(|| verify_catalog(n_max, grid_n, &cfg)).map_err(err)?;
    to_py(py, &r)
}

/// Unit-circle minima of `(‖p‖−1)²` that are not polyorder local minima.
#[pyfunction]
#[pyo3(signature = (n_circle=16, seed=42))]
fn mexican_hat(py: Python<'_>, n_circle: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let opts = MexicanHatOptions {
        n_circle,
        seed,
        ..MexicanHatOptions::default()
    };
    let r = py
        .detach(|| mexican_hat_counterexample(&opts, &ToleranceConfig::default()))
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn pypolyorder(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_agreement, m)?)?;
    m.add_function(wrap_pyfunction!(mexican_hat, m)?)?;
    Ok(())
}
