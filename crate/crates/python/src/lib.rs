//! Python bindings: exact operator expressions, the derivation pipeline and
//! the command-level checks.

use std::path::PathBuf;

use ncdirac::cli_reports::{cmd_derive, cmd_evolve, cmd_limits, cmd_verify, CommandOutcome, DeriveTarget, RunConfig};
use ncdirac::dirac_model::FieldSpec;
use ncdirac::matrix_rep::{hermiticity_residual, identity_residual, ConstantValues, FockBasisConfig, Realizer};
use ncdirac::nc_algebra::{algebra_consistency_report, ConventionConfig, NCParameters};
use ncdirac::operator_ir::{
    canonicalize, commutator, parse, parse_expr, render_latex, render_plain, AlgebraContext, AlgebraMode, Constant,
    OperatorExpr,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn to_py_err(e: ncdirac::Error) -> PyErr {
    if ncdirac::cli_reports::is_usage_error(&e) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn context(mode: &str, convention: &str) -> PyResult<AlgebraContext> {
    let mode = match mode {
        "commutative" => AlgebraMode::Commutative,
        "nc-space" => AlgebraMode::NCSpace,
        "nc-phase-space" => AlgebraMode::NCPhaseSpace,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode '{other}', expected commutative, nc-space or nc-phase-space"
            )))
        }
    };
    let conv = ConventionConfig::by_name(convention)
        .ok_or_else(|| PyValueError::new_err(format!("unknown convention '{convention}'")))?;
    Ok(AlgebraContext::new(mode, NCParameters::symbolic(), conv, None))
}

/// An exact operator expression: a sum of rational-times-constants
/// coefficients over products of x, p, field atoms and Dirac matrices.
#[pyclass(name = "Expression", module = "pyncdirac", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpression {
    inner: OperatorExpr,
}

#[pymethods]
impl PyExpression {
    /// Parses the plain-text grammar, keeping the written factor order.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyExpression {
            inner: parse_expr(text).map_err(to_py_err)?,
        })
    }

    /// Normal-ordered form under the given algebra.
    #[pyo3(signature = (mode = "commutative", convention = "default"))]
    fn canonical(&self, mode: &str, convention: &str) -> PyResult<Self> {
        let ctx = context(mode, convention)?;
        Ok(PyExpression {
            inner: canonicalize(&self.inner, &ctx).map_err(to_py_err)?,
        })
    }

    #[pyo3(signature = (other, mode = "commutative", convention = "default"))]
    fn commutator(&self, other: &PyExpression, mode: &str, convention: &str) -> PyResult<Self> {
        let ctx = context(mode, convention)?;
        Ok(PyExpression {
            inner: commutator(&self.inner, &other.inner, &ctx).map_err(to_py_err)?,
        })
    }

    fn latex(&self) -> String {
        render_latex(&self.inner)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __add__(&self, other: &PyExpression) -> Self {
        PyExpression {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &PyExpression) -> Self {
        PyExpression {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &PyExpression) -> Self {
        PyExpression {
            inner: &self.inner * &other.inner,
        }
    }

    fn __neg__(&self) -> Self {
        PyExpression { inner: -&self.inner }
    }

    fn __str__(&self) -> String {
        render_plain(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Expression('{}')", render_plain(&self.inner))
    }
}

fn load_config(config: Option<&str>, out: Option<PathBuf>) -> PyResult<RunConfig> {
    let mut cfg = match config {
        Some(text) => RunConfig::from_json(text).map_err(to_py_err)?,
        None => RunConfig::default(),
    };
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    Ok(cfg)
}

fn outcome<'py>(py: Python<'py>, o: CommandOutcome) -> PyResult<(bool, Bound<'py, PyAny>)> {
    Ok((o.pass, json_to_py(py, &o.json)?))
}

/// Derives `hamiltonian`, `position-rate` or `momentum-rate`; returns
/// `(clean, report)`. `config` is a JSON document in the CLI format.
#[pyfunction]
#[pyo3(signature = (target, config = None, out = None))]
fn derive<'py>(
    py: Python<'py>,
    target: &str,
    config: Option<&str>,
    out: Option<PathBuf>,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let t = DeriveTarget::from_name(target).ok_or_else(|| {
        PyValueError::new_err(format!("unknown target '{target}', expected one of {:?}", DeriveTarget::NAMES))
    })?;
    let cfg = load_config(config, out)?;
    outcome(py, cmd_derive(t, &cfg).map_err(to_py_err)?)
}

/// Symbolic checks, matrix identity residuals and the algebra audit.
#[pyfunction]
#[pyo3(signature = (config = None, out = None))]
fn verify<'py>(py: Python<'py>, config: Option<&str>, out: Option<PathBuf>) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let cfg = load_config(config, out)?;
    outcome(py, py.detach(|| cmd_verify(&cfg)).map_err(to_py_err)?)
}

/// Wavepacket evolution with Ehrenfest, unitarity and convergence checks.
#[pyfunction]
#[pyo3(signature = (config = None, out = None))]
fn evolve<'py>(py: Python<'py>, config: Option<&str>, out: Option<PathBuf>) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let cfg = load_config(config, out)?;
    outcome(py, py.detach(|| cmd_evolve(&cfg)).map_err(to_py_err)?)
}

/// Commutative-limit comparison against the classical forms.
#[pyfunction]
#[pyo3(signature = (config = None, out = None))]
fn limits<'py>(py: Python<'py>, config: Option<&str>, out: Option<PathBuf>) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let cfg = load_config(config, out)?;
    outcome(py, cmd_limits(&cfg).map_err(to_py_err)?)
}

/// Rows of the shifted-coordinate commutator audit as dictionaries.
#[pyfunction]
#[pyo3(signature = (convention = "default"))]
fn algebra_report<'py>(py: Python<'py>, convention: &str) -> PyResult<Bound<'py, PyAny>> {
    let conv = ConventionConfig::by_name(convention)
        .ok_or_else(|| PyValueError::new_err(format!("unknown convention '{convention}'")))?;
    let report = algebra_consistency_report(&NCParameters::symbolic(), &conv).map_err(to_py_err)?;
    let value = serde_json::to_value(&report.rows).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

fn realizer(dim: usize, levels: usize, guard: usize, constants: Option<Vec<(String, f64)>>) -> PyResult<Realizer> {
    let basis = FockBasisConfig::new(dim, levels, 1.0, guard).map_err(to_py_err)?;
    let mut values = ConstantValues::default_scenario();
    for (name, v) in constants.unwrap_or_default() {
        let c = Constant::from_name(&name).ok_or_else(|| PyValueError::new_err(format!("unknown constant '{name}'")))?;
        values.set(c, v);
    }
    Realizer::new(basis, values, FieldSpec::symbolic()).map_err(to_py_err)
}

/// `||P(L - R)P|| / max(1, ||PRP||)` on the guarded Fock subspace. Both
/// sides use the grammar; brackets are evaluated as matrix commutators.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, dim = 2, levels = 16, guard = 6, constants = None))]
fn residual(
    py: Python<'_>,
    lhs: &str,
    rhs: &str,
    dim: usize,
    levels: usize,
    guard: usize,
    constants: Option<Vec<(String, f64)>>,
) -> PyResult<f64> {
    let (l, r) = (parse(lhs).map_err(to_py_err)?, parse(rhs).map_err(to_py_err)?);
    let realizer = realizer(dim, levels, guard, constants)?;
    let rep = py
        .detach(|| identity_residual("python", &l, &r, &realizer, 0.0))
        .map_err(to_py_err)?;
    Ok(rep.residual)
}

/// `||M - M^dagger|| / max(1, ||M||)` for the realized expression.
#[pyfunction]
#[pyo3(signature = (expr, dim = 2, levels = 16, guard = 6, constants = None))]
fn hermiticity(
    expr: &PyExpression,
    dim: usize,
    levels: usize,
    guard: usize,
    constants: Option<Vec<(String, f64)>>,
) -> PyResult<f64> {
    let m = realizer(dim, levels, guard, constants)?.realize(&expr.inner).map_err(to_py_err)?;
    Ok(hermiticity_residual(&m))
}

#[pymodule]
fn pyncdirac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpression>()?;
    m.add_function(wrap_pyfunction!(derive, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_report, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(hermiticity, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
