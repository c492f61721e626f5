//! Python bindings for the `hpstm` crate.

use hpstm::comparators::residual_norm;
use hpstm::report::{
    reference_fixtures, resolve_problem, run_comparison, run_sensitivity, write_csv,
    ComparisonConfig, CsvTable, FixtureKind, ProblemFile, ReportError,
};
use hpstm::solvers::{adm_solve, hpstm_solve, FpdeProblem, SeriesSolution};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn input_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn report_err(e: ReportError) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_csv<T: CsvTable>(table: &T) -> PyResult<String> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).map_err(report_err)?;
    String::from_utf8(buf).map_err(input_err)
}

/// A validated problem: a bundled name (`example1`..`example3`) or a TOML path.
#[pyclass(frozen)]
struct Problem {
    file: ProblemFile,
}

#[pymethods]
impl Problem {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Problem {
            file: resolve_problem(spec).map_err(report_err)?,
        })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let file = hpstm::report::load_problem_str(text, "<string>").map_err(report_err)?;
        Ok(Problem { file })
    }

    #[getter]
    fn name(&self) -> String {
        self.file.problem.name.clone()
    }

    /// Default orders from the problem file.
    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.file.alphas.clone()
    }

    #[getter]
    fn terms(&self) -> usize {
        self.file.terms
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.file.problem.domain
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?})", self.file.problem.name)
    }
}

impl Problem {
    fn at(&self, alpha: f64) -> FpdeProblem {
        self.file.problem.with_alpha(alpha)
    }
}

#[pyclass(frozen)]
struct Solution {
    problem: FpdeProblem,
    inner: SeriesSolution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.label()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    /// Each term u_k rendered as text.
    #[getter]
    fn terms(&self) -> Vec<String> {
        self.inner.terms.iter().map(|t| t.to_string()).collect()
    }

    /// Largest ratio between successive terms, if the solver flagged slow decay.
    #[getter]
    fn warning(&self) -> Option<f64> {
        self.inner.warning.as_ref().map(|w| w.max_ratio)
    }

    fn evaluate(&self, x: f64, t: f64) -> PyResult<f64> {
        self.inner
            .evaluate(x, t)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Maximum of |D^α S - R S - N S - f| over the grid `xs` × `ts`.
    fn residual(&self, xs: Vec<f64>, ts: Vec<f64>) -> PyResult<f64> {
        residual_norm(&self.problem, &self.inner, &xs, &ts)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        self.inner.partial_sum.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution({}, {}, alpha={}, n={})",
            self.inner.problem_name,
            self.method(),
            self.inner.alpha,
            self.inner.n_terms
        )
    }
}

/// Series solution by homotopy perturbation (`method="hpstm"`) or Adomian decomposition.
#[pyfunction]
#[pyo3(signature = (problem, alpha, terms=5, method="hpstm"))]
fn solve(problem: &Problem, alpha: f64, terms: usize, method: &str) -> PyResult<Solution> {
    let p = problem.at(alpha);
    let inner = match method {
        "hpstm" => hpstm_solve(&p, terms),
        "adm" => adm_solve(&p, terms),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(input_err)?;
    Ok(Solution { problem: p, inner })
}

/// Comparison table as CSV text. Comparators that fail leave empty cells.
#[pyfunction]
#[pyo3(signature = (problem, alphas=None, point=(1.0, 0.5), rbf_centers=100, rbf_eps=0.1, fdm_grid=100))]
fn compare(
    problem: &Problem,
    alphas: Option<Vec<f64>>,
    point: (f64, f64),
    rbf_centers: usize,
    rbf_eps: f64,
    fdm_grid: usize,
) -> PyResult<String> {
    let alphas = alphas.unwrap_or_else(|| problem.file.alphas.clone());
    let cfg = ComparisonConfig {
        terms: problem.file.terms,
        fdm_nx: fdm_grid,
        fdm_nt: fdm_grid,
        rbf_centers,
        rbf_eps,
        rbf_nt: fdm_grid,
    };
    let report = run_comparison(&problem.file.problem, &alphas, point, &cfg).map_err(report_err)?;
    to_csv(&report)
}

/// Value, residual and term-ratio table over orders and term counts, as CSV text.
#[pyfunction]
#[pyo3(signature = (problem, alphas=None, ns=vec![3, 5, 7], point=(1.0, 0.5)))]
fn sensitivity(
    problem: &Problem,
    alphas: Option<Vec<f64>>,
    ns: Vec<usize>,
    point: (f64, f64),
) -> PyResult<String> {
    let alphas = alphas.unwrap_or_else(|| problem.file.alphas.clone());
    let report = run_sensitivity(&problem.file.problem, &alphas, &ns, point).map_err(report_err)?;
    to_csv(&report)
}

/// Published reference values as `(table, example, kind, alpha, method, value)`.
#[pyfunction]
fn fixtures() -> Vec<(u8, u8, &'static str, f64, String, f64)> {
    reference_fixtures()
        .into_iter()
        .map(|f| {
            let kind = match f.kind {
                FixtureKind::Value => "value",
                FixtureKind::AbsError => "abs_error",
            };
            (f.table, f.example, kind, f.alpha, f.method, f.value)
        })
        .collect()
}

#[pymodule]
fn hpstm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    Ok(())
}
