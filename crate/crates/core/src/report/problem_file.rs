//! Problem definition files.
//!
//! ```toml
//! name = "example2"
//! alpha = [1.0, 0.9]          # orders to run; the first is the default
//! ic = "(1 + 2*x)/(x^2 + x + 1)"
//! domain = [-4.0, 6.0]
//! form = "rhs"                # or "lhs"
//! n = 5                       # default number of correction terms
//!
//! [[linear]]                  # coeff(x) · ∂^order u
//! order = 2
//! coeff = "1"
//!
//! [[nonlinear]]               # coeff(x) · product of u, ux, uxx
//! monomial = "u^3"
//! coeff = "-2"
//!
//! [[source]]                  # coeff(x) · t^t_power
//! t_power = 0
//! coeff = "0"
//! ```

use std::path::Path;

use serde::Deserialize;

use super::ReportError;
use crate::expr::{parse, Expr};
use crate::solvers::{Form, FpdeProblem, LinearTerm, Monomial, SolverError, SourceTerm};

pub const BUNDLED: [(&str, &str); 3] = [
    ("example1", include_str!("../../problems/example1.toml")),
    ("example2", include_str!("../../problems/example2.toml")),
    ("example3", include_str!("../../problems/example3.toml")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: String,
    #[serde(default)]
    title: Option<String>,
    alpha: Vec<f64>,
    ic: String,
    domain: [f64; 2],
    #[serde(default = "default_form")]
    form: String,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    linear: Vec<RawLinear>,
    #[serde(default)]
    nonlinear: Vec<RawMonomial>,
    #[serde(default)]
    source: Vec<RawSource>,
}

fn default_form() -> String {
    "rhs".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinear {
    order: u32,
    coeff: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonomial {
    monomial: String,
    coeff: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    t_power: u32,
    coeff: String,
}

/// A validated problem together with its run settings.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub problem: FpdeProblem,
    pub title: Option<String>,
    pub alphas: Vec<f64>,
    pub terms: usize,
}

fn field_expr(field: &str, text: &str) -> Result<Expr, ReportError> {
    parse(text).map_err(|e| ReportError::Parse {
        location: format!("field `{field}`"),
        message: e.to_string(),
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Parses and validates problem text. `origin` names the source in errors.
pub fn load_problem_str(text: &str, origin: &str) -> Result<ProblemFile, ReportError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                format!("{origin}:{line}:{col}")
            }
            None => origin.to_string(),
        };
        ReportError::Parse {
            location,
            message: e.message().to_string(),
        }
    })?;
    let validation = |field: &str, reason: String| ReportError::Validation {
        field: field.to_string(),
        reason,
    };
    if raw.alpha.is_empty() {
        return Err(validation("alpha", "at least one order is required".into()));
    }
    let form = match raw.form.as_str() {
        "rhs" => Form::Rhs,
        "lhs" => Form::Lhs,
        other => {
            return Err(validation(
                "form",
                format!("expected \"rhs\" or \"lhs\", got {other:?}"),
            ))
        }
    };
    let terms = raw.n.unwrap_or(crate::solvers::DEFAULT_TERMS);
    if terms == 0 {
        return Err(validation("n", "must be at least 1".into()));
    }
    let mut linear_op = Vec::new();
    for (i, l) in raw.linear.iter().enumerate() {
        linear_op.push(LinearTerm {
            order: l.order,
            coeff: field_expr(&format!("linear[{i}].coeff"), &l.coeff)?,
        });
    }
    let mut nonlinear_op = Vec::new();
    for (i, m) in raw.nonlinear.iter().enumerate() {
        let coeff = field_expr(&format!("nonlinear[{i}].coeff"), &m.coeff)?;
        nonlinear_op.push(
            Monomial::parse(&m.monomial, coeff)
                .map_err(|e| validation(&format!("nonlinear[{i}].monomial"), e.to_string()))?,
        );
    }
    let mut source = Vec::new();
    for (i, s) in raw.source.iter().enumerate() {
        source.push(SourceTerm {
            t_power: s.t_power,
            coeff: field_expr(&format!("source[{i}].coeff"), &s.coeff)?,
        });
    }
    let problem = FpdeProblem {
        name: raw.name,
        alpha: raw.alpha[0],
        ic: field_expr("ic", &raw.ic)?,
        linear_op,
        nonlinear_op,
        source,
        domain: (raw.domain[0], raw.domain[1]),
        form,
    };
    for &a in &raw.alpha {
        problem.with_alpha(a).validate().map_err(|e| match e {
            SolverError::Validation { field, reason } => ReportError::Validation { field, reason },
            other => validation("problem", other.to_string()),
        })?;
    }
    Ok(ProblemFile {
        problem,
        title: raw.title,
        alphas: raw.alpha,
        terms,
    })
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, ReportError> {
    let text = std::fs::read_to_string(path)?;
    load_problem_str(&text, &path.display().to_string())
}

pub fn bundled_problem(name: &str) -> Result<ProblemFile, ReportError> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ReportError::UnknownProblem(name.to_string()))
        .and_then(|(n, text)| load_problem_str(text, n))
}

/// A bundled name, or otherwise a path to a problem file.
pub fn resolve_problem(spec: &str) -> Result<ProblemFile, ReportError> {
    if BUNDLED.iter().any(|(n, _)| *n == spec) {
        return bundled_problem(spec);
    }
    let path = Path::new(spec);
    if path.exists() {
        return load_problem(path);
    }
    Err(ReportError::UnknownProblem(spec.to_string()))
}
