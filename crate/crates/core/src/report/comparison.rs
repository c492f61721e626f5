use super::fixtures::{example_number, lookup, FixtureKind, FIXTURE_POINT};
use super::{classical_solution, fmt_num, fmt_opt, CsvTable, ReportError};
use crate::comparators::{fdm_l1_solve, rbf_collocation_solve, ComparatorError};
use crate::solvers::{adm_solve, hpstm_solve, FpdeProblem, DEFAULT_TERMS};

/// Methods whose values exist only as published fixtures.
const FIXTURE_ONLY: [&str; 2] = ["VIM", "Spectral"];

/// Method label of the rows holding `|HPSTM - classical solution|`.
pub const ABS_ERROR: &str = "abs_error";

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub terms: usize,
    pub fdm_nx: usize,
    pub fdm_nt: usize,
    pub rbf_centers: usize,
    pub rbf_eps: f64,
    pub rbf_nt: usize,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            terms: DEFAULT_TERMS,
            fdm_nx: 100,
            fdm_nt: 100,
            rbf_centers: 100,
            rbf_eps: 0.1,
            rbf_nt: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub alpha: f64,
    pub method: String,
    pub value: Option<f64>,
    pub fixture: Option<f64>,
    pub abs_discrepancy: Option<f64>,
    /// Source of the fixture, e.g. `T3 porous_compare`.
    pub fixture_table: Option<String>,
}

/// A comparator that could not produce a value.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodFailure {
    pub alpha: f64,
    pub method: String,
    pub error: ComparatorError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub problem: String,
    pub point: (f64, f64),
    pub rows: Vec<ComparisonRow>,
    pub failures: Vec<MethodFailure>,
}

impl ComparisonReport {
    /// Computed value of `method` at order `alpha`, if any.
    pub fn value(&self, alpha: f64, method: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.alpha == alpha && r.method == method)
            .and_then(|r| r.value)
    }
}

impl CsvTable for ComparisonReport {
    fn header(&self) -> Vec<String> {
        [
            "alpha",
            "method",
            "value",
            "fixture",
            "abs_discrepancy",
            "fixture_table",
        ]
        .map(String::from)
        .to_vec()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_num(r.alpha),
                    r.method.clone(),
                    fmt_opt(r.value),
                    fmt_opt(r.fixture),
                    fmt_opt(r.abs_discrepancy),
                    r.fixture_table.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// Appends one row per matching fixture, or a single bare row when the
/// method has a value but no fixture.
fn push_rows(
    rows: &mut Vec<ComparisonRow>,
    alpha: f64,
    method: &str,
    value: Option<f64>,
    fixtures: Vec<super::ReferenceFixture>,
) {
    if fixtures.is_empty() {
        if value.is_some() || !FIXTURE_ONLY.contains(&method) {
            rows.push(ComparisonRow {
                alpha,
                method: method.to_string(),
                value,
                fixture: None,
                abs_discrepancy: None,
                fixture_table: None,
            });
        }
        return;
    }
    for f in fixtures {
        rows.push(ComparisonRow {
            alpha,
            method: method.to_string(),
            value,
            fixture: Some(f.value),
            abs_discrepancy: value.map(|v| (v - f.value).abs()),
            fixture_table: Some(f.source()),
        });
    }
}

/// Evaluates HPSTM, ADM, RBF and FDM at `point` for each order and joins the
/// published values. Fixtures are joined only at their own evaluation point.
/// A failing comparator leaves its value empty and is listed in `failures`.
pub fn run_comparison(
    problem: &FpdeProblem,
    alphas: &[f64],
    point: (f64, f64),
    cfg: &ComparisonConfig,
) -> Result<ComparisonReport, ReportError> {
    let (x, t) = point;
    let (lo, hi) = problem.domain;
    if !(x >= lo && x <= hi && t > 0.0 && t.is_finite()) {
        return Err(ReportError::Validation {
            field: "point".into(),
            reason: format!("({x}, {t}) needs x in [{lo}, {hi}] and t > 0"),
        });
    }
    if cfg.terms == 0 {
        return Err(ReportError::Validation {
            field: "terms".into(),
            reason: "must be at least 1".into(),
        });
    }
    let example = if point == FIXTURE_POINT {
        example_number(&problem.name)
    } else {
        None
    };
    let fixtures = |alpha: f64, method: &str, kind: FixtureKind| match example {
        Some(e) => lookup(e, alpha, method, kind),
        None => Vec::new(),
    };
    let exact = classical_solution(&problem.name);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &alpha in alphas {
        let p = problem.with_alpha(alpha);
        p.validate()?;
        let hpstm = hpstm_solve(&p, cfg.terms)?.evaluate(x, t)?;
        let adm = adm_solve(&p, cfg.terms)?.evaluate(x, t)?;
        let rbf = rbf_collocation_solve(&p, cfg.rbf_centers, cfg.rbf_eps, cfg.rbf_nt, t)
            .and_then(|s| s.evaluate(x, t));
        let fdm = fdm_l1_solve(&p, cfg.fdm_nx, cfg.fdm_nt, t).and_then(|g| g.evaluate(x, t));

        push_rows(
            &mut rows,
            alpha,
            "HPSTM",
            Some(hpstm),
            fixtures(alpha, "HPSTM", FixtureKind::Value),
        );
        push_rows(
            &mut rows,
            alpha,
            "ADM",
            Some(adm),
            fixtures(alpha, "ADM", FixtureKind::Value),
        );
        for (method, result) in [("RBF", rbf), ("FDM", fdm)] {
            let value = match result {
                Ok(v) => Some(v),
                Err(error) => {
                    failures.push(MethodFailure {
                        alpha,
                        method: method.to_string(),
                        error,
                    });
                    None
                }
            };
            push_rows(
                &mut rows,
                alpha,
                method,
                value,
                fixtures(alpha, method, FixtureKind::Value),
            );
        }
        for method in FIXTURE_ONLY {
            push_rows(
                &mut rows,
                alpha,
                method,
                None,
                fixtures(alpha, method, FixtureKind::Value),
            );
        }
        if let Some(u) = exact {
            let err = (hpstm - u(x, t)).abs();
            push_rows(
                &mut rows,
                alpha,
                ABS_ERROR,
                Some(err),
                fixtures(alpha, "HPSTM", FixtureKind::AbsError),
            );
        }
    }
    Ok(ComparisonReport {
        problem: problem.name.clone(),
        point,
        rows,
        failures,
    })
}
