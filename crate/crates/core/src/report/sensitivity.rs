use std::time::Instant;

use super::{fmt_num, CsvTable, ReportError};
use crate::comparators::residual_norm;
use crate::expr::sample_points;
use crate::fracseries::SAMPLE_COUNT;
use crate::solvers::{convergence_ratios, hpstm_solve, FpdeProblem};

/// Time at which the residual is measured.
pub const SENSITIVITY_T: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCell {
    pub alpha: f64,
    pub n: usize,
    pub value: f64,
    /// `|D^α S - F(S)|` at `(x, SENSITIVITY_T)`.
    pub residual: f64,
    /// Largest ratio of successive term norms at the point's time, 0 for a
    /// single nonzero term.
    pub max_ratio: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub problem: String,
    pub point: (f64, f64),
    pub cells: Vec<SensitivityCell>,
    /// Whether `wall_ms` goes into the CSV; timings break determinism.
    pub include_timing: bool,
}

impl SensitivityReport {
    pub fn cell(&self, alpha: f64, n: usize) -> Option<&SensitivityCell> {
        self.cells.iter().find(|c| c.alpha == alpha && c.n == n)
    }
}

impl CsvTable for SensitivityReport {
    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["alpha", "n", "value", "residual", "max_ratio"]
            .map(String::from)
            .to_vec();
        if self.include_timing {
            h.push("wall_ms".into());
        }
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                let mut r = vec![
                    fmt_num(c.alpha),
                    c.n.to_string(),
                    fmt_num(c.value),
                    fmt_num(c.residual),
                    fmt_num(c.max_ratio),
                ];
                if self.include_timing {
                    r.push(format!("{:.3}", c.wall_ms));
                }
                r
            })
            .collect()
    }
}

/// HPSTM with each term count in `ns` for each order: value at `point`,
/// residual at `(point.x, SENSITIVITY_T)` and the term-ratio diagnostic.
pub fn run_sensitivity(
    problem: &FpdeProblem,
    alphas: &[f64],
    ns: &[usize],
    point: (f64, f64),
) -> Result<SensitivityReport, ReportError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(ReportError::Validation {
            field: "terms".into(),
            reason: "need a nonempty list of positive term counts".into(),
        });
    }
    let (x, t) = point;
    let samples = sample_points(problem.domain.0, problem.domain.1, SAMPLE_COUNT);
    let mut cells = Vec::new();
    for &alpha in alphas {
        let p = problem.with_alpha(alpha);
        p.validate()?;
        for &n in ns {
            let start = Instant::now();
            let sol = hpstm_solve(&p, n)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let value = sol.evaluate(x, t)?;
            let residual = residual_norm(&p, &sol, &[x], &[SENSITIVITY_T])?;
            let max_ratio = convergence_ratios(&sol, t, &samples)?
                .into_iter()
                .fold(0.0, f64::max);
            cells.push(SensitivityCell {
                alpha,
                n,
                value,
                residual,
                max_ratio,
                wall_ms,
            });
        }
    }
    Ok(SensitivityReport {
        problem: problem.name.clone(),
        point,
        cells,
        include_timing: false,
    })
}
