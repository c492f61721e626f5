use super::{fmt_num, CsvTable, ReportError};
use crate::solvers::{hpstm_solve, FpdeProblem};

/// `t` runs over `0, 1/FIGURE_STEPS, …, 1`.
pub const FIGURE_STEPS: usize = 100;

/// `u(x, t)` curves from the HPSTM partial sum, one column per order.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub x: f64,
    pub alphas: Vec<f64>,
    pub t: Vec<f64>,
    /// `columns[a][k]` is `u(x, t[k])` at order `alphas[a]`.
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable for FigureData {
    fn header(&self) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain(self.alphas.iter().map(|a| format!("alpha_{}", fmt_num(*a))))
            .collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.t
            .iter()
            .enumerate()
            .map(|(k, t)| {
                std::iter::once(fmt_num(*t))
                    .chain(self.columns.iter().map(|c| fmt_num(c[k])))
                    .collect()
            })
            .collect()
    }
}

pub fn figure_data(
    problem: &FpdeProblem,
    alphas: &[f64],
    x: f64,
    terms: usize,
) -> Result<FigureData, ReportError> {
    let t: Vec<f64> = (0..=FIGURE_STEPS)
        .map(|k| k as f64 / FIGURE_STEPS as f64)
        .collect();
    let mut columns = Vec::new();
    for &alpha in alphas {
        let p = problem.with_alpha(alpha);
        p.validate()?;
        let sol = hpstm_solve(&p, terms)?;
        columns.push(
            t.iter()
                .map(|&tk| sol.evaluate(x, tk))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(FigureData {
        x,
        alphas: alphas.to_vec(),
        t,
        columns,
    })
}
