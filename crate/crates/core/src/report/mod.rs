//! Problem files, comparison and sensitivity reports, figure data and their
//! CSV output.

mod comparison;
mod exact;
mod figures;
mod fixtures;
mod problem_file;
mod sensitivity;

use thiserror::Error;

use crate::comparators::ComparatorError;
use crate::solvers::SolverError;

pub use comparison::{run_comparison, ComparisonConfig, ComparisonReport, ComparisonRow};
pub use exact::classical_solution;
pub use figures::{figure_data, FigureData, FIGURE_STEPS};
pub use fixtures::{
    example_number, lookup, reference_fixtures, FixtureKind, ReferenceFixture, FIXTURE_POINT,
};
pub use problem_file::{
    bundled_problem, load_problem, load_problem_str, resolve_problem, ProblemFile, BUNDLED,
};
pub use sensitivity::{run_sensitivity, SensitivityCell, SensitivityReport, SENSITIVITY_T};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unknown problem `{0}`: not a bundled name or an existing file")]
    UnknownProblem(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Comparator(#[from] ComparatorError),
}

impl ReportError {
    /// True for problems with the user's input rather than the numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            ReportError::Parse { .. }
            | ReportError::Validation { .. }
            | ReportError::UnknownProblem(_)
            | ReportError::Io(_)
            | ReportError::Csv(_) => true,
            ReportError::Solver(SolverError::Validation { .. }) => true,
            ReportError::Solver(_) | ReportError::Comparator(_) => false,
        }
    }
}

/// Something that renders as a CSV table.
pub trait CsvTable {
    fn header(&self) -> Vec<String>;
    fn records(&self) -> Vec<Vec<String>>;
}

/// Writes `report` as CSV to `out`.
pub fn write_csv<W: std::io::Write, T: CsvTable + ?Sized>(
    report: &T,
    out: W,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(report.header())?;
    for r in report.records() {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report` as CSV to the file at `path`.
pub fn emit_csv<T: CsvTable + ?Sized>(
    report: &T,
    path: &std::path::Path,
) -> Result<(), ReportError> {
    let file = std::fs::File::create(path)?;
    write_csv(report, std::io::BufWriter::new(file))
}

/// Shortest round-trip form: `.0` on integers, exponent notation for very
/// small or large magnitudes.
pub(crate) fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if !v.is_finite() || (a != 0.0 && !(1e-4..1e15).contains(&a)) {
        format!("{v:e}")
    } else if v == v.trunc() {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}
