//! Published table values, kept verbatim as reference data. They are joined
//! into reports with a discrepancy column and never asserted against.

use serde::Deserialize;

const FIXTURES_CSV: &str = include_str!("../../data/fixtures.csv");

/// Evaluation point shared by every published table.
pub const FIXTURE_POINT: (f64, f64) = (1.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    /// A solution value `u(1, 0.5)`.
    Value,
    /// An absolute error against the classical exact solution.
    AbsError,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReferenceFixture {
    pub table: u8,
    pub label: String,
    pub example: u8,
    pub kind: FixtureKind,
    pub alpha: f64,
    pub method: String,
    pub value: f64,
}

impl ReferenceFixture {
    /// Short provenance tag such as `T6 heat_compare`.
    pub fn source(&self) -> String {
        format!("T{} {}", self.table, self.label)
    }
}

/// Every transcribed table entry, in table order.
pub fn reference_fixtures() -> Vec<ReferenceFixture> {
    let mut rdr = csv::Reader::from_reader(FIXTURES_CSV.as_bytes());
    rdr.deserialize()
        .collect::<Result<Vec<ReferenceFixture>, _>>()
        .expect("bundled fixture table is well formed")
}

/// Fixtures for one example, method and kind at the given order.
pub fn lookup(example: u8, alpha: f64, method: &str, kind: FixtureKind) -> Vec<ReferenceFixture> {
    reference_fixtures()
        .into_iter()
        .filter(|f| {
            f.example == example
                && f.kind == kind
                && f.method == method
                && (f.alpha - alpha).abs() < 1e-12
        })
        .collect()
}

/// Example number for a bundled problem name.
pub fn example_number(problem_name: &str) -> Option<u8> {
    match problem_name {
        "example1" => Some(1),
        "example2" => Some(2),
        "example3" => Some(3),
        _ => None,
    }
}
