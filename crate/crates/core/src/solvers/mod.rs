//! HPSTM and ADM recursions for `D^α u = R u + N u + f` (or the
//! left-hand form `D^α u + R u + N u = f`), where `R` is linear in the
//! spatial derivatives of `u` and `N` is a polynomial in `u, u_x, u_xx`.

mod homotopy;
mod recursion;

use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::fracseries::{SampleDomain, SeriesError};

pub use homotopy::{adomian_polynomial, he_polynomial, HomotopyPolynomial};
pub use recursion::{
    adm_solve, convergence_ratios, hpstm_solve, Method, NonConvergenceWarning, SeriesSolution,
    DEFAULT_TERMS, DIAGNOSTIC_T_PROBE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid problem field `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unsupported nonlinearity `{0}`: only polynomials in u, ux, uxx are handled")]
    UnsupportedNonlinearity(String),
    #[error("need at least {needed} series terms, got {got}")]
    NotEnoughTerms { needed: usize, got: usize },
    #[error("term count must be at least 1")]
    InvalidTermCount,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<ExprError> for SolverError {
    fn from(e: ExprError) -> Self {
        SolverError::Series(SeriesError::Expr(e))
    }
}

/// Which side of the equation carries `R` and `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `D^α u = R u + N u + f`
    Rhs,
    /// `D^α u + R u + N u = f`
    Lhs,
}

impl Form {
    pub fn sign(self) -> f64 {
        match self {
            Form::Rhs => 1.0,
            Form::Lhs => -1.0,
        }
    }
}

/// `coeff(x) · ∂^order u`.
#[derive(Debug, Clone)]
pub struct LinearTerm {
    pub order: u32,
    pub coeff: Expr,
}

/// `coeff(x) · u^powers[0] · u_x^powers[1] · u_xx^powers[2]`.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: Expr,
    pub powers: [u32; 3],
}

pub const SYMBOLS: [&str; 3] = ["u", "ux", "uxx"];

impl Monomial {
    pub fn new(coeff: Expr, powers: [u32; 3]) -> Self {
        Monomial { coeff, powers }
    }

    /// Parses a product such as `u*ux`, `u^3` or `ux^2*uxx`.
    pub fn parse(text: &str, coeff: Expr) -> Result<Self, SolverError> {
        let unsupported = || SolverError::UnsupportedNonlinearity(text.to_string());
        let mut powers = [0u32; 3];
        for factor in text.split('*') {
            let factor = factor.trim();
            let (name, power) = match factor.split_once('^') {
                Some((n, p)) => (
                    n.trim(),
                    p.trim().parse::<u32>().map_err(|_| unsupported())?,
                ),
                None => (factor, 1),
            };
            let slot = SYMBOLS
                .iter()
                .position(|s| *s == name)
                .ok_or_else(unsupported)?;
            powers[slot] += power;
        }
        Ok(Monomial { coeff, powers })
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    /// Derivative orders of the factors, with multiplicity, e.g. `u^2 u_x` is `[0, 0, 1]`.
    pub(crate) fn factor_orders(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (order, &p) in self.powers.iter().enumerate() {
            out.extend(std::iter::repeat(order as u32).take(p as usize));
        }
        out
    }

    /// Value for given point values of `u, u_x, u_xx`.
    pub fn evaluate(&self, x: f64, values: [f64; 3]) -> Result<f64, ExprError> {
        let mut acc = self.coeff.evaluate(x)?;
        for (v, &p) in values.iter().zip(&self.powers) {
            acc *= v.powi(p as i32);
        }
        Ok(acc)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = SYMBOLS
            .iter()
            .zip(self.powers)
            .filter(|(_, p)| *p > 0)
            .map(|(s, p)| {
                if p == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{p}")
                }
            })
            .collect();
        write!(f, "({})*{}", self.coeff, parts.join("*"))
    }
}

/// `t^t_power · coeff(x)`; integer powers keep `J^α f` on the exponent lattice.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub t_power: u32,
    pub coeff: Expr,
}

#[derive(Debug, Clone)]
pub struct FpdeProblem {
    pub name: String,
    pub alpha: f64,
    pub ic: Expr,
    pub linear_op: Vec<LinearTerm>,
    pub nonlinear_op: Vec<Monomial>,
    pub source: Vec<SourceTerm>,
    pub domain: (f64, f64),
    pub form: Form,
}

impl FpdeProblem {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |field: &str, reason: String| {
            Err(SolverError::Validation {
                field: field.to_string(),
                reason,
            })
        };
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", format!("{} is outside (0, 1]", self.alpha));
        }
        let (lo, hi) = self.domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad("domain", format!("[{lo}, {hi}] is empty"));
        }
        if let Some(t) = self.linear_op.iter().find(|t| t.order > 2) {
            return bad("linear", format!("derivative order {} exceeds 2", t.order));
        }
        if let Some(m) = self.nonlinear_op.iter().find(|m| m.degree() == 0) {
            return bad("nonlinear", format!("`{m}` does not involve u"));
        }
        let max_degree = self.nonlinear_op.iter().map(Monomial::degree).max();
        if let Some(d) = max_degree {
            if d < 2 {
                return bad(
                    "nonlinear",
                    "terms are all linear; move them to `linear`".into(),
                );
            }
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        FpdeProblem {
            alpha,
            ..self.clone()
        }
    }

    pub fn sample_domain(&self) -> SampleDomain {
        SampleDomain::new(self.domain.0, self.domain.1)
    }

    /// Highest spatial derivative order appearing anywhere in the operator.
    pub fn spatial_order(&self) -> u32 {
        let lin = self.linear_op.iter().map(|t| t.order).max().unwrap_or(0);
        let non = self
            .nonlinear_op
            .iter()
            .flat_map(|m| m.factor_orders())
            .max()
            .unwrap_or(0);
        lin.max(non)
    }

    /// `R u + N u` at a point, from the values `[u, u_x, u_xx]`.
    pub fn operator_value(&self, x: f64, values: [f64; 3]) -> Result<f64, ExprError> {
        let mut acc = 0.0;
        for t in &self.linear_op {
            acc += t.coeff.evaluate(x)? * values[t.order as usize];
        }
        for m in &self.nonlinear_op {
            acc += m.evaluate(x, values)?;
        }
        Ok(acc)
    }

    /// Source `f(x, t)` at a point.
    pub fn source_value(&self, x: f64, t: f64) -> Result<f64, ExprError> {
        let mut acc = 0.0;
        for s in &self.source {
            acc += s.coeff.evaluate(x)? * t.powi(s.t_power as i32);
        }
        Ok(acc)
    }
}
