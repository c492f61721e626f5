//! Independent numerical solvers used to cross-check the series methods:
//! an L1 finite-difference scheme and Gaussian RBF (Kansa) collocation,
//! plus the exact series residual and the fill distance of a center set.

mod fdm;
mod rbf;

use thiserror::Error;

use crate::expr::{Differentiator, ExprError};
use crate::fracseries::{caputo_derivative, SeriesError};
use crate::solvers::{FpdeProblem, SeriesSolution, SolverError};
use crate::special::gamma;

pub use fdm::{fdm_l1_solve, fdm_l1_solve_with_boundary, GridSolution};
pub use rbf::{
    rbf_collocation_solve, rbf_collocation_solve_with_boundary, rbf_interpolate, RbfBasis,
    RbfConfig, RbfSolution, ILL_CONDITIONED_LIMIT,
};

/// Magnitude beyond which a time-stepped solution counts as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComparatorError {
    #[error("solution diverged at t = {t} (|u| = {magnitude:e})")]
    Divergence { t: f64, magnitude: f64 },
    #[error("step {step}: implicit system lost diagonal dominance at x = {x}")]
    Stability { step: usize, x: f64 },
    #[error(
        "collocation matrix condition {condition:e} exceeds {limit:e} at ε = {eps}; {suggestion}"
    )]
    IllConditioned {
        condition: f64,
        limit: f64,
        eps: f64,
        suggestion: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("point ({x}, {t}) lies outside the computed region")]
    OutOfRange { x: f64, t: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl From<SeriesError> for ComparatorError {
    fn from(e: SeriesError) -> Self {
        ComparatorError::Solver(SolverError::Series(e))
    }
}

impl From<ExprError> for ComparatorError {
    fn from(e: ExprError) -> Self {
        ComparatorError::Solver(e.into())
    }
}

/// L1 weights `b_j = (j+1)^{1-α} - j^{1-α}` for j = 0..n.
pub fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..n)
        .map(|j| {
            let j = j as f64;
            (j + 1.0).powf(p) - j.powf(p)
        })
        .collect()
}

/// Prefactor `dt^{-α}/Γ(2-α)` of the L1 scheme.
pub(crate) fn l1_prefactor(alpha: f64, dt: f64) -> f64 {
    dt.powf(-alpha) / gamma(2.0 - alpha).expect("2 - α lies in [1, 2)")
}

/// History part of the L1 sum at level `n`:
/// `Σ_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1})`, for one spatial node.
pub(crate) fn l1_history(weights: &[f64], levels: &[f64]) -> f64 {
    let n = levels.len();
    let mut acc = 0.0;
    for j in 1..n {
        acc += weights[j] * (levels[n - j] - levels[n - j - 1]);
    }
    acc
}

/// Coefficient values of `R` and `N` at fixed nodes, and the semi-implicit
/// split used by both time steppers.
///
/// Linear terms and degree-one monomials are implicit. In a higher-degree
/// monomial one power of its highest-order derivative symbol is implicit and
/// the remaining factors take their values from the previous time level.
pub(crate) struct Linearization {
    linear: Vec<[f64; 3]>,
    monomials: Vec<(Vec<f64>, [u32; 3])>,
}

impl Linearization {
    pub(crate) fn new(problem: &FpdeProblem, nodes: &[f64]) -> Result<Self, ComparatorError> {
        let mut linear = vec![[0.0; 3]; nodes.len()];
        for term in &problem.linear_op {
            for (row, &x) in linear.iter_mut().zip(nodes) {
                row[term.order as usize] += term.coeff.evaluate(x)?;
            }
        }
        let mut monomials = Vec::with_capacity(problem.nonlinear_op.len());
        for m in &problem.nonlinear_op {
            let values = nodes
                .iter()
                .map(|&x| m.coeff.evaluate(x))
                .collect::<Result<Vec<_>, _>>()?;
            monomials.push((values, m.powers));
        }
        Ok(Linearization { linear, monomials })
    }

    /// Coefficients `a_s` of the implicit operator `Σ a_s ∂^s u` at node `i`,
    /// given lagged values `[u, u_x, u_xx]` there.
    pub(crate) fn implicit(&self, i: usize, lagged: [f64; 3]) -> [f64; 3] {
        let mut a = self.linear[i];
        for (coeffs, powers) in &self.monomials {
            let top = (0..3)
                .rev()
                .find(|&s| powers[s] > 0)
                .expect("monomial has a factor");
            let mut c = coeffs[i];
            for s in 0..3 {
                let p = if s == top { powers[s] - 1 } else { powers[s] };
                c *= lagged[s].powi(p as i32);
            }
            a[top] += c;
        }
        a
    }
}

/// Default Dirichlet data: the HPSTM partial sum with the default term count.
pub(crate) fn series_boundary(
    problem: &FpdeProblem,
) -> Result<impl Fn(f64, f64) -> Result<f64, ComparatorError>, ComparatorError> {
    let sol = crate::solvers::hpstm_solve(problem, crate::solvers::DEFAULT_TERMS)?;
    Ok(move |x: f64, t: f64| Ok(sol.evaluate(x, t)?))
}

pub(crate) fn check_finite(values: &[f64], t: f64) -> Result<(), ComparatorError> {
    for &v in values {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(ComparatorError::Divergence {
                t,
                magnitude: v.abs(),
            });
        }
    }
    Ok(())
}

/// Largest distance from a point of `[lo, hi]` to the nearest center.
pub fn fill_distance(centers: &[f64], domain: (f64, f64)) -> f64 {
    let mut c: Vec<f64> = centers.to_vec();
    c.sort_by(f64::total_cmp);
    let (lo, hi) = domain;
    let mut h: f64 = (c[0] - lo).max(hi - c[c.len() - 1]).max(0.0);
    for w in c.windows(2) {
        h = h.max(0.5 * (w[1] - w[0]));
    }
    h
}

/// `max |D^α S - (±(R S + N S) + f)|` over the sample grid, where `S` is the
/// partial sum. The Caputo derivative and spatial derivatives are exact on
/// the series; only the final values are evaluated numerically.
pub fn residual_norm(
    problem: &FpdeProblem,
    sol: &SeriesSolution,
    x_samples: &[f64],
    t_samples: &[f64],
) -> Result<f64, ComparatorError> {
    let s = &sol.partial_sum;
    let dt = caputo_derivative(s, problem.alpha)?;
    let mut d = Differentiator::new();
    let order = problem.spatial_order();
    let derivs: Vec<_> = (0..=2u32)
        .map(|k| {
            if k <= order {
                Some(s.diff_x_with(&mut d, k))
            } else {
                None
            }
        })
        .collect();
    let sign = problem.form.sign();
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        for &x in x_samples {
            let mut values = [0.0; 3];
            for (v, ds) in values.iter_mut().zip(&derivs) {
                if let Some(ds) = ds {
                    *v = ds.evaluate(x, t)?;
                }
            }
            let rhs = sign * problem.operator_value(x, values)? + problem.source_value(x, t)?;
            worst = worst.max((dt.evaluate(x, t)? - rhs).abs());
        }
    }
    Ok(worst)
}
