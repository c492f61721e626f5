//! Generalized time-power series `Σ c_k(x) t^{μ_k}` with exact exponents
//! `μ = q + m·α`, and the operators that act on them term by term: spatial
//! derivatives, the Riemann–Liouville integral, the Caputo derivative and the
//! Sumudu transform restricted to power series.

mod calculus;
mod document;
mod sumudu;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::expr::{sample_points, Differentiator, Expr, ExprError};
use crate::special::SpecialError;

pub use calculus::{caputo_derivative, frac_integral};
pub use document::{SeriesDocument, TermDocument};
pub use sumudu::{sumudu_forward, sumudu_inverse, sumudu_scale, ImageTerm, SumuduImage};

/// Coefficients below this magnitude at every sample point are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-12;
/// Number of canonical sample points used for pruning and identity checks.
pub const SAMPLE_COUNT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series have different fractional orders: {left} vs {right}")]
    AlphaMismatch { left: f64, right: f64 },
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("operator order {0} cannot be represented on the exponent lattice")]
    InvalidOrder(f64),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("term t^{exponent} has no Caputo derivative of order {order} in the series class")]
    CaputoDomain { exponent: f64, order: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Exponent `const_part + alpha_mult·α`. Equality is exact on both parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlphaExponent {
    pub const_part: Rational64,
    pub alpha_mult: u32,
}

impl AlphaExponent {
    pub const ZERO: AlphaExponent = AlphaExponent {
        const_part: Rational64::new_raw(0, 1),
        alpha_mult: 0,
    };

    pub fn new(const_part: Rational64, alpha_mult: u32) -> Self {
        AlphaExponent {
            const_part,
            alpha_mult,
        }
    }

    pub fn alpha_power(k: u32) -> Self {
        AlphaExponent::new(Rational64::from_integer(0), k)
    }

    pub fn integer(n: i64) -> Self {
        AlphaExponent::new(Rational64::from_integer(n), 0)
    }

    pub fn value(&self, alpha: f64) -> f64 {
        crate::expr::rational_to_f64(self.const_part) + self.alpha_mult as f64 * alpha
    }

    pub fn is_zero(&self) -> bool {
        *self.const_part.numer() == 0 && self.alpha_mult == 0
    }

    pub(crate) fn shifted(&self, order: f64, alpha: f64) -> Result<Self, SeriesError> {
        if order == alpha {
            return Ok(AlphaExponent::new(self.const_part, self.alpha_mult + 1));
        }
        Ok(AlphaExponent::new(
            self.const_part + order_to_rational(order)?,
            self.alpha_mult,
        ))
    }

    fn total_cmp(&self, other: &Self, alpha: f64) -> Ordering {
        self.value(alpha)
            .total_cmp(&other.value(alpha))
            .then(self.const_part.cmp(&other.const_part))
            .then(self.alpha_mult.cmp(&other.alpha_mult))
    }
}

impl std::ops::Add for AlphaExponent {
    type Output = AlphaExponent;
    fn add(self, rhs: AlphaExponent) -> AlphaExponent {
        AlphaExponent::new(
            self.const_part + rhs.const_part,
            self.alpha_mult + rhs.alpha_mult,
        )
    }
}

impl fmt::Display for AlphaExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (*self.const_part.numer() == 0, self.alpha_mult) {
            (true, 0) => write!(f, "0"),
            (true, m) => write!(f, "{m}α"),
            (false, 0) => write!(f, "{}", self.const_part),
            (false, m) => write!(f, "{}+{m}α", self.const_part),
        }
    }
}

/// Exact rational form of an operator order such as 0.3 or 1.
pub(crate) fn order_to_rational(order: f64) -> Result<Rational64, SeriesError> {
    if !(order.is_finite() && order >= 0.0) {
        return Err(SeriesError::InvalidOrder(order));
    }
    Rational64::approximate_float(order)
        .filter(|r| *r.denom() <= 1_000_000 && crate::expr::rational_to_f64(*r) == order)
        .ok_or(SeriesError::InvalidOrder(order))
}

#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub exponent: AlphaExponent,
    pub coeff: Expr,
}

/// Spatial interval whose canonical sample points decide term pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDomain {
    pub lo: f64,
    pub hi: f64,
}

impl SampleDomain {
    pub fn new(lo: f64, hi: f64) -> Self {
        SampleDomain { lo, hi }
    }

    pub fn samples(&self) -> Vec<f64> {
        sample_points(self.lo, self.hi, SAMPLE_COUNT)
    }
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain { lo: -1.0, hi: 2.0 }
    }
}

/// Finite sum of `coeff(x)·t^exponent` terms for a fixed α.
///
/// Terms are kept sorted by the concrete exponent value (ties broken by the
/// exact key), keys are unique, and coefficients that vanish at every
/// canonical sample point are pruned.
#[derive(Debug, Clone)]
pub struct TimePowerSeries {
    alpha: f64,
    domain: SampleDomain,
    terms: Vec<SeriesTerm>,
}

impl TimePowerSeries {
    pub fn zero(alpha: f64) -> Self {
        TimePowerSeries {
            alpha,
            domain: SampleDomain::default(),
            terms: Vec::new(),
        }
    }

    pub fn with_domain(mut self, domain: SampleDomain) -> Self {
        self.domain = domain;
        self
    }

    /// A single term `coeff·t^exponent`.
    pub fn monomial(alpha: f64, exponent: AlphaExponent, coeff: Expr) -> Self {
        TimePowerSeries::from_terms(alpha, SampleDomain::default(), [(exponent, coeff)])
    }

    /// Time-constant series `g(x)`.
    pub fn constant(alpha: f64, coeff: Expr) -> Self {
        TimePowerSeries::monomial(alpha, AlphaExponent::ZERO, coeff)
    }

    pub fn from_terms<I>(alpha: f64, domain: SampleDomain, terms: I) -> Self
    where
        I: IntoIterator<Item = (AlphaExponent, Expr)>,
    {
        let mut s = TimePowerSeries::merged(alpha, domain, terms);
        s.prune();
        s
    }

    /// Merges equal exponents and sorts, without pruning.
    pub(crate) fn merged<I>(alpha: f64, domain: SampleDomain, terms: I) -> Self
    where
        I: IntoIterator<Item = (AlphaExponent, Expr)>,
    {
        let mut order: Vec<AlphaExponent> = Vec::new();
        let mut groups: HashMap<AlphaExponent, Vec<Expr>> = HashMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            groups
                .entry(e)
                .or_insert_with(|| {
                    order.push(e);
                    Vec::new()
                })
                .push(c);
        }
        let mut terms: Vec<SeriesTerm> = order
            .into_iter()
            .map(|e| {
                let mut cs = groups.remove(&e).unwrap();
                let coeff = if cs.len() == 1 {
                    cs.pop().unwrap()
                } else {
                    Expr::sum(cs)
                };
                SeriesTerm { exponent: e, coeff }
            })
            .filter(|t| !t.coeff.is_zero())
            .collect();
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent, alpha));
        TimePowerSeries {
            alpha,
            domain,
            terms,
        }
    }

    /// Drops terms whose coefficient is below [`PRUNE_TOLERANCE`] at every
    /// canonical sample point. A coefficient that fails to evaluate at some
    /// sample is kept.
    pub fn prune(&mut self) {
        let samples = self.domain.samples();
        self.terms.retain(|t| !negligible(&t.coeff, &samples));
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn domain(&self) -> SampleDomain {
        self.domain
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the given exponent, if present.
    pub fn coefficient(&self, exponent: AlphaExponent) -> Option<&Expr> {
        self.terms
            .iter()
            .find(|t| t.exponent == exponent)
            .map(|t| &t.coeff)
    }

    fn check_same_alpha(&self, other: &Self) -> Result<(), SeriesError> {
        if self.alpha == other.alpha {
            Ok(())
        } else {
            Err(SeriesError::AlphaMismatch {
                left: self.alpha,
                right: other.alpha,
            })
        }
    }

    pub(crate) fn map_coefficients<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&Expr) -> Expr,
    {
        TimePowerSeries::merged(
            self.alpha,
            self.domain,
            self.terms.iter().map(|t| (t.exponent, f(&t.coeff))),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut s = self.map_coefficients(|e| e.scale(c));
        s.prune();
        s
    }

    pub(crate) fn add_unpruned(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_same_alpha(other)?;
        Ok(TimePowerSeries::merged(
            self.alpha,
            self.domain,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.exponent, t.coeff.clone())),
        ))
    }

    pub(crate) fn mul_unpruned(&self, other: &Self, max_order: u32) -> Result<Self, SeriesError> {
        self.check_same_alpha(other)?;
        let mut products = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponent + b.exponent;
                if e.alpha_mult > max_order {
                    continue;
                }
                products.push((e, &a.coeff * &b.coeff));
            }
        }
        Ok(TimePowerSeries::merged(self.alpha, self.domain, products))
    }

    pub(crate) fn diff_x_with(&self, d: &mut Differentiator, order: u32) -> Self {
        self.map_coefficients(|c| d.nth(c, order))
    }

    /// Value at `(x, t)`; `t = 0` keeps only the time-constant terms.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64, SeriesError> {
        if !(t >= 0.0) {
            return Err(SeriesError::NegativeTime(t));
        }
        let mut acc = 0.0;
        for term in &self.terms {
            let mu = term.exponent.value(self.alpha);
            let tp = if mu == 0.0 {
                1.0
            } else if t == 0.0 {
                continue;
            } else {
                t.powf(mu)
            };
            acc += term.coeff.evaluate(x)? * tp;
        }
        Ok(acc)
    }

    /// Term-wise numerical comparison: same exponent keys and coefficients
    /// agreeing to `tol·(1 + |a|)` at the canonical samples.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let samples = self.domain.samples();
        self.terms.iter().zip(&other.terms).all(|(a, b)| {
            a.exponent == b.exponent && crate::expr::approx_eq(&a.coeff, &b.coeff, &samples, tol)
        })
    }

    /// Largest coefficient disagreement over the samples, matching terms by
    /// concrete exponent value. Unmatched terms contribute their own size.
    pub fn max_coefficient_gap(&self, other: &Self, samples: &[f64]) -> Result<f64, SeriesError> {
        let mut worst: f64 = 0.0;
        let mut by_value: Vec<(f64, Option<&Expr>, Option<&Expr>)> = Vec::new();
        for t in &self.terms {
            by_value.push((t.exponent.value(self.alpha), Some(&t.coeff), None));
        }
        for t in &other.terms {
            let v = t.exponent.value(other.alpha);
            match by_value
                .iter_mut()
                .find(|(w, _, b)| b.is_none() && (w - v).abs() <= 1e-12 * v.abs().max(1.0))
            {
                Some(slot) => slot.2 = Some(&t.coeff),
                None => by_value.push((v, None, Some(&t.coeff))),
            }
        }
        for &x in samples {
            for (_, a, b) in &by_value {
                let va = match a {
                    Some(e) => e.evaluate(x)?,
                    None => 0.0,
                };
                let vb = match b {
                    Some(e) => e.evaluate(x)?,
                    None => 0.0,
                };
                worst = worst.max((va - vb).abs());
            }
        }
        Ok(worst)
    }
}

fn negligible(c: &Expr, samples: &[f64]) -> bool {
    if c.is_zero() {
        return true;
    }
    samples.iter().all(|&x| match c.evaluate(x) {
        Ok(v) => v.abs() < PRUNE_TOLERANCE,
        Err(_) => false,
    })
}

/// Union of terms with coefficient sums.
pub fn series_add(
    s1: &TimePowerSeries,
    s2: &TimePowerSeries,
) -> Result<TimePowerSeries, SeriesError> {
    let mut s = s1.add_unpruned(s2)?;
    s.prune();
    Ok(s)
}

/// Cauchy product, dropping terms with `alpha_mult > max_order`.
pub fn series_mul(
    s1: &TimePowerSeries,
    s2: &TimePowerSeries,
    max_order: u32,
) -> Result<TimePowerSeries, SeriesError> {
    let mut s = s1.mul_unpruned(s2, max_order)?;
    s.prune();
    Ok(s)
}

/// Spatial derivative of every coefficient.
pub fn series_diff_x(s: &TimePowerSeries, order: u32) -> TimePowerSeries {
    let mut d = Differentiator::new();
    let mut out = s.diff_x_with(&mut d, order);
    out.prune();
    out
}

/// Σ c_k(x)·t^{μ_k} at the concrete α of the series.
pub fn evaluate_series(s: &TimePowerSeries, x: f64, t: f64) -> Result<f64, SeriesError> {
    s.evaluate(x, t)
}

impl fmt::Display for TimePowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "[{}]", t.coeff)?;
            } else {
                write!(f, "[{}]·t^({})", t.coeff, t.exponent)?;
            }
        }
        Ok(())
    }
}
