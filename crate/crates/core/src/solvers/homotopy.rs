//! Extraction of the nonlinear-term coefficients.
//!
//! He's polynomials come from truncated arithmetic in the homotopy parameter:
//! `N(Σ p^k u_k)` is expanded with every product dropping powers above `n`,
//! and `H_n` is the `p^n` coefficient. Adomian polynomials are computed on a
//! separate route, by summing over all ways of splitting the index `n`
//! among the factors of each monomial. For polynomial `N` the two agree.

use super::{FpdeProblem, Monomial, SolverError};
use crate::expr::{Differentiator, Expr};
use crate::fracseries::{SampleDomain, TimePowerSeries};

const NO_ALPHA_TRUNCATION: u32 = u32::MAX;

/// Polynomial in the homotopy parameter with series coefficients, truncated
/// at a fixed degree.
#[derive(Debug, Clone)]
pub struct HomotopyPolynomial {
    degree: usize,
    alpha: f64,
    domain: SampleDomain,
    coeffs: Vec<TimePowerSeries>,
}

impl HomotopyPolynomial {
    pub fn zero(alpha: f64, domain: SampleDomain, degree: usize) -> Self {
        HomotopyPolynomial {
            degree,
            alpha,
            domain,
            coeffs: Vec::new(),
        }
    }

    /// `Σ p^k terms[k]`, dropping entries above `degree`.
    pub fn from_terms(terms: &[TimePowerSeries], degree: usize) -> Self {
        let first = terms.first().expect("at least one term");
        HomotopyPolynomial {
            degree,
            alpha: first.alpha(),
            domain: first.domain(),
            coeffs: terms.iter().take(degree + 1).cloned().collect(),
        }
    }

    /// Time-constant, parameter-free polynomial `c(x)`.
    pub fn constant(alpha: f64, domain: SampleDomain, degree: usize, c: Expr) -> Self {
        HomotopyPolynomial {
            degree,
            alpha,
            domain,
            coeffs: vec![TimePowerSeries::constant(alpha, c).with_domain(domain)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `p^k`, empty when absent.
    pub fn coefficient(&self, k: usize) -> TimePowerSeries {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| TimePowerSeries::zero(self.alpha).with_domain(self.domain))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SolverError> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            coeffs.push(match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add_unpruned(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Ok(HomotopyPolynomial {
            coeffs,
            ..self.clone_empty()
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SolverError> {
        let degree = self.degree.min(other.degree);
        let len = (self.coeffs.len() + other.coeffs.len())
            .saturating_sub(1)
            .min(degree + 1);
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = TimePowerSeries::zero(self.alpha).with_domain(self.domain);
            for i in 0..=k {
                if let (Some(a), Some(b)) = (self.coeffs.get(i), other.coeffs.get(k - i)) {
                    acc = acc.add_unpruned(&a.mul_unpruned(b, NO_ALPHA_TRUNCATION)?)?;
                }
            }
            coeffs.push(acc);
        }
        Ok(HomotopyPolynomial {
            degree,
            coeffs,
            ..self.clone_empty()
        })
    }

    fn clone_empty(&self) -> Self {
        HomotopyPolynomial {
            degree: self.degree,
            alpha: self.alpha,
            domain: self.domain,
            coeffs: Vec::new(),
        }
    }
}

/// Spatial derivatives `∂^order u_k` for k = 0..=n, memoized through `d`.
pub(crate) fn derived_terms(
    terms: &[TimePowerSeries],
    order: u32,
    n: usize,
    d: &mut Differentiator,
) -> Vec<TimePowerSeries> {
    terms[..=n]
        .iter()
        .map(|s| s.diff_x_with(d, order))
        .collect()
}

fn check_terms(terms: &[TimePowerSeries], n: usize) -> Result<(), SolverError> {
    if terms.len() < n + 1 {
        return Err(SolverError::NotEnoughTerms {
            needed: n + 1,
            got: terms.len(),
        });
    }
    Ok(())
}

fn empty_like(problem: &FpdeProblem, terms: &[TimePowerSeries]) -> TimePowerSeries {
    let alpha = terms.first().map_or(problem.alpha, |t| t.alpha());
    TimePowerSeries::zero(alpha).with_domain(problem.sample_domain())
}

pub(crate) fn he_with(
    problem: &FpdeProblem,
    terms: &[TimePowerSeries],
    n: usize,
    d: &mut Differentiator,
) -> Result<TimePowerSeries, SolverError> {
    check_terms(terms, n)?;
    let alpha = terms[0].alpha();
    let domain = terms[0].domain();
    let mut symbols: [Option<HomotopyPolynomial>; 3] = [None, None, None];
    let mut total = HomotopyPolynomial::zero(alpha, domain, n);
    for m in &problem.nonlinear_op {
        let mut prod = HomotopyPolynomial::constant(alpha, domain, n, m.coeff.clone());
        for order in m.factor_orders() {
            let slot = &mut symbols[order as usize];
            if slot.is_none() {
                let derived = derived_terms(terms, order, n, d);
                *slot = Some(HomotopyPolynomial::from_terms(&derived, n));
            }
            prod = prod.mul(slot.as_ref().unwrap())?;
        }
        total = total.add(&prod)?;
    }
    let mut h = total.coefficient(n);
    h.prune();
    Ok(h)
}

/// `H_n`: coefficient of `p^n` in `N(Σ p^k u_k)` under truncated arithmetic.
pub fn he_polynomial(
    problem: &FpdeProblem,
    terms: &[TimePowerSeries],
    n: usize,
) -> Result<TimePowerSeries, SolverError> {
    if problem.nonlinear_op.is_empty() {
        check_terms(terms, n)?;
        return Ok(empty_like(problem, terms));
    }
    he_with(problem, terms, n, &mut Differentiator::new())
}

/// Calls `visit` with every tuple of nonnegative integers of length `parts`
/// summing to `n`.
fn for_each_composition<F>(n: usize, parts: usize, visit: &mut F) -> Result<(), SolverError>
where
    F: FnMut(&[usize]) -> Result<(), SolverError>,
{
    fn rec<F>(
        remaining: usize,
        slot: usize,
        buf: &mut Vec<usize>,
        visit: &mut F,
    ) -> Result<(), SolverError>
    where
        F: FnMut(&[usize]) -> Result<(), SolverError>,
    {
        if slot + 1 == buf.len() {
            buf[slot] = remaining;
            return visit(buf);
        }
        for k in 0..=remaining {
            buf[slot] = k;
            rec(remaining - k, slot + 1, buf, visit)?;
        }
        Ok(())
    }
    let mut buf = vec![0; parts];
    rec(n, 0, &mut buf, visit)
}

fn monomial_adomian(
    m: &Monomial,
    derived: &[Option<Vec<TimePowerSeries>>; 3],
    n: usize,
    acc: &mut TimePowerSeries,
) -> Result<(), SolverError> {
    let orders = m.factor_orders();
    let coeff = TimePowerSeries::constant(acc.alpha(), m.coeff.clone()).with_domain(acc.domain());
    let mut pieces = Vec::new();
    for_each_composition(n, orders.len(), &mut |ks| {
        let mut prod = coeff.clone();
        for (&order, &k) in orders.iter().zip(ks) {
            let factor = &derived[order as usize].as_ref().unwrap()[k];
            prod = prod.mul_unpruned(factor, NO_ALPHA_TRUNCATION)?;
            if prod.is_empty() {
                break;
            }
        }
        pieces.push(prod);
        Ok(())
    })?;
    for p in pieces {
        *acc = acc.add_unpruned(&p)?;
    }
    Ok(())
}

pub(crate) fn adomian_with(
    problem: &FpdeProblem,
    terms: &[TimePowerSeries],
    n: usize,
    d: &mut Differentiator,
) -> Result<TimePowerSeries, SolverError> {
    check_terms(terms, n)?;
    let mut derived: [Option<Vec<TimePowerSeries>>; 3] = [None, None, None];
    for m in &problem.nonlinear_op {
        for order in m.factor_orders() {
            let slot = &mut derived[order as usize];
            if slot.is_none() {
                *slot = Some(derived_terms(terms, order, n, d));
            }
        }
    }
    let mut acc = TimePowerSeries::zero(terms[0].alpha()).with_domain(terms[0].domain());
    for m in &problem.nonlinear_op {
        monomial_adomian(m, &derived, n, &mut acc)?;
    }
    acc.prune();
    Ok(acc)
}

/// `A_n`: sum over index splits `k_1 + … + k_m = n` of the products of the
/// corresponding factor terms, monomial by monomial.
pub fn adomian_polynomial(
    problem: &FpdeProblem,
    terms: &[TimePowerSeries],
    n: usize,
) -> Result<TimePowerSeries, SolverError> {
    if problem.nonlinear_op.is_empty() {
        check_terms(terms, n)?;
        return Ok(empty_like(problem, terms));
    }
    adomian_with(problem, terms, n, &mut Differentiator::new())
}
