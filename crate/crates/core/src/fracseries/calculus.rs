use num_rational::Rational64;

use super::{order_to_rational, AlphaExponent, SeriesError, TimePowerSeries};
use crate::special::gamma_ratio;

/// Riemann–Liouville integral of the given order, term by term:
/// `J^β t^μ = Γ(μ+1)/Γ(μ+β+1) t^{μ+β}`.
///
/// When the order equals the series α the exponent moves one step along the
/// α lattice; any other order is added to the rational part.
pub fn frac_integral(s: &TimePowerSeries, order: f64) -> Result<TimePowerSeries, SeriesError> {
    let mut out = frac_integral_unpruned(s, order)?;
    out.prune();
    Ok(out)
}

pub(crate) fn frac_integral_unpruned(
    s: &TimePowerSeries,
    order: f64,
) -> Result<TimePowerSeries, SeriesError> {
    if !(order > 0.0) {
        return Err(SeriesError::InvalidOrder(order));
    }
    let alpha = s.alpha();
    let mut terms = Vec::with_capacity(s.len());
    for t in s.terms() {
        let mu = t.exponent.value(alpha);
        let factor = gamma_ratio(mu + 1.0, mu + order + 1.0)?;
        terms.push((t.exponent.shifted(order, alpha)?, t.coeff.scale(factor)));
    }
    Ok(TimePowerSeries::merged(alpha, s.domain(), terms))
}

/// Caputo derivative of order `β ∈ (0, 1]`, term by term:
/// `D^β t^μ = Γ(μ+1)/Γ(μ+1-β) t^{μ-β}`, with time-constant terms dropped.
///
/// Terms with `0 < μ < β`, or whose exponent cannot be lowered by `β` on the
/// lattice, fall outside the series class and are reported as errors.
pub fn caputo_derivative(s: &TimePowerSeries, order: f64) -> Result<TimePowerSeries, SeriesError> {
    if !(order > 0.0 && order <= 1.0) {
        return Err(SeriesError::InvalidOrder(order));
    }
    let alpha = s.alpha();
    let mut terms = Vec::with_capacity(s.len());
    for t in s.terms() {
        if t.exponent.is_zero() {
            continue;
        }
        let mu = t.exponent.value(alpha);
        let domain_err = SeriesError::CaputoDomain {
            exponent: mu,
            order,
        };
        let lowered = if order == alpha && t.exponent.alpha_mult > 0 {
            AlphaExponent::new(t.exponent.const_part, t.exponent.alpha_mult - 1)
        } else {
            let q = t.exponent.const_part - order_to_rational(order)?;
            if q < Rational64::from_integer(0) {
                return Err(domain_err);
            }
            AlphaExponent::new(q, t.exponent.alpha_mult)
        };
        let factor = gamma_ratio(mu + 1.0, mu + 1.0 - order).map_err(|_| domain_err)?;
        terms.push((lowered, t.coeff.scale(factor)));
    }
    let mut out = TimePowerSeries::merged(alpha, s.domain(), terms);
    out.prune();
    Ok(out)
}
