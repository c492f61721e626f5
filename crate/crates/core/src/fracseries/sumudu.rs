//! Sumudu transform restricted to generalized power series.
//!
//! `S[t^a](u) = Γ(a+1) u^a`, so an image is a power series in `u` whose
//! coefficients carry the gamma factor separately as `scale`. Keeping the
//! factor numeric lets the inverse divide it back out without touching the
//! coefficient expression.

use super::{AlphaExponent, SampleDomain, SeriesError, TimePowerSeries};
use crate::expr::Expr;
use crate::special::gamma;

#[derive(Debug, Clone)]
pub struct ImageTerm {
    pub power: AlphaExponent,
    pub scale: f64,
    pub coeff: Expr,
}

/// `Σ scale_k · coeff_k(x) · u^{power_k}`.
#[derive(Debug, Clone)]
pub struct SumuduImage {
    alpha: f64,
    domain: SampleDomain,
    terms: Vec<ImageTerm>,
}

impl SumuduImage {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn terms(&self) -> &[ImageTerm] {
        &self.terms
    }
}

pub fn sumudu_forward(s: &TimePowerSeries) -> Result<SumuduImage, SeriesError> {
    let alpha = s.alpha();
    let terms = s
        .terms()
        .iter()
        .map(|t| {
            Ok(ImageTerm {
                power: t.exponent,
                scale: gamma(t.exponent.value(alpha) + 1.0)?,
                coeff: t.coeff.clone(),
            })
        })
        .collect::<Result<Vec<_>, SeriesError>>()?;
    Ok(SumuduImage {
        alpha,
        domain: s.domain(),
        terms,
    })
}

/// Multiplies the image by `u^order`.
pub fn sumudu_scale(img: &SumuduImage, order: f64) -> Result<SumuduImage, SeriesError> {
    if !(order > 0.0) {
        return Err(SeriesError::InvalidOrder(order));
    }
    let terms = img
        .terms
        .iter()
        .map(|t| {
            Ok(ImageTerm {
                power: t.power.shifted(order, img.alpha)?,
                scale: t.scale,
                coeff: t.coeff.clone(),
            })
        })
        .collect::<Result<Vec<_>, SeriesError>>()?;
    Ok(SumuduImage {
        alpha: img.alpha,
        domain: img.domain,
        terms,
    })
}

/// `S⁻¹[u^a] = t^a / Γ(a+1)`.
pub fn sumudu_inverse(img: &SumuduImage) -> Result<TimePowerSeries, SeriesError> {
    let mut s = sumudu_inverse_unpruned(img)?;
    s.prune();
    Ok(s)
}

pub(crate) fn sumudu_inverse_unpruned(img: &SumuduImage) -> Result<TimePowerSeries, SeriesError> {
    let terms = img
        .terms
        .iter()
        .map(|t| {
            let g = gamma(t.power.value(img.alpha) + 1.0)?;
            Ok((t.power, t.coeff.scale(t.scale / g)))
        })
        .collect::<Result<Vec<_>, SeriesError>>()?;
    Ok(TimePowerSeries::merged(img.alpha, img.domain, terms))
}
