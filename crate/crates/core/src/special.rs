//! Gamma function for positive real arguments.
//!
//! Lanczos approximation with g = 7 and nine coefficients (the set used by
//! GSL and reproduced in many numerical libraries). Arguments below 1/2 are
//! shifted up with `Γ(x) = Γ(x + 1) / x`, so the series is only evaluated
//! where it is accurate. Relative error is below 1e-13 on [0.1, 30].

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("gamma is only defined here for positive arguments, got {0}")]
    Domain(f64),
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which Γ is finite in f64.
const GAMMA_OVERFLOW: f64 = 171.0;

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

fn check(x: f64) -> Result<(), SpecialError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SpecialError::Domain(x))
    }
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    check(x)?;
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    if x == x.floor() && x <= 23.0 {
        // exact factorials
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power to postpone overflow
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * std::f64::consts::PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    check(x)?;
    if x < 0.5 {
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Γ(a)/Γ(b). Falls back to a log-gamma difference once either argument is
/// large enough for Γ itself to overflow.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64, SpecialError> {
    check(a)?;
    check(b)?;
    if a == b {
        return Ok(1.0);
    }
    if a < GAMMA_OVERFLOW && b < GAMMA_OVERFLOW {
        return Ok(gamma(a)? / gamma(b)?);
    }
    Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
}

/// A gamma evaluation paired with its argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub argument: f64,
    pub value: f64,
}

impl GammaValue {
    pub fn new(argument: f64) -> Result<Self, SpecialError> {
        Ok(GammaValue {
            argument,
            value: gamma(argument)?,
        })
    }
}
